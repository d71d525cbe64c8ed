#pragma once

#include "taraarch/estimation.hpp"
#include "taraarch/fit_report.hpp"
#include "taraarch/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace taraarch {

/// Candidate delays and thresholds for a profile search over partitions.
struct SearchGrid {
    std::vector<std::size_t> delays;
    /// Sorted threshold candidates for each entry of `delays`.
    std::vector<std::vector<double>> thresholds;
    std::size_t max_regimes = 2;
    bool include_single_regime = false;
    double min_regime_fraction = 0.1;

    /// Empirical quantiles of x_{t-d} at levels lo, lo+step, ..., hi for each delay.
    static SearchGrid quantile_grid(const TimeSeries& series, std::vector<std::size_t> delays,
                                    std::size_t max_regimes = 2, bool include_single_regime = false,
                                    double min_regime_fraction = 0.1, double lo = 0.10, double hi = 0.90,
                                    double step = 0.025);

    void validate() const;
};

struct SearchCandidate {
    ThresholdPartition partition;
    bool evaluated = false;  ///< false when skipped for occupancy or failed
    std::string note;
    double qll = 0.0;
    double criterion = 0.0;  ///< qll - (k/2) log n
    std::size_t parameters = 0;
};

struct SearchResult {
    ThresholdPartition partition;
    FitReport fit;
    std::vector<SearchCandidate> candidates;
};

/// Fits every candidate partition on a common likelihood sample (conditioning on
/// max(p, q, max delay) observations) and keeps the largest qll - (k/2) log n.
/// Ties go to the smaller delay, then the smaller first threshold. Throws
/// std::runtime_error listing the failures when no candidate can be fitted.
[[nodiscard]] SearchResult threshold_delay_search(const TimeSeries& series, std::size_t p, std::size_t q,
                                                  const SearchGrid& grid, const FitOptions& options = {});

}  // namespace taraarch

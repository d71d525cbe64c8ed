#include "taraarch/search.hpp"

#include "design.hpp"
#include "taraarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace taraarch {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double level) {
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void append_partitions(std::size_t delay, const std::vector<double>& cands, std::size_t boundaries,
                       std::vector<ThresholdPartition>& out) {
    std::vector<double> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (chosen.size() == boundaries) {
            out.emplace_back(delay, chosen);
            return;
        }
        for (std::size_t i = from; i < cands.size(); ++i) {
            chosen.push_back(cands[i]);
            rec(i + 1);
            chosen.pop_back();
        }
    };
    rec(0);
}

}  // namespace

SearchGrid SearchGrid::quantile_grid(const TimeSeries& series, std::vector<std::size_t> delays,
                                     std::size_t max_regimes, bool include_single_regime,
                                     double min_regime_fraction, double lo, double hi, double step) {
    SearchGrid grid;
    grid.max_regimes = max_regimes;
    grid.include_single_regime = include_single_regime;
    grid.min_regime_fraction = min_regime_fraction;
    std::sort(delays.begin(), delays.end());
    delays.erase(std::unique(delays.begin(), delays.end()), delays.end());
    const std::size_t max_delay = delays.empty() ? 1 : delays.back();
    const auto x = series.values();
    for (std::size_t d : delays) {
        if (d == 0 || x.size() <= max_delay) throw std::invalid_argument("quantile_grid: bad delay or short series");
        std::vector<double> lagged(x.begin() + static_cast<std::ptrdiff_t>(max_delay - d),
                                   x.end() - static_cast<std::ptrdiff_t>(d));
        std::sort(lagged.begin(), lagged.end());
        std::vector<double> cands;
        const auto levels = static_cast<std::size_t>(std::llround((hi - lo) / step));
        for (std::size_t i = 0; i <= levels; ++i) cands.push_back(quantile_sorted(lagged, lo + step * static_cast<double>(i)));
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        grid.delays.push_back(d);
        grid.thresholds.push_back(std::move(cands));
    }
    return grid;
}

void SearchGrid::validate() const {
    if (delays.empty()) throw std::invalid_argument("SearchGrid: no delay candidates");
    if (thresholds.size() != delays.size())
        throw std::invalid_argument("SearchGrid: one threshold list per delay is required");
    if (max_regimes < 1) throw std::invalid_argument("SearchGrid: max_regimes must be >= 1");
    if (!(min_regime_fraction > 0.0 && min_regime_fraction < 0.5))
        throw std::invalid_argument("SearchGrid: min_regime_fraction must lie in (0, 0.5)");
    for (const auto& t : thresholds)
        if (!std::is_sorted(t.begin(), t.end())) throw std::invalid_argument("SearchGrid: unsorted thresholds");
}

SearchResult threshold_delay_search(const TimeSeries& series, std::size_t p, std::size_t q, const SearchGrid& grid,
                                    const FitOptions& options) {
    grid.validate();
    const std::size_t max_delay = *std::max_element(grid.delays.begin(), grid.delays.end());
    const std::size_t start = std::max({p, q, max_delay, options.start});

    // Deterministic candidate order: delay, regime count, thresholds.
    std::vector<std::size_t> order(grid.delays.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid.delays[a] < grid.delays[b]; });
    std::vector<ThresholdPartition> partitions;
    for (std::size_t i : order) {
        const std::size_t d = grid.delays[i];
        if (grid.include_single_regime) partitions.push_back(ThresholdPartition::single_regime(d));
        for (std::size_t l = 2; l <= grid.max_regimes; ++l) append_partitions(d, grid.thresholds[i], l - 1, partitions);
    }
    if (partitions.empty()) throw std::invalid_argument("threshold_delay_search: empty grid");

    FitOptions cand_opts = options;
    cand_opts.start = start;
    cand_opts.compute_information = false;

    std::vector<SearchCandidate> cands;
    cands.reserve(partitions.size());
    std::size_t best = partitions.size();
    std::string failures;
    for (auto& part : partitions) {
        SearchCandidate c{.partition = part};
        const auto design = detail::make_design(series, part, p, q, start);
        const double n = static_cast<double>(design.size());
        const auto smallest = *std::min_element(design.counts.begin(), design.counts.end());
        if (part.regimes() > 1 && static_cast<double>(smallest) < grid.min_regime_fraction * n) {
            c.note = "regime occupancy below min_regime_fraction";
            cands.push_back(std::move(c));
            continue;
        }
        try {
            const auto fit = fit_alternating(series, part, p, q, std::nullopt, cand_opts);
            c.evaluated = true;
            c.qll = fit.qll;
            c.parameters = fit.param_names.size();
            c.criterion = fit.qll - 0.5 * static_cast<double>(c.parameters) * std::log(n);
            if (best == partitions.size() || c.criterion > cands[best].criterion) best = cands.size();
        } catch (const std::exception& ex) {
            c.note = ex.what();
            failures += "\n  d=" + std::to_string(part.delay()) + ": " + ex.what();
        }
        cands.push_back(std::move(c));
    }
    if (best == partitions.size())
        throw std::runtime_error("threshold_delay_search: every candidate failed" + failures);

    FitOptions final_opts = options;
    final_opts.start = start;
    auto fit = fit_alternating(series, cands[best].partition, p, q, std::nullopt, final_opts);
    return {cands[best].partition, std::move(fit), std::move(cands)};
}

}  // namespace taraarch

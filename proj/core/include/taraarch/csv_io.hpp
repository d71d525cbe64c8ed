#pragma once

// Comma-separated files: optional single header row, decimal point, numbers written
// with 17 significant digits.

#include "taraarch/montecarlo.hpp"
#include "taraarch/simulate.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace taraarch {

/// "%.17g"
[[nodiscard]] std::string format_number(double value);

/// One numeric column. A non-numeric first line is taken as a header; any later
/// non-numeric line throws DataError naming the 1-based line number.
[[nodiscard]] std::vector<double> read_column(std::istream& in, const std::string& source = "input");

/// The column called `name` of a file with a header row.
[[nodiscard]] std::vector<double> read_named_column(std::istream& in, const std::string& name,
                                                    const std::string& source = "input");

void write_column(std::ostream& out, std::span<const double> values, const std::string& header = "x");

/// index,x,h,z with 0-based index.
void write_path(std::ostream& out, const SimulatedPath& path);

/// n,r,seed,converged,<params>,se_<params>,cov_i_j (upper triangle),selected_delay,selected_thresholds
void write_rows(std::ostream& out, const ExperimentResult& result);

/// Reads rows written by write_rows for a layout of k parameters.
[[nodiscard]] std::vector<ExperimentRow> read_rows(std::istream& in, std::size_t k);

}  // namespace taraarch

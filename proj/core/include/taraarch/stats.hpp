#pragma once

#include <span>
#include <vector>

namespace taraarch::stats {

[[nodiscard]] double mean(std::span<const double> x);
/// Unbiased sample variance.
[[nodiscard]] double variance(std::span<const double> x);
/// Moment skewness m3 / m2^{3/2}.
[[nodiscard]] double skewness(std::span<const double> x);
/// m4 / m2^2 - 3.
[[nodiscard]] double excess_kurtosis(std::span<const double> x);
[[nodiscard]] double median(std::vector<double> x);
/// Linear-interpolation quantile (type 7).
[[nodiscard]] double quantile(std::vector<double> x, double level);

/// Anderson-Darling A^2 of x against the fully specified N(0, 1).
[[nodiscard]] double anderson_darling_normal(std::span<const double> x);

/// Upper 1% point of A^2 for a fully specified null.
inline constexpr double kAndersonDarlingCritical1pct = 3.857;

}  // namespace taraarch::stats

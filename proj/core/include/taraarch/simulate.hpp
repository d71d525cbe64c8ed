#pragma once

#include "taraarch/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace taraarch {

struct SimConfig {
    std::size_t n = 0;
    std::size_t burn_in = 500;
    std::uint64_t seed = 0;
    /// Presample x values, oldest first; zeros when empty. Only the last max(p,d) are used.
    std::vector<double> init_values;
};

struct SimulatedPath {
    TimeSeries series;
    std::vector<double> innovations;  ///< z_t, aligned with series
    std::vector<double> variances;    ///< h_t, aligned with series
};

/// Paths with |x_t| above this abort with ExplosivePathError.
inline constexpr double kExplosiveBound = 1e12;

/// Runs the recursions forward for burn_in + n steps and keeps the last n.
/// Draw s of the stream (0-based, counting burn-in) is z for step s, so the path is
/// a pure function of (spec, config). Presample residuals are zero.
[[nodiscard]] SimulatedPath simulate_path(const ModelSpec& spec, const SimConfig& config);

}  // namespace taraarch

#pragma once

#include "taraarch/model.hpp"

namespace taraarch {

/// (100 if scale100) * ln(p_t / p_{t-1}); length n - 1. Throws DataError naming the
/// first non-positive price.
[[nodiscard]] TimeSeries log_return_transform(const TimeSeries& prices, bool scale100);

/// (p_t - p_{t-1}) / p_{t-1}; length n - 1.
[[nodiscard]] TimeSeries relative_return_transform(const TimeSeries& prices);

/// 2 (sqrt(w) - 1), the square-root Box-Cox transform used for sunspot counts.
[[nodiscard]] TimeSeries box_cox_sunspot_transform(const TimeSeries& w);

}  // namespace taraarch

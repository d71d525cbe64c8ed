#include "taraarch/transforms.hpp"

#include "taraarch/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace taraarch {

namespace {

void require_length(const TimeSeries& s, const char* who) {
    if (s.size() < 2) throw DataError(std::string(who) + ": need at least 2 prices");
}

}  // namespace

TimeSeries log_return_transform(const TimeSeries& prices, bool scale100) {
    require_length(prices, "log_return_transform");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0))
            throw DataError("log_return_transform: non-positive price at index " + std::to_string(i));
    }
    const double scale = scale100 ? 100.0 : 1.0;
    std::vector<double> out(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) out[t - 1] = scale * std::log(prices[t] / prices[t - 1]);
    return TimeSeries(std::move(out), prices.origin_label());
}

TimeSeries relative_return_transform(const TimeSeries& prices) {
    require_length(prices, "relative_return_transform");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (prices[i] == 0.0)
            throw DataError("relative_return_transform: zero price at index " + std::to_string(i));
    }
    std::vector<double> out(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) out[t - 1] = (prices[t] - prices[t - 1]) / prices[t - 1];
    return TimeSeries(std::move(out), prices.origin_label());
}

TimeSeries box_cox_sunspot_transform(const TimeSeries& w) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) throw DataError("box_cox_sunspot_transform: negative value at index " + std::to_string(i));
        out[i] = 2.0 * (std::sqrt(w[i]) - 1.0);
    }
    return TimeSeries(std::move(out), w.origin_label());
}

}  // namespace taraarch

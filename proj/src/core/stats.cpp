#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "support/errors.hpp"

namespace echofilter::core {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("quantile of empty sample");
    if (q < 0.0 || q > 1.0) throw DomainError("quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * (static_cast<double>(values.size()) - 1.0);
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double iqr(const std::vector<double>& values) {
    return quantile(values, 0.75) - quantile(values, 0.25);
}

double idr(const std::vector<double>& values) {
    return quantile(values, 0.90) - quantile(values, 0.10);
}

std::vector<double> median_filter(const std::vector<double>& values,
                                  const std::vector<unsigned char>& valid, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) throw DomainError("median filter kernel must be odd");
    const int n = static_cast<int>(values.size());
    const int half = kernel / 2;
    std::vector<double> out(values);
    std::vector<double> window;
    window.reserve(kernel);
    for (int i = 0; i < n; ++i) {
        if (!valid.empty() && !valid[i]) continue;
        window.clear();
        for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
            if (valid.empty() || valid[j]) window.push_back(values[j]);
        }
        if (!window.empty()) out[i] = median(window);
    }
    return out;
}

}  // namespace echofilter::core

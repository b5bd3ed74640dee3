#pragma once
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace sivtherm {

inline double mean(std::span<const double> v) {
    if (v.empty()) throw contract_error("mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Unbiased (n-1) sample standard deviation.
inline double sample_std(std::span<const double> v) {
    if (v.size() < 2) throw contract_error("sample_std: need at least 2 points");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_sigma = 0.0;
    double intercept_sigma = 0.0;
};

/// Ordinary least-squares line y = slope*x + intercept with standard errors
/// from the residual scatter.
inline LineFit linear_regression(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3)
        throw contract_error("linear_regression: need matching x/y with >= 3 points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw ill_conditioned_error("linear_regression: degenerate x values");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        rss += r * r;
    }
    const double s2 = rss / static_cast<double>(n - 2);
    f.slope_sigma = std::sqrt(s2 / sxx);
    f.intercept_sigma = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    return f;
}

/// Slope of log(y) against log(x); the falloff/scaling exponent estimator.
inline LineFit loglog_regression(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw contract_error("loglog_regression: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_regression(lx, ly);
}

} // namespace sivtherm

#pragma once

#include <span>
#include <vector>

namespace macrodim {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> residuals;
};

// Ordinary least squares y ≈ a + b x. Needs at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct RegressionFit {
    std::vector<double> coef;
    std::vector<double> stderr_;
    double weighted_rss = 0.0;
};

// Weighted least squares with design columns; coef[i] multiplies cols[i].
RegressionFit fit_weighted(const std::vector<std::vector<double>>& cols,
                           std::span<const double> y, std::span<const double> w);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);
// Drops floor(frac*n) values from each end before averaging.
double trimmed_mean(std::vector<double> v, double frac);

inline constexpr double kZ95 = 1.959963984540054;

}  // namespace macrodim

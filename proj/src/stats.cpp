#include "macrodim/stats.hpp"

#include "macrodim/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace macrodim {

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw InputError("fit_line: need at least two points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0)
        throw InputError("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    f.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.residuals[i] = y[i] - f.intercept - f.slope * x[i];
        rss += f.residuals[i] * f.residuals[i];
    }
    f.slope_stderr = n > 2 ? std::sqrt(rss / double(n - 2) / sxx) : 0.0;
    return f;
}

RegressionFit fit_weighted(const std::vector<std::vector<double>>& cols,
                           std::span<const double> y, std::span<const double> w)
{
    const std::size_t p = cols.size(), n = y.size();
    if (p == 0 || n <= p)
        throw InputError("fit_weighted: too few observations");
    std::vector<double> a(p * p, 0.0), b(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < p; ++r) {
            b[r] += w[i] * cols[r][i] * y[i];
            for (std::size_t c = 0; c < p; ++c)
                a[r * p + c] += w[i] * cols[r][i] * cols[c][i];
        }
    }
    // Gauss-Jordan on [A | I | b]
    std::vector<double> inv(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        inv[i * p + i] = 1.0;
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(a[r * p + c]) > std::abs(a[piv * p + c]))
                piv = r;
        if (std::abs(a[piv * p + c]) < 1e-300)
            throw InputError("fit_weighted: singular design");
        for (std::size_t k = 0; k < p; ++k) {
            std::swap(a[c * p + k], a[piv * p + k]);
            std::swap(inv[c * p + k], inv[piv * p + k]);
        }
        std::swap(b[c], b[piv]);
        const double d = a[c * p + c];
        for (std::size_t k = 0; k < p; ++k) {
            a[c * p + k] /= d;
            inv[c * p + k] /= d;
        }
        b[c] /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c)
                continue;
            const double m = a[r * p + c];
            if (m == 0)
                continue;
            for (std::size_t k = 0; k < p; ++k) {
                a[r * p + k] -= m * a[c * p + k];
                inv[r * p + k] -= m * inv[c * p + k];
            }
            b[r] -= m * b[c];
        }
    }
    RegressionFit f;
    f.coef = b;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0;
        for (std::size_t r = 0; r < p; ++r)
            pred += f.coef[r] * cols[r][i];
        f.weighted_rss += w[i] * (y[i] - pred) * (y[i] - pred);
    }
    const double s2 = f.weighted_rss / double(n - p);
    f.stderr_.resize(p);
    for (std::size_t r = 0; r < p; ++r)
        f.stderr_[r] = std::sqrt(std::max(0.0, s2 * inv[r * p + r]));
    return f;
}

double mean(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_variance(std::span<const double> v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double s = 0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

double trimmed_mean(std::vector<double> v, double frac)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const auto cut = static_cast<std::size_t>(std::floor(frac * double(v.size())));
    if (2 * cut >= v.size())
        return mean(v);
    return mean(std::span<const double>(v).subspan(cut, v.size() - 2 * cut));
}

}  // namespace macrodim

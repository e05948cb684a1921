#pragma once

#include "macrodim/common.hpp"

#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace macrodim {

class ShellSource;

namespace kernels {

// out = in + lambda * (periodic second difference); lambda = dt / (2 dx^2).
void heat_step_1d(std::span<const double> in, std::span<double> out, double lambda, Exec exec);
// Row-major nx by ny periodic grid, five-point stencil.
void heat_step_2d(std::span<const double> in, std::span<double> out, std::size_t nx,
                  std::size_t ny, double lambda, Exec exec);

// u <- u * exp(r(u) a z - r(u)^2 b) with r the local rate sigma(u)/u.
template <class Rate>
void multiplicative_update(std::span<double> u, std::span<const double> z, double a, double b,
                           const Rate& rate, Exec exec)
{
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double r = rate(u[i]);
            u[i] *= std::exp(r * a * z[i] - r * r * b);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double r = rate(u[i]);
            u[i] *= std::exp(r * a * z[i] - r * r * b);
        }
    }
}

// out = diffused + sigma(u) a z.
template <class Sigma>
void euler_noise(std::span<const double> u, std::span<double> out, std::span<const double> z,
                 double a, const Sigma& sigma, Exec exec)
{
    const std::ptrdiff_t n = std::ptrdiff_t(u.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[i] += sigma(u[i]) * a * z[i];
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[i] += sigma(u[i]) * a * z[i];
    }
}

// Calls f(i) for every replica; results must be stored by index.
// The exception of the lowest failing index is rethrown after the loop.
template <class F>
void for_each_replica(std::size_t n, F&& f, Exec exec)
{
    const std::ptrdiff_t m = std::ptrdiff_t(n);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < m; ++i)
            f(std::size_t(i));
        return;
    }
    std::exception_ptr err;
    std::ptrdiff_t err_at = m;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        try {
            f(std::size_t(i));
        } catch (...) {
#pragma omp critical(macrodim_replica_error)
            if (i < err_at) {
                err_at = i;
                err = std::current_exception();
            }
        }
    }
    if (err)
        std::rethrow_exception(err);
}

// Content of every listed shell at one rho.
std::vector<double> shell_contents(const ShellSource& src, std::span<const int> shells,
                                   double rho, double c0, Exec exec);

}  // namespace kernels
}  // namespace macrodim

#include "macrodim/kernels.hpp"

#include "macrodim/macro_dimension.hpp"

namespace macrodim::kernels {

void heat_step_1d(std::span<const double> in, std::span<double> out, double lambda, Exec exec)
{
    const std::ptrdiff_t n = std::ptrdiff_t(in.size());
    if (n < 3)
        throw InputError("heat_step_1d: need at least 3 sites");
    auto site = [&](std::ptrdiff_t i) {
        const double l = in[std::size_t(i == 0 ? n - 1 : i - 1)];
        const double r = in[std::size_t(i == n - 1 ? 0 : i + 1)];
        out[std::size_t(i)] = in[std::size_t(i)] + lambda * (l - 2.0 * in[std::size_t(i)] + r);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            site(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            site(i);
    }
}

void heat_step_2d(std::span<const double> in, std::span<double> out, std::size_t nx,
                  std::size_t ny, double lambda, Exec exec)
{
    if (nx < 3 || ny < 3 || in.size() != nx * ny)
        throw InputError("heat_step_2d: bad grid");
    const std::ptrdiff_t rows = std::ptrdiff_t(nx);
    auto row = [&](std::ptrdiff_t ii) {
        const std::size_t i = std::size_t(ii);
        const std::size_t up = i == 0 ? nx - 1 : i - 1, dn = i == nx - 1 ? 0 : i + 1;
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t lf = j == 0 ? ny - 1 : j - 1, rt = j == ny - 1 ? 0 : j + 1;
            const double c = in[i * ny + j];
            out[i * ny + j] = c + lambda * (in[up * ny + j] + in[dn * ny + j] + in[i * ny + lf] +
                                            in[i * ny + rt] - 4.0 * c);
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < rows; ++i)
            row(i);
    } else {
        for (std::ptrdiff_t i = 0; i < rows; ++i)
            row(i);
    }
}

std::vector<double> shell_contents(const ShellSource& src, std::span<const int> shells,
                                   double rho, double c0, Exec exec)
{
    std::vector<double> out(shells.size());
    for_each_replica(
        shells.size(), [&](std::size_t i) { out[i] = src.content(shells[i], rho, c0); }, exec);
    return out;
}

}  // namespace macrodim::kernels

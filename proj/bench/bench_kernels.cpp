#include "macrodim/kernels.hpp"
#include "macrodim/macro_dimension.hpp"
#include "macrodim/rng.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

using namespace macrodim;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_heat_1d(benchmark::State& s)
{
    const std::size_t n = std::size_t(s.range(0));
    std::vector<double> a(n, 1.0), b(n);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = double(i % 17);
    for (auto _ : s) {
        kernels::heat_step_1d(a, b, 0.25, exec_of(s));
        benchmark::DoNotOptimize(b.data());
    }
    s.SetItemsProcessed(s.iterations() * std::int64_t(n));
}

void BM_heat_2d(benchmark::State& s)
{
    const std::size_t n = std::size_t(s.range(0));
    std::vector<double> a(n * n), b(n * n);
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = double(i % 13);
    for (auto _ : s) {
        kernels::heat_step_2d(a, b, n, n, 0.125, exec_of(s));
        benchmark::DoNotOptimize(b.data());
    }
    s.SetItemsProcessed(s.iterations() * std::int64_t(n * n));
}

void BM_multiplicative(benchmark::State& s)
{
    const std::size_t n = std::size_t(s.range(0));
    std::vector<double> u(n, 1.0), z(n);
    Rng rng(7);
    rng.fill_normal(z);
    const auto rate = [](double) { return 1.0; };
    for (auto _ : s) {
        kernels::multiplicative_update(std::span<double>(u), z, 1e-3, 1e-6, rate, exec_of(s));
        benchmark::DoNotOptimize(u.data());
    }
    s.SetItemsProcessed(s.iterations() * std::int64_t(n));
}

void BM_shell_contents(benchmark::State& s)
{
    FixtureSpec f;
    f.kind = FixtureKind::skeleton;
    f.theta = 0.5;
    const auto p = fixture_set(f, 5, int(s.range(0)));
    const PixelSource src(p);
    std::vector<int> shells(std::size_t(s.range(0) - 4));
    std::iota(shells.begin(), shells.end(), 5);
    for (auto _ : s)
        benchmark::DoNotOptimize(kernels::shell_contents(src, shells, 0.5, 1.0, exec_of(s)));
}

}  // namespace

BENCHMARK(BM_heat_1d)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_heat_2d)->ArgsProduct({{256, 1024}, {0, 1}});
BENCHMARK(BM_multiplicative)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_shell_contents)->ArgsProduct({{20, 30}, {0, 1}});

BENCHMARK_MAIN();

#include "macrodim/kernels.hpp"
#include "macrodim/macro_dimension.hpp"
#include "macrodim/moments_lab.hpp"
#include "macrodim/spectrum_lab.hpp"

#include <doctest.h>
#include <omp.h>

#include <numeric>
#include <stdexcept>

using namespace macrodim;

namespace {

struct Threads {
    explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
    int saved;
};

}  // namespace

TEST_SUITE("parallel")
{
    TEST_CASE("stencils match the serial reference")
    {
        const Threads th(4);
        std::vector<double> a(4099), s(a.size()), p(a.size());
        Rng rng(1);
        rng.fill_normal(a);
        kernels::heat_step_1d(a, s, 0.3, Exec::serial);
        kernels::heat_step_1d(a, p, 0.3, Exec::parallel);
        CHECK(s == p);
        CHECK(s[0] == doctest::Approx(a[0] + 0.3 * (a[1] - 2 * a[0] + a.back())));

        const std::size_t nx = 67, ny = 45;
        std::vector<double> b(nx * ny), s2(b.size()), p2(b.size());
        rng.fill_normal(b);
        kernels::heat_step_2d(b, s2, nx, ny, 0.1, Exec::serial);
        kernels::heat_step_2d(b, p2, nx, ny, 0.1, Exec::parallel);
        CHECK(s2 == p2);
        const double want = b[ny + 1] + 0.1 * (b[1] + b[2 * ny + 1] + b[ny] + b[ny + 2] - 4 * b[ny + 1]);
        CHECK(s2[ny + 1] == doctest::Approx(want));
    }

    TEST_CASE("multiplicative update matches the serial reference")
    {
        const Threads th(3);
        std::vector<double> z(5000), u1(z.size(), 1.0), u2(z.size(), 1.0);
        Rng rng(2);
        rng.fill_normal(z);
        const auto rate = [](double u) { return u > 1 ? 1.2 : 0.8; };
        kernels::multiplicative_update(std::span<double>(u1), z, 0.3, 0.01, rate, Exec::serial);
        kernels::multiplicative_update(std::span<double>(u2), z, 0.3, 0.01, rate, Exec::parallel);
        CHECK(u1 == u2);
        CHECK(u1[7] == doctest::Approx(std::exp(0.8 * 0.3 * z[7] - 0.64 * 0.01)));
    }

    TEST_CASE("shell contents match the serial reference")
    {
        const Threads th(4);
        FixtureSpec f;
        f.kind = FixtureKind::skeleton;
        f.theta = 0.5;
        const auto p = fixture_set(f, 5, 20);
        const PixelSource src(p);
        std::vector<int> shells(16);
        std::iota(shells.begin(), shells.end(), 5);
        for (double rho : {0.25, 0.5, 0.9})
            CHECK(kernels::shell_contents(src, shells, rho, 1.0, Exec::serial) ==
                  kernels::shell_contents(src, shells, rho, 1.0, Exec::parallel));
        EstimatorOptions s, q;
        s.exec = Exec::serial;
        q.exec = Exec::parallel;
        CHECK(dimh_estimate(src, 5, 20, s).value == dimh_estimate(src, 5, 20, q).value);
    }

    TEST_CASE("replica loop rethrows the lowest failing index")
    {
        const Threads th(4);
        std::vector<int> done(64, 0);
        try {
            kernels::for_each_replica(
                64,
                [&](std::size_t i) {
                    if (i == 41 || i == 17)
                        throw std::runtime_error("replica " + std::to_string(i));
                    done[i] = 1;
                },
                Exec::parallel);
            FAIL("no exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "replica 17");
        }
        CHECK(std::accumulate(done.begin(), done.end(), 0) == 62);
    }

    TEST_CASE("sweeps and ensembles do not depend on the worker count")
    {
        SpectrumConfig c;
        c.model = SpectrumModel::ou;
        c.gammas = {0.4, 0.8};
        c.replicas = 4;
        c.n_max = 9;
        c.seed = 5;
        c.exec = Exec::serial;
        const auto a = spectrum_sweep(c);
        const Threads th(4);
        c.exec = Exec::parallel;
        const auto b = spectrum_sweep(c);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].hausdorff.per_replica == b.rows[i].hausdorff.per_replica);
            CHECK(a.rows[i].minkowski.value == b.rows[i].minkowski.value);
        }

        MomentConfig mc;
        mc.she.x_max = 8;
        const std::vector<double> ks{2, 3};
        const std::vector<double> ts{0.25, 0.5};
        mc.exec = Exec::serial;
        const auto m1 = moment_ensemble(mc, ks, ts, 100, 9);
        mc.exec = Exec::parallel;
        const auto m2 = moment_ensemble(mc, ks, ts, 100, 9);
        for (std::size_t i = 0; i < m1.size(); ++i)
            CHECK(m1[i].estimate == m2[i].estimate);

        const std::vector<double> xs{2.5};
        CHECK(pickands_check(xs, 1.0 / 32, 2000, 3, Exec::serial)[0].empirical ==
              pickands_check(xs, 1.0 / 32, 2000, 3, Exec::parallel)[0].empirical);
    }
}

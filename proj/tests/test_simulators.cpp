#include "macrodim/simulators.hpp"
#include "macrodim/stats.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace macrodim;

TEST_SUITE("simulators")
{
    TEST_CASE("brownian motion moments")
    {
        std::vector<double> b1, b2, b5;
        for (std::uint64_t r = 0; r < 100000; ++r) {
            Rng rng(7, Stream::bm, r);
            const auto g = simulate_bm(5.0, 1.0, rng);
            REQUIRE(g.values[0] == 0.0);
            b1.push_back(g.values[1]);
            b2.push_back(g.values[2]);
            b5.push_back(g.values[5]);
        }
        CHECK(sample_variance(b1) == doctest::Approx(1.0).epsilon(0.02));
        double cov = 0;
        for (std::size_t i = 0; i < b2.size(); ++i)
            cov += b2[i] * b5[i];
        cov /= double(b2.size());
        CHECK(std::abs(cov - 2.0) <= 0.05);
        const double m = mean(b5);
        CHECK(std::abs(m) <= 3 * std::sqrt(5.0 / 1e5));
    }

    TEST_CASE("brownian motion budget and validation")
    {
        Rng rng(1);
        CHECK(simulate_bm(2.0, 1.0, rng).values.size() == 3);
        CHECK_THROWS_AS(simulate_bm(1e12, 1e-3, rng), ResourceError);
        CHECK_THROWS_AS(simulate_bm(1.0, 0.0, rng), InputError);
        CHECK_THROWS_AS(simulate_bm(0.5, 1.0, rng), InputError);
    }

    TEST_CASE("ou autocorrelation and variance")
    {
        Rng rng(8, Stream::ou, 0);
        const auto g = simulate_ou(2.5e6, 0.25, rng);
        const auto& v = g.values;
        double s = 0, s2 = 0, lag = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += v[i];
            s2 += v[i] * v[i];
            if (i + 1 < v.size())
                lag += v[i] * v[i + 1];
        }
        const double n = double(v.size());
        const double var = s2 / n - (s / n) * (s / n);
        CHECK(std::abs(var - 1.0) <= 0.005);
        CHECK(std::abs(lag / (n - 1) / var - std::exp(-0.125)) <= 0.001);
    }

    TEST_CASE("spectral density integrates to the variance")
    {
        for (double t : {0.5, 1.0, std::numbers::pi}) {
            const double half = oracle::integrate(
                [&](double xi) { return linear_she_spectral_density(t, xi); }, 0.0, 400.0, 800000);
            CHECK(2 * half == doctest::Approx(std::sqrt(t / std::numbers::pi)).epsilon(2e-3));
            CHECK(linear_she_covariance(t, 0.0) == doctest::Approx(std::sqrt(t / std::numbers::pi)));
            for (double x : {0.3, 1.0, 2.5}) {
                const double ft = 2 * oracle::integrate(
                    [&](double xi) { return linear_she_spectral_density(t, xi) * std::cos(xi * x); },
                    0.0, 400.0, 800000);
                CHECK(ft == doctest::Approx(linear_she_covariance(t, x)).epsilon(5e-3));
                const double direct = oracle::integrate(
                    [&](double s) {
                        return std::exp(-x * x / (4 * s)) / std::sqrt(4 * std::numbers::pi * s);
                    },
                    0.0, t, 200000);
                CHECK(direct == doctest::Approx(linear_she_covariance(t, x)).epsilon(1e-4));
            }
        }
    }

    TEST_CASE("linear SHE sampler variance and covariance")
    {
        const double t = std::numbers::pi;
        const LinearSheSampler s(t, 2500.0, 0.25);
        CHECK(s.clipped_ratio() < 1e-6);
        std::vector<double> lags{0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0};
        std::vector<double> acc(lags.size(), 0.0);
        double s2 = 0, n = 0, pairs = 0;
        for (std::uint64_t r = 0; r < 16; ++r) {
            Rng rng(12, Stream::linear_she, r);
            const auto [a, b] = s.sample_pair(rng);
            for (const auto* f : {&a, &b}) {
                const auto& v = f->values;
                for (double x : v)
                    s2 += x * x;
                n += double(v.size());
                for (std::size_t k = 0; k < lags.size(); ++k) {
                    const auto l = std::size_t(std::lround(lags[k] / 0.25));
                    for (std::size_t i = 0; i + l < v.size(); ++i)
                        acc[k] += v[i] * v[i + l];
                }
                pairs += double(v.size());
            }
        }
        CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const double c = acc[k] / pairs;
            const double want = linear_she_covariance(t, lags[k]);
            CHECK(std::abs(c - want) <= 0.02 * linear_she_covariance(t, 0.0));
        }
        CHECK_THROWS_AS(LinearSheSampler(0.0, 10.0, 0.25), InputError);
    }

    TEST_CASE("windowed sampler variance bounds")
    {
        WindowedSheSpec w;
        w.t = 1.0;
        w.x = {0.0, 20.0};
        for (double B : {4.0, 8.0, 12.0}) {
            w.B = B;
            const WindowedSheSampler s(w);
            for (std::size_t i = 0; i < w.x.size(); ++i) {
                CHECK(s.var_difference()[i] <= std::sqrt(8 / std::numbers::pi) * std::exp(-B / 2) + 1e-3);
                CHECK(s.var_full()[i] == doctest::Approx(1 / std::sqrt(std::numbers::pi)).epsilon(0.02));
            }
        }
        w.B = 8;
        const WindowedSheSampler s(w);
        Rng a(3), b(3);
        CHECK(s.sample(a).full == s.sample(b).full);
    }

    TEST_CASE("she with zero sigma stays at one")
    {
        SheSpec s;
        s.sigma = parse_sigma("zero");
        s.t_end = 0.5;
        s.x_max = 16;
        for (auto scheme : {Scheme::explicit_euler, Scheme::exp_multiplicative}) {
            s.scheme = scheme;
            Rng rng(1);
            const auto r = solve_she_1d(s, rng);
            for (double v : r.snapshots.back().values)
                REQUIRE(v == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("she mean, positivity and determinism")
    {
        SheSpec s;
        s.t_end = 0.5;
        s.x_max = 256;
        std::vector<double> means;
        for (std::uint64_t r = 0; r < 40; ++r) {
            Rng rng(2, Stream::she_1d, r);
            const auto res = solve_she_1d(s, rng);
            for (double v : res.snapshots.back().values)
                REQUIRE(v > 0);
            means.push_back(mean(res.snapshots.back().values));
        }
        const double m = mean(means);
        CHECK(std::abs(m - 1) <= 4 * std::sqrt(sample_variance(means) / 40) + 1e-3);
        Rng a(5), b(5);
        CHECK(solve_she_1d(s, a).snapshots.back().values == solve_she_1d(s, b).snapshots.back().values);
    }

    TEST_CASE("she validation")
    {
        SheSpec s;
        s.dt = 0.1;
        s.dx = 0.25;
        CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("0.03125"), InputError);
        CHECK_THROWS_AS(parse_sigma("table:-1:1;0:0.5;1:1"), InputError);
        CHECK_THROWS_AS(parse_sigma("cubic"), InputError);
        CHECK_THROWS_AS(parse_sigma("clipped_linear:ell=2,L=1"), InputError);
    }

    TEST_CASE("sigma families")
    {
        const auto c = parse_sigma("clipped_linear:ell=0.8,L=1.2");
        CHECK(c(0.0) == 0.0);
        CHECK(c.ell_sigma() == doctest::Approx(0.8));
        CHECK(c.L_sigma() == doctest::Approx(1.2));
        CHECK(c(0.5) == doctest::Approx(0.4));
        CHECK(c(1.0) == doctest::Approx(1.0));
        CHECK(c(-3.0) == doctest::Approx(-3.6));
        const auto l = parse_sigma("linear:c=2");
        CHECK(l(1.5) == 3.0);
        CHECK(l.rate(0.0) == 2.0);
        const auto t = parse_sigma("table:-1:-1;0:0;2:1");
        CHECK(t(1.0) == doctest::Approx(0.5));
        CHECK(t(4.0) == doctest::Approx(2.0));
        CHECK(t.ell_sigma() == doctest::Approx(0.5));
        CHECK(t.L_sigma() == doctest::Approx(1.0));
    }

    TEST_CASE("colored noise normalization")
    {
        ColoredSpec c;
        c.d = 2;
        c.dx = 0.25;
        c.extent = 16;
        const ColoredPam pam(c);
        CHECK(c.bump.f0(2) == doctest::Approx(std::numbers::pi));
        CHECK(pam.f0_discrete() == doctest::Approx(std::numbers::pi).epsilon(0.01));
        const std::size_t n = pam.nx();
        std::vector<double> acc(5, 0.0);
        double count = 0;
        for (std::uint64_t r = 0; r < 200; ++r) {
            Rng rng(4, Stream::pam_colored, r);
            const auto z = pam.noise_field(rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t l = 0; l < 5; ++l)
                        acc[l] += z[i * n + j] * z[i * n + (j + 2 * l) % n];
            count += double(n * n);
        }
        const double scale = acc[0] / count / pam.f0_discrete();
        for (std::size_t l = 0; l < 5; ++l) {
            const double x = 0.25 * double(2 * l);
            const double want = c.bump.f(x * x, 2) / c.bump.f0(2);
            CHECK(std::abs(acc[l] / count / pam.f0_discrete() / scale - want) <= 0.03);
        }
        CHECK_THROWS_AS(parse_bump("box:A=1"), InputError);
        CHECK_THROWS_AS(parse_bump("gaussian:A=-1"), InputError);
    }

    TEST_CASE("colored PAM mean")
    {
        ColoredSpec c;
        c.d = 1;
        c.extent = 32;
        c.t_end = 0.25;
        const ColoredPam pam(c);
        std::vector<double> m;
        for (std::uint64_t r = 0; r < 40; ++r) {
            Rng rng(6, Stream::pam_colored, r);
            const auto res = pam.solve(rng);
            m.push_back(mean(res.snapshots.back().values));
        }
        CHECK(std::abs(mean(m) - 1) <= 4 * std::sqrt(sample_variance(m) / 40) + 1e-3);
    }

    TEST_CASE("derived streams do not collide")
    {
        std::set<std::uint64_t> seen;
        for (std::uint64_t r = 0; r < 10000; ++r)
            for (auto s : {Stream::bm, Stream::ou, Stream::she_1d})
                seen.insert(derive_seed(42, s, r));
        CHECK(seen.size() == 30000);
    }
}

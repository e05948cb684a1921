#include "macrodim/cover.hpp"
#include "macrodim/macro_dimension.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace macrodim;

namespace {

PixelSet from_cells(const std::vector<std::int64_t>& cells)
{
    PixelSetBuilder b;
    for (auto z : cells)
        b.add_cell(z);
    return b.build();
}

std::vector<std::int64_t> random_cells(std::mt19937_64& eng, int n, std::size_t m)
{
    const auto range = shell_cell_range(n, 1.0);
    std::uniform_int_distribution<std::int64_t> u(range.lo, range.hi);
    std::vector<std::int64_t> v;
    while (v.size() < m) {
        v.push_back(u(eng));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return v;
}

FixtureSpec fixture(FixtureKind k, double theta = 0.5)
{
    FixtureSpec f;
    f.kind = k;
    f.theta = theta;
    return f;
}

}  // namespace

TEST_SUITE("dimension")
{
    TEST_CASE("shell content examples")
    {
        const auto p = from_cells({100, 103});
        const auto a = shell_content(p, 5, 1.0);
        CHECK(a.cost == doctest::Approx(2 * std::exp(-5.0)).epsilon(1e-12));
        CHECK(a.boxes.size() == 2);
        CHECK(a.exactness == Exactness::exact);
        const auto b = shell_content(p, 5, 0.5);
        CHECK(b.cost == doctest::Approx(std::sqrt(4 * std::exp(-5.0))).epsilon(1e-12));
        CHECK(b.boxes.size() == 1);
        CHECK(b.boxes[0].side == 4.0);
        CHECK(shell_content(p, 6, 1.0).cost == 0.0);
        CHECK(shell_content(p, 6, 1.0).boxes.empty());
    }

    TEST_CASE("full shell is one box")
    {
        const auto p = fixture_set(fixture(FixtureKind::naturals), 0, 12);
        for (double rho : {0.3, 0.7, 1.0}) {
            const auto c = shell_content(p, 9, rho);
            CHECK(c.box_count == 1);
            CHECK(c.cost == doctest::Approx(std::pow(double(p.count(9)) / std::exp(9.0), rho)));
            CHECK(c.cost == doctest::Approx(std::pow(1 - std::exp(-1.0), rho)).epsilon(1e-3));
        }
    }

    TEST_CASE("content matches exhaustive enumeration")
    {
        std::mt19937_64 eng(3);
        for (int trial = 0; trial < 200; ++trial) {
            const auto cells = random_cells(eng, 4, 1 + trial % 12);
            const auto p = from_cells(cells);
            for (double rho : {0.2, 0.5, 0.9, 1.0, 1.4})
                for (double c0 : {1.0, 2.0})
                    REQUIRE(shell_content_value(p, 4, rho, c0) ==
                            doctest::Approx(oracle::cover_cost(cells, 4, rho, c0)).epsilon(1e-12));
        }
    }

    TEST_CASE("fast cover equals the reference program")
    {
        std::mt19937_64 eng(9);
        std::uniform_real_distribution<double> gap(0.0, 5.0), len(1.0, 4.0);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<Segment> segs;
            double x = 0;
            for (int i = 0; i < 40; ++i) {
                x += gap(eng);
                const double l = len(eng);
                segs.push_back({x, x + l});
                x += l;
            }
            for (double rho : {0.1, 0.5, 0.95}) {
                REQUIRE(fast_cover_applies(segs, rho, 1.0));
                const auto a = cover_fast(segs, rho, 1.0);
                const auto b = cover_reference(segs, rho, 1.0);
                REQUIRE(a.cost == doctest::Approx(b.cost).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("covers are valid")
    {
        std::mt19937_64 eng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const auto cells = random_cells(eng, 6, 30);
            const auto p = from_cells(cells);
            const auto c = shell_content(p, 6, 0.6);
            double cost = 0;
            for (const auto& b : c.boxes) {
                CHECK(b.side >= 1.0);
                cost += std::pow(b.side / std::exp(6.0), 0.6);
            }
            CHECK(cost == doctest::Approx(c.cost));
            for (auto z : cells)
                CHECK(std::any_of(c.boxes.begin(), c.boxes.end(),
                                  [&](const UprightBox& b) { return b.meets_cell(z, 1.0); }));
        }
    }

    TEST_CASE("content is monotone in rho and subadditive")
    {
        std::mt19937_64 eng(4);
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = random_cells(eng, 5, 10), b = random_cells(eng, 5, 10);
            std::vector<std::int64_t> ab = a;
            ab.insert(ab.end(), b.begin(), b.end());
            std::sort(ab.begin(), ab.end());
            ab.erase(std::unique(ab.begin(), ab.end()), ab.end());
            const auto pa = from_cells(a), pb = from_cells(b), pab = from_cells(ab);
            double prev = INFINITY;
            for (double rho = 0.1; rho <= 1.0; rho += 0.1) {
                const double c = shell_content_value(pab, 5, rho);
                CHECK(c <= prev + 1e-12);
                prev = c;
                CHECK(c <= shell_content_value(pa, 5, rho) + shell_content_value(pb, 5, rho) + 1e-12);
            }
        }
    }

    TEST_CASE("two dimensional content is an upper bound")
    {
        PixelSetBuilder b(2);
        for (std::int64_t i = 10; i < 18; ++i)
            for (std::int64_t j = 10; j < 18; ++j)
                b.add_cell(Cell2{i, j});
        const auto p = b.build();
        const auto c = shell_content(p, 3, 1.0);
        CHECK(c.exactness == Exactness::upper_bound);
        CHECK(c.cost <= 64 * std::exp(-3.0) + 1e-12);
        CHECK(c.cost >= 8 * std::exp(-3.0) - 1e-12);
    }

    TEST_CASE("frostman examples and bound")
    {
        const int n = 6;
        const auto range = shell_cell_range(n, 1.0);
        std::vector<std::pair<std::int64_t, double>> leb;
        for (auto z = range.lo; z <= range.hi; ++z)
            leb.push_back({z, 1.0});
        const auto f = frostman_bound(n, leb, 1.0);
        CHECK(f.k_valid == doctest::Approx(1.0));
        CHECK(f.bound == doctest::Approx(double(leb.size()) * std::exp(-6.0)));
        CHECK(f.bound == doctest::Approx(1 - std::exp(-1.0)).epsilon(0.01));

        const std::vector<std::pair<std::int64_t, double>> one{{300, 2.5}};
        CHECK(frostman_bound(n, one, 1.0).bound == doctest::Approx(std::exp(-6.0)));
        CHECK_THROWS(frostman_bound(n, std::vector<std::pair<std::int64_t, double>>{{300, 0.0}}, 1.0));

        std::mt19937_64 eng(17);
        std::uniform_real_distribution<double> w(0.1, 2.0);
        int violations = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto cells = random_cells(eng, n, 1 + trial % 40);
            std::vector<std::pair<std::int64_t, double>> mu;
            for (auto z : cells)
                mu.push_back({z, w(eng)});
            const auto p = from_cells(cells);
            for (double rho : {0.3, 0.6, 1.0})
                if (frostman_bound(n, mu, rho).bound > shell_content_value(p, n, rho) * (1 + 1e-12))
                    ++violations;
        }
        CHECK(violations == 0);
    }

    TEST_CASE("fixture dimensions")
    {
        const auto nat = fixture_set(fixture(FixtureKind::naturals), 5, 30);
        const auto ex = fixture_set(fixture(FixtureKind::exp_naturals), 5, 30);
        CHECK(dimh_estimate(nat, 5, 30).value == doctest::Approx(1.0).epsilon(0.05));
        CHECK(std::abs(dimh_estimate(ex, 5, 30).value) <= 0.05);
        CHECK(dimm_estimate(nat, 5, 30).value == doctest::Approx(1.0).epsilon(0.03));
        CHECK(std::abs(dimm_estimate(ex, 5, 30).value) <= 0.05);
        const auto sk = fixture_set(fixture(FixtureKind::skeleton, 0.5), 5, 22);
        const double h = dimh_estimate(sk, 5, 22).value;
        const double m = dimm_estimate(sk, 5, 22).value;
        CHECK(std::abs(h - 0.5) <= 0.1);
        CHECK(std::abs(m - 0.5) <= 0.05);
        CHECK(m >= h - 0.05);
    }

    TEST_CASE("fixture cells")
    {
        const auto nat = fixture_set(fixture(FixtureKind::naturals), 0, 10);
        CHECK(nat.total_count() == std::int64_t(std::floor(std::exp(10.0))));
        CHECK(nat.contains(1));
        CHECK_FALSE(nat.contains(0));
        const auto ex = fixture_set(fixture(FixtureKind::exp_naturals), 0, 10);
        std::vector<std::int64_t> all;
        for (const auto& [n, sc] : ex.shells())
            for (auto z : ex.cells(n))
                all.push_back(z);
        CHECK(all == oracle::exp_cells(2, std::int64_t(std::exp(10.0))));
        CHECK_THROWS_AS(parse_fixture_kind("cantor"), InputError);
    }

    TEST_CASE("c0 and bi-Lipschitz invariance")
    {
        for (auto k : {FixtureKind::naturals, FixtureKind::exp_naturals}) {
            const auto p = fixture_set(fixture(k), 5, 30);
            const double base = dimh_estimate(p, 5, 30).value;
            EstimatorOptions two;
            two.c0 = 2.0;
            CHECK(std::abs(dimh_estimate(p, 5, 30, two).value - base) <= 0.05);
            for (double q : {2.0, 3.0})
                for (double s : {0.0, 5.0}) {
                    FixtureSpec a;
                    a.kind = FixtureKind::affine_image;
                    a.base = k;
                    a.q = q;
                    a.s = s;
                    const auto img = fixture_set(a, 5, 30);
                    CHECK(std::abs(dimh_estimate(img, 5, 30).value - base) <= 0.05);
                }
        }
    }

    TEST_CASE("bounded sentinel and insufficient data")
    {
        const auto early = fixture_set(fixture(FixtureKind::naturals), 0, 8);
        const auto e = dimh_estimate(early, 3, 20);
        CHECK(e.bounded);
        CHECK(e.value == kBoundedSentinel);
        CHECK(dimm_estimate(early, 3, 20).bounded);
        CHECK(dimh_estimate(PixelSet{}, 3, 20).bounded);
        const auto few = from_cells({std::int64_t(std::exp(18.5)), std::int64_t(std::exp(19.5))});
        CHECK_THROWS_AS(dimh_estimate(few, 3, 20), InsufficientData);
        CHECK_THROWS_AS(dimm_estimate(few, 3, 20), InsufficientData);
    }

    TEST_CASE("lower dimension does not exceed the dimension")
    {
        const auto sk = fixture_set(fixture(FixtureKind::skeleton, 0.25), 5, 20);
        const auto full = dimh_estimate(PixelSource(sk), 5, 20);
        const auto low = ldimh_estimate(PixelSource(sk), 5, 20);
        CHECK(low.method == Method::lower_hausdorff);
        CHECK(low.value <= full.value + 1e-12);
        CHECK(std::abs(low.value - 0.75) <= 0.1);
    }

    TEST_CASE("upper density")
    {
        const auto nat = fixture_set(fixture(FixtureKind::naturals), 0, 12);
        std::vector<double> windows;
        for (int k = 8; k <= 40; ++k)
            windows.push_back(std::exp(k / 4.0));
        const auto full = upper_density(nat, windows, DensityDomain::positive);
        CHECK(full.value == doctest::Approx(1.0).epsilon(0.01));
        CHECK(full.ratios.size() == windows.size());
        CHECK(full.windows == windows);
        const auto ex = fixture_set(fixture(FixtureKind::exp_naturals), 0, 12);
        const auto sparse = upper_density(ex, windows, DensityDomain::positive);
        CHECK(sparse.ratios.back() < 0.01);
        CHECK(sparse.ratios.back() < sparse.ratios.front());
        CHECK(dimh_estimate(nat, 3, 12).value >= 0.9);
        const std::vector<double> bad{3.0, 2.0};
        CHECK_THROWS_AS(upper_density(nat, bad), InputError);
    }

    TEST_CASE("normalized segments agree with pixels")
    {
        const auto nat = fixture_set(fixture(FixtureKind::naturals), 0, 14);
        NormalizedSegments segs;
        for (int n = 1; n <= 14; ++n) {
            const auto r = shell_cell_range(n, 1.0);
            segs.add(n, double(r.lo) * std::exp(-double(n)), double(r.hi + 1) * std::exp(-double(n)));
        }
        segs.finalize();
        for (int n = 4; n <= 14; ++n)
            for (double rho : {0.4, 1.0})
                CHECK(segs.content(n, rho, 1.0) ==
                      doctest::Approx(PixelSource(nat).content(n, rho, 1.0)).epsilon(1e-9));
        CHECK(dimh_estimate(segs, 4, 14).value == doctest::Approx(1.0).epsilon(0.05));
    }

    TEST_CASE("rho grid")
    {
        const auto g = rho_grid(2, 0.025);
        CHECK(g.size() == 81);
        CHECK(g.front() == 0.0);
        CHECK(g.back() == 2.0);
        CHECK_THROWS(rho_grid(1, 0.0));
    }
}

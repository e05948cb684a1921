#include "macrodim/shell_geometry.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

using namespace macrodim;

TEST_SUITE("shell_geometry")
{
    TEST_CASE("shell_of examples")
    {
        CHECK(shell_of(0.3) == 0);
        CHECK(shell_of(12.0) == 3);
        CHECK(shell_of(Point{5.0, 60.0}, 2) == 5);
        CHECK(shell_of(-1.0) == 0);
        CHECK(shell_of(1.0) == 1);
        CHECK_THROWS_AS(shell_of(std::numeric_limits<double>::quiet_NaN()), InputError);
        CHECK_THROWS_AS(shell_of(INFINITY), InputError);
    }

    TEST_CASE("shell_of agrees with interval arithmetic")
    {
        std::mt19937_64 eng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> e(0.0, 20.0);
        for (int i = 0; i < 100000; ++i) {
            const double x = u(eng) * std::exp(e(eng));
            REQUIRE(shell_of(x) == oracle::shell_of(x));
        }
    }

    TEST_CASE("pixelize examples")
    {
        Geometry g;
        g.points = {{2.1, 0}, {2.9, 0}};
        auto p = pixelize(g, 1.0);
        CHECK(p.total_count() == 1);
        CHECK(p.contains(2));
        CHECK(p.count(1) == 1);

        Geometry iv;
        iv.closed = {Rect{{7.2, 0}, {8.3, 0}}};
        p = pixelize(iv, 1.0);
        CHECK(p.cells(2) == std::vector<std::int64_t>{7});
        CHECK(p.cells(3) == std::vector<std::int64_t>{8});

        Geometry pt;
        const double x = std::exp(3.0) + 0.5;
        pt.points = {{x, 0}};
        p = pixelize(pt, 0.5);
        CHECK(p.contains(oracle::cell_of(x, 0.5)));
        CHECK(p.contains(41));

        CHECK(pixelize(Geometry{}, 1.0).empty());
    }

    TEST_CASE("pixelization is idempotent")
    {
        std::mt19937_64 eng(5);
        std::uniform_real_distribution<double> u(0.0, 500.0);
        for (int d = 1; d <= 2; ++d) {
            Geometry g;
            g.d = d;
            for (int i = 0; i < 300; ++i)
                g.points.push_back({u(eng), d == 2 ? u(eng) : 0.0});
            for (double r : {1.0, 0.5, 2.0}) {
                const auto p = pixelize(g, r);
                CHECK(pixelize(cells_as_boxes(p), r) == p);
            }
        }
    }

    TEST_CASE("cells belong to the shell of their corner")
    {
        Geometry g;
        g.closed = {Rect{{0.0, 0}, {400.0, 0}}};
        const auto p = pixelize(g, 1.0);
        for (const auto& [n, sc] : p.shells())
            for (auto z : p.cells(n))
                CHECK(shell_of(double(z)) == n);
    }

    TEST_CASE("skeleton packing and cardinality")
    {
        for (double theta : {0.25, 0.5, 0.75}) {
            const auto sk = build_skeleton(theta, 30);
            CHECK(sk.a > 0);
            CHECK(sk.a < 1);
            for (int n = sk.start_shell; n <= 18; ++n) {
                const auto pr = sk.axis(n);
                const double side = sk.box_side(n);
                CHECK(double(pr.first) >= std::exp(double(n - 1)));
                CHECK(double(pr.last()) + side <= std::exp(double(n)) + 1e-9);
                CHECK(double(pr.step) >= side);
                const double target = std::exp(double(n) * (1 - theta));
                CHECK(double(sk.count(n)) >= sk.a * target);
                CHECK(double(sk.count(n)) <= target / sk.a);
            }
            const double rate = std::log(double(sk.count(30))) / 30.0;
            CHECK(std::abs(rate - (1 - theta)) <= 0.05);
        }
        const auto s2 = build_skeleton(0.5, 10, 2);
        const auto s1 = build_skeleton(0.5, 10, 1);
        CHECK(s2.count(6) == s1.count(6) * s1.count(6));
        CHECK_THROWS_AS(build_skeleton(1.0, 10), InputError);
        CHECK_THROWS_AS(build_skeleton(0.0, 10), InputError);
    }

    TEST_CASE("skeleton boxes are pairwise disjoint")
    {
        const auto sk = build_skeleton(0.5, 12, 2);
        for (int n = sk.start_shell; n <= 8; ++n) {
            const auto pts = sk.points(n);
            const double side = sk.box_side(n);
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j)
                    REQUIRE(std::max(std::abs(pts[i][0] - pts[j][0]),
                                     std::abs(pts[i][1] - pts[j][1])) >= side);
        }
    }

    TEST_CASE("theta thickness")
    {
        const auto sk = build_skeleton(0.5, 12);
        CHECK(is_theta_thick([](const UprightBox&) { return true; }, sk, sk.start_shell, 12).thick);

        PixelSetBuilder own;
        for (int n = sk.start_shell; n <= 12; ++n)
            for (const auto& x : sk.points(n))
                own.add_cell(std::int64_t(x[0]));
        CHECK(is_theta_thick(own.build(), sk, sk.start_shell, 12).thick);

        PixelSetBuilder ex;
        for (auto z : oracle::exp_cells(0, 1'000'000))
            ex.add_cell(z);
        const auto lo = std::max(6, sk.start_shell);
        const auto r = is_theta_thick(ex.build(), sk, lo, 10);
        CHECK_FALSE(r.thick);
        CHECK(r.fail_shell == lo);
        CHECK_THROWS_AS(is_theta_thick(ex.build(), sk, lo, 13), InputError);
    }

    TEST_CASE("pixel csv round trip")
    {
        Geometry g;
        g.d = 2;
        g.points = {{1.5, 2.5}, {30.0, -4.0}, {-100.0, 7.0}};
        const auto p = pixelize(g, 0.5);
        std::stringstream ss;
        write_pixels_csv(ss, p);
        CHECK(ss.str().rfind("# resolution=0.5 d=2", 0) == 0);
        CHECK(read_pixels_csv(ss) == p);
    }
}

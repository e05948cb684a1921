// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]; no arguments runs all eight.

#include "macrodim/exceedance.hpp"
#include "macrodim/macro_dimension.hpp"
#include "macrodim/moments_lab.hpp"
#include "macrodim/rng.hpp"
#include "macrodim/simulators.hpp"
#include "macrodim/spectrum_lab.hpp"
#include "macrodim/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace macrodim;

namespace {

// Tolerances.
constexpr double kTolCalibExact = 0.05;    // N, exp N, Minkowski
constexpr double kTolCalibSkeleton = 0.1;  // skeleton Hausdorff
constexpr double kTolInvariance = 0.05;
constexpr double kTolOu = 0.15;
constexpr double kOuBoundedShare = 0.9;
constexpr double kTolBm = 0.1;
constexpr double kStrassen09 = 0.609;
constexpr double kTolStrassen = 0.05;
constexpr double kTolContrast = 0.2;
constexpr double kTolSheVar = 0.02;
constexpr double kTolSheSlopeRel = 0.10;
constexpr double kTolSheSpectrum = 0.15;
constexpr double kTolCrossCorr = 0.05;
constexpr double kQuadratureFloor = 1e-3;
constexpr double kKardar2 = 0.25;
constexpr double kTolKardarRel = 0.30;
constexpr double kIntermittentShare = 0.9;
constexpr double kOrderWindow[2] = {0.2, 1.0};    // k = 2, 3, 4 ordering
constexpr double kKardarWindow[2] = {2.5, 6.0};  // lambda(2) level
constexpr double kTailLo = 1.2, kTailHi = 1.8;
constexpr double kTolPam = 0.2;
constexpr double kRootLo = 0.5, kRootHi = 0.8;
constexpr double kTolFkFd = 0.15;
constexpr double kTolConstantOracle = 1e-12;
constexpr double kPickandsLo = 0.8, kPickandsHi = 1.25;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string f3(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", x);
    return b;
}

std::string g3(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

double dimh_of(const PixelSet& p, int lo, int hi, double c0 = 1.0)
{
    EstimatorOptions o;
    o.c0 = c0;
    return dimh_estimate(p, lo, hi, o).value;
}

PixelSet fixture(FixtureKind k, double theta = 0.5, int lo = 0, int hi = 30)
{
    FixtureSpec f;
    f.kind = k;
    f.theta = theta;
    return fixture_set(f, lo, hi);
}

// 1. Estimator calibration on analytic fixtures, shells [5, 30].
Outcome criterion1()
{
    Outcome o;
    const int lo = 5, hi = 30;
    const auto nat = fixture(FixtureKind::naturals);
    const auto expn = fixture(FixtureKind::exp_naturals);
    const double hn = dimh_of(nat, lo, hi), he = dimh_of(expn, lo, hi);
    const double mn = dimm_estimate(nat, lo, hi).value, me = dimm_estimate(expn, lo, hi).value;
    o.check(std::abs(hn - 1) <= kTolCalibExact, "H(N)=" + f3(hn));
    o.check(std::abs(he) <= kTolCalibExact, "H(expN)=" + f3(he));
    o.check(std::abs(mn - 1) <= kTolCalibExact, "M(N)=" + f3(mn));
    o.check(std::abs(me) <= kTolCalibExact, "M(expN)=" + f3(me));
    for (double theta : {0.25, 0.5, 0.75}) {
        const auto sk = fixture(FixtureKind::skeleton, theta);
        // oracle: thickness gives the lower bound 1 - theta, the unit cover of the
        // anchors gives log|Pi_n|/n as an upper bound
        const auto skel = build_skeleton(theta, hi);
        const int t_lo = std::max(lo, skel.start_shell);
        int t_hi = t_lo;
        for (std::int64_t used = 0; t_hi < hi && used + skel.count(t_hi + 1) < 200000;)
            used += skel.count(++t_hi);
        const bool thick = is_theta_thick(sk, skel, t_lo, t_hi).thick;
        const double upper = std::log(double(skel.count(hi))) / double(hi);
        const double target = 1 - theta;
        const double h = dimh_of(sk, lo, hi), m = dimm_estimate(sk, lo, hi).value;
        o.check(thick && upper >= target - kTolCalibSkeleton,
                "oracle[" + f3(theta) + "]=[" + f3(target) + "," + f3(upper) + "]");
        o.check(std::abs(h - target) <= kTolCalibSkeleton, "H(sk" + f3(theta) + ")=" + f3(h));
        o.check(std::abs(m - target) <= kTolCalibExact, "M(sk" + f3(theta) + ")=" + f3(m));
    }
    return o;
}

// 2. c0 agreement, affine invariance, Frostman bound against exact content.
Outcome criterion2()
{
    Outcome o;
    const int lo = 5, hi = 30;
    double worst_c0 = 0.0, worst_affine = 0.0;
    for (auto [k, theta] : {std::pair{FixtureKind::naturals, 0.5},
                            std::pair{FixtureKind::exp_naturals, 0.5},
                            std::pair{FixtureKind::skeleton, 0.5}}) {
        const auto p = fixture(k, theta);
        worst_c0 = std::max(worst_c0, std::abs(dimh_of(p, lo, hi, 1.0) - dimh_of(p, lo, hi, 2.0)));
    }
    for (auto [k, q, s] : {std::tuple{FixtureKind::naturals, 2.0, 5.0},
                           std::tuple{FixtureKind::naturals, 3.0, -7.0},
                           std::tuple{FixtureKind::skeleton, 2.0, 5.0}}) {
        FixtureSpec f;
        f.kind = FixtureKind::affine_image;
        f.base = k;
        f.base_theta = 0.5;
        f.q = q;
        f.s = s;
        const auto img = fixture_set(f, 0, hi);
        const double base = dimh_of(fixture(k, 0.5), lo, hi);
        worst_affine = std::max(worst_affine, std::abs(dimh_of(img, lo, hi) - base));
    }
    o.check(worst_c0 <= kTolInvariance, "max|c0=1 - c0=2|=" + f3(worst_c0));
    o.check(worst_affine <= kTolInvariance, "max|affine - base|=" + f3(worst_affine));

    Rng rng(2024, Stream::random_sets, 0);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + int(rng.uniform() * 4);
        const auto range = shell_cell_range(n, 1.0);
        const std::int64_t span = range.hi - range.lo + 1;
        const int m = 1 + int(rng.uniform() * double(std::min<std::int64_t>(span, 60)));
        std::set<std::int64_t> cells;
        while (int(cells.size()) < m)
            cells.insert(range.lo + std::int64_t(rng.uniform() * double(span)));
        PixelSetBuilder b;
        std::vector<std::pair<std::int64_t, double>> mu;
        for (auto z : cells) {
            b.add_cell(z);
            mu.emplace_back(z, 0.1 + rng.uniform());
        }
        const auto p = b.build();
        const double rho = rng.uniform();
        const double content = shell_content(p, n, rho).cost;
        const double bound = frostman_bound(n, mu, rho).bound;
        if (bound > content * (1 + 1e-12))
            ++violations;
    }
    o.check(violations == 0, "frostman violations=" + std::to_string(violations) + "/100");
    return o;
}

SpectrumConfig sweep_config(SpectrumModel m, std::vector<double> gammas, std::size_t replicas,
                            int n_min, int n_max, std::uint64_t seed)
{
    SpectrumConfig c;
    c.model = m;
    c.gammas = std::move(gammas);
    c.replicas = replicas;
    c.n_min = n_min;
    c.n_max = n_max;
    c.seed = seed;
    return c;
}

const GammaRow& row_at(const SpectrumResult& r, double g)
{
    for (const auto& row : r.rows)
        if (std::abs(row.gamma - g) < 1e-12)
            return row;
    throw std::runtime_error("gamma not in sweep");
}

// 3. OU spectrum.
Outcome criterion3()
{
    Outcome o;
    auto c = sweep_config(SpectrumModel::ou, {0.3, 0.5, 0.7, 0.9, 1.5}, 10, 3, 15, 301);
    c.dt = 0.25;
    const auto r = spectrum_sweep(c);
    for (double g : {0.3, 0.5, 0.7, 0.9}) {
        const double d = row_at(r, g).hausdorff.value;
        o.check(std::abs(d - (1 - g * g)) <= kTolOu, "g" + f3(g) + "=" + f3(d));
    }
    const auto& b = row_at(r, 1.5);
    const double share = double(b.bounded) / double(b.replicas);
    o.check(share >= kOuBoundedShare, "bounded(1.5)=" + f3(share));
    return o;
}

// 4. BM: full dimension below the critical level, Strassen density, log/exp contrast.
Outcome criterion4()
{
    Outcome o;
    auto c = sweep_config(SpectrumModel::bm, {0.5, 0.9}, 8, 3, 15, 401);
    c.density = true;
    const auto r = spectrum_sweep(c);
    const double d = row_at(r, 0.5).hausdorff.value;
    o.check(std::abs(d - 1) <= kTolBm, "dim(0.5)=" + f3(d));
    const double dens = row_at(r, 0.9).density;
    o.check(std::abs(dens - kStrassen09) <= kTolStrassen, "density(0.9)=" + f3(dens));
    const auto ct = log_exp_contrast(3, 15, 1.0 / 64, 402);
    const double tv = ct.t_sparse || ct.t_view.bounded ? 0.0 : ct.t_view.value;
    o.check(std::abs(tv) <= kTolContrast,
            "t-view=" + f3(tv) + " over " + std::to_string(ct.t_shells) + " shells");
    o.check(!ct.s_sparse && std::abs(ct.s_view.value - 1) <= kTolContrast,
            "s-view=" + f3(ct.s_view.value) + " over " + std::to_string(ct.s_shells) + " shells");
    return o;
}

// 5. Linear stochastic heat equation.
Outcome criterion5()
{
    Outcome o;
    {
        const double t = std::numbers::pi;
        const LinearSheSampler s(t, 1250.0, 0.25);
        double sum = 0, sum2 = 0, n = 0;
        for (int seed = 0; seed < 32; ++seed) {
            Rng rng(501, Stream::linear_she, std::uint64_t(seed));
            const auto [a, b] = s.sample_pair(rng);
            for (const auto* f : {&a, &b})
                for (double v : f->values) {
                    sum += v;
                    sum2 += v * v;
                    n += 1;
                }
        }
        const double var = sum2 / n - (sum / n) * (sum / n);
        o.check(std::abs(var - 1) <= kTolSheVar, "Var Z_pi(0)=" + f3(var));
    }
    {
        const double t = 1.0, dx = 0.01;
        const LinearSheSampler s(t, 50.0, dx);
        const double c0 = std::sqrt(t / std::numbers::pi);
        double inc2 = 0, n = 0;
        for (int seed = 0; seed < 32; ++seed) {
            Rng rng(502, Stream::linear_she, std::uint64_t(seed));
            const auto [a, b] = s.sample_pair(rng);
            for (const auto* f : {&a, &b})
                for (std::size_t i = 0; i + 1 < f->values.size(); ++i) {
                    const double dz = f->values[i + 1] - f->values[i];
                    inc2 += dz * dz;
                    n += 1;
                }
        }
        const double corr = 1 - inc2 / n / (2 * c0);
        const double slope = (corr - 1) / dx;
        const double want = -0.5 * std::sqrt(std::numbers::pi / t);
        o.check(std::abs(slope / want - 1) <= kTolSheSlopeRel,
                "slope=" + f3(slope) + " vs " + f3(want));
    }
    {
        auto c = sweep_config(SpectrumModel::linear_she, {0.4, 0.7}, 8, 3, 13, 503);
        const auto r = spectrum_sweep(c);
        for (double g : {0.4, 0.7}) {
            const double d = row_at(r, g).hausdorff.value;
            o.check(std::abs(d - (1 - g * g)) <= kTolSheSpectrum, "dim(" + f3(g) + ")=" + f3(d));
        }
    }
    {
        int violations = 0;
        std::string vals;
        for (double B : {4.0, 8.0, 12.0}) {
            WindowedSheSpec w;
            w.t = 1.0;
            w.x = {0.0};
            w.B = B;
            const WindowedSheSampler s(w);
            const double v = s.var_difference()[0];
            const double bound = std::sqrt(8 * w.t / std::numbers::pi) * std::exp(-B / 2);
            if (v > bound + kQuadratureFloor)
                ++violations;
            vals += (vals.empty() ? "" : ",") + g3(v) + "<=" + g3(bound);
        }
        o.check(violations == 0, "coupling " + vals);
    }
    {
        WindowedSheSpec w;
        w.t = 1.0;
        w.B = 8.0;
        const double gap = 2 * std::sqrt(w.B * w.t) + 0.5;
        w.x = {0.0, gap};
        const WindowedSheSampler s(w);
        std::vector<double> a, b;
        for (int i = 0; i < 4000; ++i) {
            Rng rng(504, Stream::she_windowed, std::uint64_t(i));
            const auto smp = s.sample(rng);
            a.push_back(smp.windowed[0]);
            b.push_back(smp.windowed[1]);
        }
        const double ma = mean(a), mb = mean(b);
        double sab = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            sab += (a[i] - ma) * (b[i] - mb);
        sab /= double(a.size() - 1);
        const double corr = sab / std::sqrt(sample_variance(a) * sample_variance(b));
        o.check(std::abs(corr) <= kTolCrossCorr, "cross-window corr=" + f3(corr));
    }
    return o;
}

// 6. White-noise PAM substitutes.
Outcome criterion6()
{
    Outcome o;
    {
        MomentConfig mc;
        mc.model = MomentModel::she_1d;
        mc.she.sigma = SigmaSpec{};
        mc.she.scheme = Scheme::exp_multiplicative;
        mc.she.x_max = 16;
        const std::vector<double> ks{2, 3, 4};
        std::vector<double> ts;
        for (int i = 2; i <= 10; ++i)
            ts.push_back(0.1 * i);
        for (double t = 2.5; t <= 6.0 + 1e-9; t += 0.5)
            ts.push_back(t);
        const int reps = 10;
        int increasing = 0;
        std::vector<double> lam2;
        for (int rep = 0; rep < reps; ++rep) {
            const auto table = moment_ensemble(mc, ks, ts, 400, 600 + std::uint64_t(rep));
            std::vector<LyapunovFit> fits;
            for (double k : ks)
                fits.push_back(lyapunov_fit(table, k, kOrderWindow[0], kOrderWindow[1]));
            lam2.push_back(lyapunov_fit(table, 2, kKardarWindow[0], kKardarWindow[1]).slope);
            if (intermittency_check(fits).verdict == Verdict3::intermittent)
                ++increasing;
        }
        const double l2 = mean(lam2);
        o.check(std::abs(l2 / kKardar2 - 1) <= kTolKardarRel, "lambda(2)=" + f3(l2));
        const double share = double(increasing) / reps;
        o.check(share >= kIntermittentShare, "increasing share=" + f3(share));
    }
    {
        SheSpec s;
        s.sigma = SigmaSpec{};
        s.scheme = Scheme::exp_multiplicative;
        s.t_end = 1.0;
        s.x_max = 4096;
        std::vector<double> h;
        for (std::uint64_t r = 0; r < 8; ++r) {
            Rng rng(610, Stream::she_1d, r);
            const auto res = solve_she_1d(s, rng);
            for (double v : res.snapshots.back().values)
                h.push_back(std::log(v));
        }
        std::vector<double> sorted = h;
        std::sort(sorted.begin(), sorted.end());
        const double z_lo = std::max(sorted[std::size_t(0.9 * double(sorted.size()))], 0.05);
        const auto fit = tail_exponent_fit(h, std::nullopt, z_lo);
        o.check(fit.b >= kTailLo && fit.b <= kTailHi, "tail b=" + f3(fit.b));
    }
    {
        auto c = sweep_config(SpectrumModel::pam_exact, {0.2, 0.3, 0.45}, 8, 3, 12, 620);
        const auto r = spectrum_sweep(c);
        std::vector<double> d, g32;
        bool within = true;
        std::string vals;
        for (const auto& row : r.rows) {
            d.push_back(row.hausdorff.value);
            g32.push_back(std::pow(row.gamma, 1.5));
            within = within && std::abs(row.hausdorff.value - row.theory.lo) <= kTolPam;
            vals += (vals.empty() ? "" : ",") + f3(row.hausdorff.value);
        }
        const bool monotone = d[0] > d[1] && d[1] > d[2];
        o.check(monotone && within, "pam_exact dims=" + vals);
        const auto lf = fit_line(g32, d);
        const double root =
            lf.slope < 0 && lf.intercept > 0 ? std::pow(-lf.intercept / lf.slope, 2.0 / 3) : NAN;
        o.check(root >= kRootLo && root <= kRootHi, "root=" + f3(root));
    }
    {
        auto c = sweep_config(SpectrumModel::pam_white, {0.2, 0.3}, 8, 3, 12, 630);
        c.she.sigma = parse_sigma("clipped_linear:ell=0.8,L=1.2");
        const auto r = spectrum_sweep(c);
        std::string vals;
        bool inside = true;
        for (const auto& row : r.rows) {
            const double v = row.hausdorff.value;
            inside = inside && v >= row.theory.lo - kTolPam && v <= row.theory.hi + kTolPam;
            vals += (vals.empty() ? "" : ",") + f3(v) + " in [" + f3(row.theory.lo) + "," +
                    f3(row.theory.hi) + "]";
        }
        o.check(inside, "band " + vals);
    }
    return o;
}

// 7. Colored noise in d = 2.
Outcome criterion7()
{
    Outcome o;
    const double t = 0.5;
    FeynmanKacSpec fk;
    fk.k = 2;
    fk.d = 2;
    fk.t = t;
    fk.f = parse_correlation("gaussian:A=1,w=1");
    fk.paths = 20000;
    const auto oracle = feynman_kac_oracle(fk, 701);

    MomentConfig mc;
    mc.model = MomentModel::pam_colored;
    mc.colored.d = 2;
    mc.colored.bump = parse_bump("gaussian:A=1,w=1");
    const std::vector<double> ks{2, 3, 4}, ts{t};
    const auto table = moment_ensemble(mc, ks, ts, 400, 702);
    const double fd2 = table[0].estimate;
    o.check(std::abs(fd2 / oracle.estimate - 1) <= kTolFkFd,
            "E u^2: FD " + f3(fd2) + " vs FK " + f3(oracle.estimate));

    FeynmanKacSpec cs = fk;
    cs.f = parse_correlation("constant:f0=3.141592653589793");
    cs.k = 3;
    const auto cons = feynman_kac_oracle(cs, 703);
    const double exact = std::exp(3.0 * std::numbers::pi * t);
    o.check(std::abs(cons.estimate / exact - 1) <= kTolConstantOracle,
            "constant f: rel err " + g3(std::abs(cons.estimate / exact - 1)));

    const double limit = fk.f.at_zero(2) * t / 2;
    std::vector<double> r;
    std::string vals;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        r.push_back(std::log(table[i].estimate) / (ks[i] * ks[i]));
        vals += (vals.empty() ? "" : ",") + f3(r.back());
    }
    const bool trend = r[0] < r[1] && r[1] < r[2] && r[2] < limit;
    o.check(trend, "log E u^k / k^2=" + vals + " toward " + f3(limit));
    return o;
}

// 8. Pickands asymptotics for the OU supremum.
Outcome criterion8()
{
    Outcome o;
    const std::vector<double> xs{2.5, 3.0, 3.5};
    const auto rows = pickands_check(xs, std::ldexp(1.0, -10), 1'000'000, 801);
    for (const auto& r : rows)
        o.check(r.ratio >= kPickandsLo && r.ratio <= kPickandsHi,
                "x=" + f3(r.x) + " ratio=" + f3(r.ratio));
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
        {"estimator calibration", criterion1}, {"invariance suite", criterion2},
        {"OU spectrum", criterion3},           {"BM", criterion4},
        {"linear SHE", criterion5},            {"PAM white noise", criterion6},
        {"colored noise d=2", criterion7},     {"Pickands", criterion8},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i)
        pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = int(i) + 1;
        if (!pick.empty() && !pick.count(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = all[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d (%s): %s (%.0fs)\n", out.pass ? "PASS" : "FAIL", id,
                    all[i].first, out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !out.pass;
    }
    return failed ? 1 : 0;
}

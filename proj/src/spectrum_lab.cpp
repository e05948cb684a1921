#include "macrodim/spectrum_lab.hpp"

#include "macrodim/kernels.hpp"
#include "macrodim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace macrodim {

SpectrumModel parse_spectrum_model(const std::string& s)
{
    if (s == "bm")
        return SpectrumModel::bm;
    if (s == "ou")
        return SpectrumModel::ou;
    if (s == "linear_she")
        return SpectrumModel::linear_she;
    if (s == "pam_white")
        return SpectrumModel::pam_white;
    if (s == "pam_exact")
        return SpectrumModel::pam_exact;
    if (s == "colored")
        return SpectrumModel::colored;
    throw InputError("unknown spectrum model '" + s + "'");
}

std::string to_string(SpectrumModel m)
{
    switch (m) {
    case SpectrumModel::bm:
        return "bm";
    case SpectrumModel::ou:
        return "ou";
    case SpectrumModel::linear_she:
        return "linear_she";
    case SpectrumModel::pam_white:
        return "pam_white";
    case SpectrumModel::pam_exact:
        return "pam_exact";
    case SpectrumModel::colored:
        return "colored";
    }
    return "?";
}

TheoryValue theory_dim(SpectrumModel m, double gamma, const TheoryParams& p)
{
    if (!(gamma > 0))
        throw InputError("theory_dim: gamma must be positive");
    TheoryValue v;
    const double c = 4.0 * std::numbers::sqrt2 / 3.0;
    switch (m) {
    case SpectrumModel::bm:
        v.lo = v.hi = gamma <= 1.0 ? 1.0 : -1.0;
        break;
    case SpectrumModel::ou:
    case SpectrumModel::linear_she:
        v.lo = v.hi = 1.0 - gamma * gamma;
        break;
    case SpectrumModel::pam_white: {
        if (!(p.ell > 0) || !(p.L >= p.ell))
            throw InputError("theory_dim: pam_white needs 0 < ell <= L");
        const double g32 = std::pow(gamma, 1.5);
        v.lo = 1.0 - c / (p.ell * p.ell) * g32;
        v.hi = 1.0 - c / (p.L * p.L) * g32;
        break;
    }
    case SpectrumModel::pam_exact:
        v.lo = v.hi = 1.0 - c * std::pow(gamma, 1.5);
        break;
    case SpectrumModel::colored:
        if (!(p.f0 > 0))
            throw InputError("theory_dim: colored needs f0 > 0");
        if (p.d != 1 && p.d != 2)
            throw InputError("theory_dim: colored needs d in {1, 2}");
        v.lo = v.hi = double(p.d) - gamma * gamma / (2.0 * p.f0);
        break;
    }
    v.bounded = v.hi < 0;
    return v;
}

SpectrumConfig resolve(const SpectrumConfig& in)
{
    SpectrumConfig c = in;
    if (c.gammas.empty())
        throw InputError("spectrum: empty gamma list");
    for (double g : c.gammas)
        if (!(g > 0) || !std::isfinite(g))
            throw InputError("spectrum: gamma must be positive");
    std::sort(c.gammas.begin(), c.gammas.end());
    c.gammas.erase(std::unique(c.gammas.begin(), c.gammas.end()), c.gammas.end());
    if (c.replicas < 1)
        throw InputError("spectrum: need at least one replica");
    if (c.n_min < 0 || c.n_max - c.n_min < 3)
        throw InputError("spectrum: shell range must hold at least 4 shells");
    if (c.n_max > kMaxShell)
        throw InputError("spectrum: n_max beyond " + std::to_string(kMaxShell));
    if (!(c.trim >= 0) || !(c.trim < 0.5))
        throw InputError("spectrum: trim must be in [0, 0.5)");
    if (!(c.t > 0))
        throw InputError("spectrum: t must be positive");
    const double e = std::numbers::e, ee = std::exp(e);
    const double horizon = std::exp(double(c.n_max));
    GaugeSpec g;
    Transform tr = Transform::identity;
    switch (c.model) {
    case SpectrumModel::bm:
        g = {GaugeKind::bm_lil, 1.0, ee};
        grid_points(horizon, c.dt);
        break;
    case SpectrumModel::ou:
        g = {GaugeKind::sqrt_log, 1.0, e};
        grid_points(horizon, c.dt);
        break;
    case SpectrumModel::linear_she:
        g = {GaugeKind::sqrt_log, std::pow(c.t / std::numbers::pi, 0.25), ee};
        grid_points(horizon, c.dx);
        break;
    case SpectrumModel::pam_white:
    case SpectrumModel::pam_exact:
        g = {GaugeKind::log_two_thirds, std::cbrt(c.t), ee};
        tr = Transform::log;
        if (c.model == SpectrumModel::pam_exact)
            c.she.sigma = SigmaSpec{};
        else if (c.she.sigma.kind == SigmaKind::linear)
            throw InputError("spectrum: pam_white needs a clipped_linear or table sigma");
        c.she.scheme = Scheme::exp_multiplicative;
        c.she.t_end = c.t;
        c.she.dx = c.dx;
        c.she.x_max = horizon;
        c.she.snapshots.clear();
        c.she.window.reset();
        validate(c.she);
        break;
    case SpectrumModel::colored:
        g = {GaugeKind::sqrt_log_colored, std::sqrt(c.t), ee};
        tr = Transform::log;
        c.colored.t_end = c.t;
        c.colored.dx = c.dx;
        c.colored.extent = horizon;
        c.colored.snapshots.clear();
        c.colored.window.reset();
        validate(c.colored);
        break;
    }
    if (!c.gauge_set) {
        c.gauge = g;
        c.transform = tr;
    }
    if (c.bridge && c.model != SpectrumModel::bm && c.model != SpectrumModel::ou)
        throw InputError("spectrum: the bridge correction is only defined for bm and ou");
    return c;
}

TheoryParams theory_params(const SpectrumConfig& c)
{
    TheoryParams p;
    p.ell = c.she.sigma.ell_sigma();
    p.L = c.she.sigma.L_sigma();
    p.d = c.model == SpectrumModel::colored ? c.colored.d : 1;
    p.f0 = c.colored.bump.f0(p.d);
    return p;
}

namespace {

struct ReplicaOut {
    std::vector<double> h, m, density;
    std::vector<char> bounded, sparse;
};

std::vector<PixelSet> replica_pixels(const SpectrumConfig& c, std::size_t r)
{
    const double horizon = std::exp(double(c.n_max));
    switch (c.model) {
    case SpectrumModel::bm: {
        Rng rng(c.seed, Stream::bm, r);
        const auto path = simulate_bm(horizon, c.dt, rng);
        Rng bridge(c.seed, Stream::bridge, r);
        return exceedance_levels(path, c.gauge, c.gammas, c.transform,
                                 c.bridge ? &bridge : nullptr);
    }
    case SpectrumModel::ou: {
        Rng rng(c.seed, Stream::ou, r);
        const auto path = simulate_ou(horizon, c.dt, rng);
        Rng bridge(c.seed, Stream::bridge, r);
        return exceedance_levels(path, c.gauge, c.gammas, c.transform,
                                 c.bridge ? &bridge : nullptr);
    }
    case SpectrumModel::linear_she: {
        Rng rng(c.seed, Stream::linear_she, r);
        const auto f = LinearSheSampler(c.t, horizon, c.dx).sample(rng);
        return exceedance_levels(f, c.gauge, c.gammas, c.transform);
    }
    case SpectrumModel::pam_white:
    case SpectrumModel::pam_exact: {
        Rng rng(c.seed, Stream::she_1d, r);
        const auto res = solve_she_1d(c.she, rng);
        return exceedance_levels(res.snapshots.back(), c.gauge, c.gammas, c.transform);
    }
    case SpectrumModel::colored: {
        Rng rng(c.seed, Stream::pam_colored, r);
        const auto res = solve_pam_colored(c.colored, rng);
        return exceedance_levels(res.snapshots.back(), c.gauge, c.gammas, c.transform);
    }
    }
    return {};
}

DimAggregate aggregate(std::vector<double> v, double trim)
{
    DimAggregate a;
    a.per_replica = v;
    a.value = trimmed_mean(v, trim);
    if (v.size() > 1)
        a.stderr_ = std::sqrt(sample_variance(v) / double(v.size()));
    return a;
}

}  // namespace

SpectrumResult spectrum_sweep(const SpectrumConfig& cfg_in)
{
    const auto c = resolve(cfg_in);
    const std::size_t ng = c.gammas.size();
    std::vector<ReplicaOut> outs(c.replicas);
    std::vector<double> windows;
    for (int k = 4 * c.n_min; k <= 4 * c.n_max; ++k)
        windows.push_back(std::exp(0.25 * double(k)));
    EstimatorOptions est = c.est;
    est.exec = Exec::serial;
    kernels::for_each_replica(
        c.replicas,
        [&](std::size_t r) {
            const auto sets = replica_pixels(c, r);
            ReplicaOut o;
            for (std::size_t gi = 0; gi < ng; ++gi) {
                const auto& p = sets[gi];
                double h = 0.0, m = 0.0;
                bool bounded = false, sparse = false;
                try {
                    const auto eh = dimh_estimate(p, c.n_min, c.n_max, est);
                    bounded = eh.bounded;
                    h = eh.bounded ? 0.0 : eh.value;
                    if (!bounded)
                        m = dimm_estimate(p, c.n_min, c.n_max).value;
                } catch (const InsufficientData&) {
                    sparse = true;
                }
                o.h.push_back(h);
                o.m.push_back(m);
                o.bounded.push_back(bounded);
                o.sparse.push_back(sparse);
                o.density.push_back(
                    c.density ? upper_density(p, windows, DensityDomain::positive).value : -1.0);
            }
            outs[r] = std::move(o);
        },
        c.exec);

    SpectrumResult res;
    res.kind = c.model;
    res.model = to_string(c.model);
    res.params = theory_params(c);
    res.d = res.params.d;
    res.n_min = c.n_min;
    res.n_max = c.n_max;
    for (std::size_t gi = 0; gi < ng; ++gi) {
        GammaRow row;
        row.gamma = c.gammas[gi];
        row.replicas = c.replicas;
        std::vector<double> h, m, dens;
        for (const auto& o : outs) {
            h.push_back(o.h[gi]);
            m.push_back(o.m[gi]);
            dens.push_back(o.density[gi]);
            row.bounded += o.bounded[gi];
            row.sparse += o.sparse[gi];
        }
        row.hausdorff = aggregate(h, c.trim);
        row.minkowski = aggregate(m, c.trim);
        if (c.density)
            row.density = mean(dens);
        row.theory = theory_dim(c.model, row.gamma, res.params);
        res.rows.push_back(std::move(row));
    }
    return res;
}

std::string to_string(FractalVerdict v)
{
    switch (v) {
    case FractalVerdict::multifractal:
        return "multifractal";
    case FractalVerdict::monofractal:
        return "monofractal";
    case FractalVerdict::indeterminate:
        return "indeterminate";
    }
    return "?";
}

namespace {

bool separated(double a, double sa, double b, double sb)
{
    return std::abs(a - b) > 2.0 * std::sqrt(sa * sa + sb * sb);
}

FractalVerdict verdict_of(const std::vector<double>& v, const std::vector<double>& se,
                          const std::vector<char>& unbounded, int d)
{
    if (v.size() < 2)
        return FractalVerdict::indeterminate;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (unbounded[i] && unbounded[j] && separated(v[i], se[i], v[j], se[j]))
                return FractalVerdict::multifractal;
    bool any = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!unbounded[i])
            continue;
        any = true;
        if (separated(v[i], se[i], double(d), 0.0))
            return FractalVerdict::indeterminate;
    }
    return any ? FractalVerdict::monofractal : FractalVerdict::indeterminate;
}

}  // namespace

FractalVerdict fractal_verdict(const SpectrumResult& r)
{
    std::vector<double> v, se;
    std::vector<char> unbounded;
    for (const auto& row : r.rows) {
        v.push_back(row.hausdorff.value);
        se.push_back(row.hausdorff.stderr_);
        unbounded.push_back(2 * row.bounded < row.replicas);
    }
    return verdict_of(v, se, unbounded, r.d);
}

namespace {

double band_distance(double x, double lo, double hi)
{
    lo = std::max(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (x < lo)
        return lo - x;
    if (x > hi)
        return x - hi;
    return 0.0;
}

struct Pool {
    double sum = 0.0;     // replica-weighted values
    double var = 0.0;     // sum of (n se)^2
    std::size_t n = 0;
    std::size_t bounded = 0;
    TheoryValue theory;
};

}  // namespace

Report compare_report(const std::vector<SpectrumResult>& results)
{
    if (results.empty())
        throw InputError("compare_report: no results");
    // model -> estimator -> gamma -> pooled values
    std::map<std::string, std::map<std::string, std::map<double, Pool>>> pools;
    std::map<std::string, int> dims;
    std::vector<std::string> order;
    for (const auto& r : results) {
        if (!pools.count(r.model))
            order.push_back(r.model);
        dims[r.model] = r.d;
        for (const auto& row : r.rows)
            for (const auto& [name, agg] :
                 {std::pair<std::string, const DimAggregate*>{"hausdorff", &row.hausdorff},
                  {"minkowski", &row.minkowski}}) {
                auto& p = pools[r.model][name][row.gamma];
                const double n = double(row.replicas);
                p.sum += n * agg->value;
                p.var += n * n * agg->stderr_ * agg->stderr_;
                p.n += row.replicas;
                p.bounded += row.bounded;
                p.theory = row.theory;
            }
    }
    Report rep;
    for (const auto& model : order) {
        ModelReport mr;
        mr.model = model;
        std::vector<double> v, se;
        std::vector<char> unbounded;
        for (const auto& [est, byg] : pools[model])
            for (const auto& [g, p] : byg) {
                ReportRow row;
                row.model = model;
                row.gamma = g;
                row.estimator = est;
                row.dim_hat = p.sum / double(p.n);
                row.stderr_ = std::sqrt(p.var) / double(p.n);
                row.theory_lo = p.theory.lo;
                row.theory_hi = p.theory.hi;
                row.replicas = p.n;
                row.delta = band_distance(row.dim_hat, p.theory.lo, p.theory.hi);
                if (est == "hausdorff") {
                    mr.max_abs_delta = std::max(mr.max_abs_delta, row.delta);
                    v.push_back(row.dim_hat);
                    se.push_back(row.stderr_);
                    unbounded.push_back(2 * p.bounded < p.n);
                }
                mr.rows.push_back(row);
            }
        mr.verdict = verdict_of(v, se, unbounded, dims[model]);
        rep.models.push_back(std::move(mr));
    }
    return rep;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumResult>& results)
{
    os << "model,gamma,estimator,dim_hat,stderr,theory_lo,theory_hi,replicas\n";
    for (const auto& r : results)
        for (const auto& row : r.rows)
            for (const auto& [name, agg] :
                 {std::pair<const char*, const DimAggregate*>{"hausdorff", &row.hausdorff},
                  {"minkowski", &row.minkowski}})
                os << r.model << ',' << fmt(row.gamma) << ',' << name << ',' << fmt(agg->value)
                   << ',' << fmt(agg->stderr_) << ',' << fmt(row.theory.lo) << ','
                   << fmt(row.theory.hi) << ',' << row.replicas << '\n';
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

void write_spectrum_svg(std::ostream& os, const std::vector<SpectrumResult>& results)
{
    const double W = 640, H = 420, ml = 60, mr = 150, mt = 20, mb = 50;
    double gmax = 0.0;
    int dmax = 1;
    for (const auto& r : results) {
        dmax = std::max(dmax, r.d);
        for (const auto& row : r.rows)
            gmax = std::max(gmax, row.gamma);
    }
    gmax = gmax > 0 ? 1.1 * gmax : 1.0;
    const double ylo = -0.1, yhi = dmax + 0.1;
    auto X = [&](double g) { return ml + (W - ml - mr) * g / gmax; };
    auto Y = [&](double v) { return mt + (H - mt - mb) * (yhi - v) / (yhi - ylo); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(ylo)) << "\" x2=\"" << num(X(gmax))
       << "\" y2=\"" << num(Y(ylo)) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(ylo)) << "\" x2=\"" << num(X(0))
       << "\" y2=\"" << num(Y(yhi)) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << num(X(gmax))
       << "\" y2=\"" << num(Y(0)) << "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double g = gmax * i / 4.0;
        os << "<text x=\"" << num(X(g)) << "\" y=\"" << num(H - mb + 18)
           << "\" text-anchor=\"middle\">" << num(g) << "</text>\n";
    }
    for (int i = 0; i <= 2 * dmax; ++i) {
        const double v = 0.5 * i;
        os << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(Y(v) + 4)
           << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    os << "<text x=\"" << num((ml + W - mr) / 2) << "\" y=\"" << num(H - 10)
       << "\" text-anchor=\"middle\">gamma</text>\n";
    os << "<text x=\"15\" y=\"" << num((mt + H - mb) / 2) << "\" transform=\"rotate(-90 15 "
       << num((mt + H - mb) / 2) << ")\" text-anchor=\"middle\">dimension</text>\n";

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const char* col = kColors[i % 6];
        std::string lo, hi;
        for (int s = 1; s <= 100; ++s) {
            const double g = gmax * s / 100.0;
            const auto tv = theory_dim(r.kind, g, r.params);
            const double a = std::max(tv.lo, ylo), b = std::max(tv.hi, ylo);
            lo += num(X(g)) + "," + num(Y(a)) + " ";
            hi += num(X(g)) + "," + num(Y(b)) + " ";
        }
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"" << lo << "\"/>\n";
        if (hi != lo)
            os << "<polyline fill=\"none\" stroke=\"" << col
               << "\" stroke-dasharray=\"5,3\" points=\"" << hi << "\"/>\n";
        for (const auto& row : r.rows) {
            const double v = row.hausdorff.value, e = 2 * row.hausdorff.stderr_;
            os << "<line x1=\"" << num(X(row.gamma)) << "\" y1=\"" << num(Y(v - e))
               << "\" x2=\"" << num(X(row.gamma)) << "\" y2=\"" << num(Y(v + e))
               << "\" stroke=\"" << col << "\"/>\n";
            os << "<circle cx=\"" << num(X(row.gamma)) << "\" cy=\"" << num(Y(v))
               << "\" r=\"3.5\" fill=\"" << col << "\"/>\n";
        }
        os << "<text x=\"" << num(W - mr + 10) << "\" y=\"" << num(mt + 16 + 18 * double(i))
           << "\" fill=\"" << col << "\">" << r.model << "</text>\n";
    }
    os << "</svg>\n";
}

void write_report_text(std::ostream& os, const Report& rep)
{
    for (const auto& m : rep.models) {
        os << "[" << m.model << "] verdict=" << to_string(m.verdict)
           << " max_abs_delta=" << fmt(m.max_abs_delta) << "\n";
        os << "gamma,estimator,dim_hat,stderr,theory_lo,theory_hi,delta,replicas\n";
        for (const auto& r : m.rows)
            os << fmt(r.gamma) << ',' << r.estimator << ',' << fmt(r.dim_hat) << ','
               << fmt(r.stderr_) << ',' << fmt(r.theory_lo) << ',' << fmt(r.theory_hi) << ','
               << fmt(r.delta) << ',' << r.replicas << '\n';
    }
}

ContrastResult log_exp_contrast(int n_min, int n_max, double dt, std::uint64_t seed,
                                std::uint64_t replica, Exec exec)
{
    if (n_min < 1 || n_max - n_min < 3 || n_max > kMaxShell)
        throw InputError("contrast: bad shell range");
    Rng rng(seed, Stream::ou, replica);
    const GaugeSpec g{GaugeKind::sqrt_log, 1.0, std::numbers::e};
    EstimatorOptions opt;
    opt.exec = exec;

    // The path is streamed; only the exceeding steps are kept.
    const std::size_t steps = std::size_t(std::ceil(std::exp(double(n_max)) / dt));
    const double rho = std::exp(-0.5 * dt), sd = std::sqrt(-std::expm1(-dt));
    PixelSetBuilder cells;
    NormalizedSegments segs;
    std::int64_t last_cell = -1;
    double u = rng.normal();
    for (std::size_t i = 0; i < steps; ++i) {
        if (i > 0)
            u = rho * u + sd * rng.normal();
        const double t = double(i) * dt;
        if (t < g.start_abscissa() || u < gauge_eval(g, t))
            continue;
        const auto z = std::int64_t(std::floor(t));
        if (z != last_cell)
            cells.add_cell(z);
        last_cell = z;
        const double t1 = t + dt;
        const double n = std::floor(t) + 1.0;
        segs.add(int(n), std::exp(t - n), std::exp(std::min(t1, n) - n));
        if (t1 > n)
            segs.add(int(n) + 1, std::exp(-1.0), std::exp(t1 - n - 1.0));
    }

    ContrastResult out;
    const auto p = cells.build();
    const PixelSource src(p);
    out.t_shells = int(src.occupied_shells(n_min, n_max).size());
    try {
        out.t_view = dimh_estimate(src, n_min, n_max, opt);
    } catch (const InsufficientData&) {
        out.t_sparse = true;
    }

    segs.finalize();
    const auto occ = segs.occupied_shells(0, std::numeric_limits<int>::max());
    out.s_shells = int(occ.size());
    if (occ.size() < 4) {
        out.s_sparse = true;
        return out;
    }
    out.s_view = dimh_estimate(segs, occ.front(), occ.back(), opt);
    return out;
}

}  // namespace macrodim

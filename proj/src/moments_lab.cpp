#include "macrodim/moments_lab.hpp"

#include "macrodim/kernels.hpp"
#include "macrodim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace macrodim {

MomentModel parse_moment_model(const std::string& s)
{
    if (s == "she_1d")
        return MomentModel::she_1d;
    if (s == "linear_she")
        return MomentModel::linear_she;
    if (s == "pam_colored")
        return MomentModel::pam_colored;
    throw InputError("unknown moment model '" + s + "'");
}

std::string to_string(MomentModel m)
{
    switch (m) {
    case MomentModel::she_1d:
        return "she_1d";
    case MomentModel::linear_she:
        return "linear_she";
    case MomentModel::pam_colored:
        return "pam_colored";
    }
    return "?";
}

MomentEstimate summarize_replicas(std::span<const double> values)
{
    MomentEstimate m;
    m.replicas = values.size();
    if (values.empty())
        return m;
    m.estimate = mean(values);
    if (values.size() > 1)
        m.half_width = kZ95 * std::sqrt(sample_variance(values) / double(values.size()));
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto top = std::max<std::size_t>(1, std::size_t(std::ceil(0.01 * double(sorted.size()))));
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    const double head = std::accumulate(sorted.begin(), sorted.begin() + std::ptrdiff_t(top), 0.0);
    m.dominance = total > 0 && head > 0.5 * total;
    return m;
}

namespace {

std::string model_tag(const MomentConfig& cfg)
{
    switch (cfg.model) {
    case MomentModel::she_1d:
        return "she_1d:" + to_string(cfg.she.scheme) + ":" + cfg.she.sigma.describe();
    case MomentModel::linear_she:
        return "linear_she";
    case MomentModel::pam_colored:
        return "pam_colored:d=" + std::to_string(cfg.colored.d);
    }
    return "?";
}

}  // namespace

std::vector<MomentEstimate> moment_ensemble(const MomentConfig& cfg, std::span<const double> ks,
                                            std::span<const double> ts, std::size_t replicas,
                                            std::uint64_t seed)
{
    if (ks.empty() || ts.empty())
        throw InputError("moments: need at least one k and one t");
    for (double k : ks) {
        if (!(k >= 1))
            throw InputError("moments: k must be at least 1");
        if (k > kMaxMomentOrder)
            throw InputError("moments: k = " + fmt(k) + " refused; orders above " +
                             fmt(kMaxMomentOrder) + " are not resolvable by Monte Carlo here");
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!(ts[i] > 0) || (i > 0 && !(ts[i] > ts[i - 1])))
            throw InputError("moments: times must be positive and increasing");
    if (replicas < kMinMomentReplicas)
        throw InputError("moments: at least " + std::to_string(kMinMomentReplicas) +
                         " replicas are required");

    const std::vector<double> times(ts.begin(), ts.end());
    SheSpec she = cfg.she;
    ColoredSpec col = cfg.colored;
    she.t_end = col.t_end = times.back();
    she.snapshots = col.snapshots = times;
    she.exec = col.exec = Exec::serial;
    std::optional<ColoredPam> pam;
    std::vector<std::optional<LinearSheSampler>> linear(times.size());
    switch (cfg.model) {
    case MomentModel::she_1d:
        validate(she);
        break;
    case MomentModel::pam_colored:
        pam.emplace(col);
        break;
    case MomentModel::linear_she:
        for (std::size_t i = 0; i < times.size(); ++i)
            linear[i].emplace(times[i], cfg.linear_x_max, cfg.linear_dx);
        break;
    }

    // vals[(ti * nk + ki) * replicas + r]
    const std::size_t nk = ks.size(), nt = times.size();
    std::vector<double> vals(nt * nk * replicas);
    auto reduce = [&](std::size_t ti, std::size_t r, const std::vector<double>& u) {
        for (std::size_t ki = 0; ki < nk; ++ki) {
            double s = 0.0;
            if (cfg.spatial_average) {
                for (double v : u)
                    s += std::pow(std::abs(v), ks[ki]);
                s /= double(u.size());
            } else {
                s = std::pow(std::abs(u[0]), ks[ki]);
            }
            vals[(ti * nk + ki) * replicas + r] = s;
        }
    };
    kernels::for_each_replica(
        replicas,
        [&](std::size_t r) {
            switch (cfg.model) {
            case MomentModel::she_1d: {
                Rng rng(seed, Stream::she_1d, r);
                const auto res = solve_she_1d(she, rng);
                for (std::size_t ti = 0; ti < nt; ++ti)
                    reduce(ti, r, res.snapshots[ti].values);
                break;
            }
            case MomentModel::pam_colored: {
                Rng rng(seed, Stream::pam_colored, r);
                const auto res = pam->solve(rng);
                for (std::size_t ti = 0; ti < nt; ++ti)
                    reduce(ti, r, res.snapshots[ti].values);
                break;
            }
            case MomentModel::linear_she: {
                Rng rng(seed, Stream::linear_she, r);
                for (std::size_t ti = 0; ti < nt; ++ti)
                    reduce(ti, r, linear[ti]->sample(rng).values);
                break;
            }
            }
        },
        cfg.exec);

    std::vector<MomentEstimate> out;
    const std::string tag = model_tag(cfg);
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t ki = 0; ki < nk; ++ki) {
            auto m = summarize_replicas(
                std::span<const double>(vals).subspan((ti * nk + ki) * replicas, replicas));
            m.model = tag;
            m.k = ks[ki];
            m.t = times[ti];
            out.push_back(m);
        }
    return out;
}

LyapunovFit lyapunov_fit(std::span<const MomentEstimate> table, double k, double t_min,
                         double t_max)
{
    LyapunovFit fit;
    fit.k = k;
    std::vector<double> y, sig;
    for (const auto& m : table) {
        if (m.k != k || m.t < t_min || m.t > t_max)
            continue;
        if (!(m.estimate > 0))
            throw DomainError("lyapunov_fit: nonpositive moment at t = " + fmt(m.t));
        fit.t.push_back(m.t);
        y.push_back(std::log(m.estimate));
        sig.push_back(m.half_width / (kZ95 * m.estimate));
        fit.unreliable = fit.unreliable || m.dominance;
    }
    if (fit.t.size() < 4)
        throw InsufficientData("lyapunov_fit: need at least 4 times in [" + fmt(t_min) + ", " +
                               fmt(t_max) + "] for k = " + fmt(k));
    const auto lf = fit_line(fit.t, y);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.residuals = lf.residuals;
    const double tbar = mean(fit.t);
    double sxx = 0.0;
    for (double t : fit.t)
        sxx += (t - tbar) * (t - tbar);
    double mc = 0.0;
    for (std::size_t i = 0; i < fit.t.size(); ++i) {
        const double c = (fit.t[i] - tbar) / sxx;
        mc += c * c * sig[i] * sig[i];
    }
    fit.stderr_ = std::sqrt(lf.slope_stderr * lf.slope_stderr + mc);
    return fit;
}

std::string to_string(Verdict3 v)
{
    switch (v) {
    case Verdict3::intermittent:
        return "intermittent";
    case Verdict3::not_intermittent:
        return "not_intermittent";
    case Verdict3::indeterminate:
        return "indeterminate";
    }
    return "?";
}

IntermittencyReport intermittency_check(std::span<const LyapunovFit> fits)
{
    if (fits.size() < 2)
        throw InputError("intermittency_check: need fits for at least two k");
    IntermittencyReport rep;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (i > 0 && !(fits[i].k > fits[i - 1].k))
            throw InputError("intermittency_check: fits must be sorted by k");
        rep.ratios.push_back(fits[i].slope / fits[i].k);
    }
    bool all_up = true, any_down = false, all_flat = true;
    for (std::size_t i = 1; i < fits.size(); ++i) {
        const double gap = rep.ratios[i] - rep.ratios[i - 1];
        const double a = fits[i].stderr_ / fits[i].k, b = fits[i - 1].stderr_ / fits[i - 1].k;
        const double err = std::sqrt(a * a + b * b);
        rep.gaps.push_back(gap);
        rep.gap_stderr.push_back(err);
        all_up = all_up && gap > err;
        any_down = any_down || gap < -err;
        all_flat = all_flat && std::abs(gap) <= err;
    }
    if (all_up)
        rep.verdict = Verdict3::intermittent;
    else if (any_down || all_flat)
        rep.verdict = Verdict3::not_intermittent;
    else
        rep.verdict = Verdict3::indeterminate;
    return rep;
}

double CorrelationSpec::operator()(double r2, int d) const
{
    switch (kind) {
    case CorrelationKind::zero:
        return 0.0;
    case CorrelationKind::constant:
        return f0;
    case CorrelationKind::gaussian:
        return bump.f(r2, d);
    }
    return 0.0;
}

double CorrelationSpec::at_zero(int d) const { return (*this)(0.0, d); }

std::string CorrelationSpec::describe(int d) const
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "feynman_kac:f0=%.6f", at_zero(d));
    return buf;
}

CorrelationSpec parse_correlation(const std::string& s)
{
    CorrelationSpec out;
    if (s == "zero") {
        out.kind = CorrelationKind::zero;
        return out;
    }
    if (s.rfind("constant:", 0) == 0) {
        out.kind = CorrelationKind::constant;
        const auto rest = s.substr(9);
        if (rest.rfind("f0=", 0) != 0)
            throw InputError("constant correlation: expected constant:f0=<value>");
        try {
            std::size_t used = 0;
            out.f0 = std::stod(rest.substr(3), &used);
            if (used != rest.size() - 3)
                throw InputError("constant correlation: bad f0");
        } catch (const std::invalid_argument&) {
            throw InputError("constant correlation: bad f0");
        }
        if (!(out.f0 >= 0))
            throw InputError("constant correlation: f0 must be nonnegative");
        return out;
    }
    out.kind = CorrelationKind::gaussian;
    out.bump = parse_bump(s);
    return out;
}

MomentEstimate feynman_kac_oracle(const FeynmanKacSpec& spec, std::uint64_t seed)
{
    const int k = spec.k, d = spec.d;
    if (k < 2)
        throw InputError("feynman_kac: k must be at least 2");
    if (d != 1 && d != 2)
        throw InputError("feynman_kac: d must be 1 or 2");
    if (!(spec.t > 0) || !(spec.ds > 0))
        throw InputError("feynman_kac: t and ds must be positive");
    if (spec.paths < 2)
        throw InputError("feynman_kac: need at least 2 paths");
    std::vector<int> slot(static_cast<std::size_t>(k));
    std::iota(slot.begin(), slot.end(), 0);
    if (!spec.relabel.empty()) {
        auto sorted = spec.relabel;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != slot)
            throw InputError("feynman_kac: relabel must be a permutation of 0..k-1");
        slot = spec.relabel;
    }
    const auto steps = std::size_t(std::ceil(spec.t / spec.ds - 1e-9));
    const double ds = spec.t / double(steps);
    const double pairs = 0.5 * k * (k - 1);
    std::vector<double> vals;
    if (spec.f.kind != CorrelationKind::gaussian) {
        // deterministic integrand
        vals.assign(2, std::exp(pairs * spec.f.at_zero(d) * spec.t));
    } else {
        const double normals = double(k) * d * double(spec.paths) * double(steps);
        if (normals > kMaxOracleNormals)
            throw ResourceError("feynman_kac: " + fmt(normals) + " normals exceed the budget " +
                                fmt(kMaxOracleNormals));
        vals.resize(spec.paths);
        kernels::for_each_replica(
            spec.paths,
            [&](std::size_t p) {
                Rng rng(seed, Stream::feynman_kac, p);
                std::vector<double> x(std::size_t(k * d), 0.0);
                auto pair_sum = [&] {
                    double s = 0.0;
                    for (int i = 0; i < k; ++i)
                        for (int j = i + 1; j < k; ++j) {
                            double r2 = 0.0;
                            for (int c = 0; c < d; ++c) {
                                const double diff = x[std::size_t(i * d + c)] - x[std::size_t(j * d + c)];
                                r2 += diff * diff;
                            }
                            s += spec.f(r2, d);
                        }
                    return s;
                };
                const double sd = std::sqrt(ds);
                double prev = pair_sum(), integral = 0.0;
                for (std::size_t m = 0; m < steps; ++m) {
                    for (int q = 0; q < k; ++q)
                        for (int c = 0; c < d; ++c)
                            x[std::size_t(slot[std::size_t(q)] * d + c)] += sd * rng.normal();
                    const double cur = pair_sum();
                    integral += 0.5 * (prev + cur) * ds;
                    prev = cur;
                }
                vals[p] = std::exp(integral);
            },
            spec.exec);
    }
    auto m = summarize_replicas(vals);
    m.replicas = spec.paths;
    m.model = spec.f.describe(d);
    m.k = k;
    m.t = spec.t;
    return m;
}

TailFit tail_exponent_fit(std::span<const double> samples, std::optional<double> b, double z_lo,
                          double z_hi, int points)
{
    if (samples.size() < kMinTailSamples)
        throw InputError("tail fit: need at least " + std::to_string(kMinTailSamples) +
                         " samples, got " + std::to_string(samples.size()));
    if (b && !(*b > 0))
        throw InputError("tail fit: b must be positive");
    if (points < 4)
        throw InputError("tail fit: need at least 4 points");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    auto exceed = [&](double z) {
        return double(x.end() - std::upper_bound(x.begin(), x.end(), z));
    };
    TailFit fit;
    const double resolvable = x[n - 11];
    if (!(z_hi > 0)) {
        z_hi = resolvable;
    } else if (exceed(z_hi) < 10) {
        z_hi = resolvable;
        fit.range_shrunk = true;
    }
    if (!(z_lo > 0) || !(z_lo < z_hi))
        throw InputError("tail fit: need 0 < z_lo < z_hi, got [" + fmt(z_lo) + ", " + fmt(z_hi) +
                         "]");
    fit.z_lo = z_lo;
    fit.z_hi = z_hi;
    std::vector<double> zs, ys, ws;
    for (int i = 0; i < points; ++i) {
        const double z = z_lo * std::pow(z_hi / z_lo, double(i) / double(points - 1));
        const double p = exceed(z) / double(n);
        if (!(p > 0) || !(p < 1))
            continue;
        zs.push_back(z);
        ys.push_back(-std::log(p));
        ws.push_back(double(n) * p / (1 - p));
    }
    if (zs.size() < 4)
        throw InsufficientData("tail fit: fewer than 4 usable levels");
    fit.points = zs.size();
    auto solve = [&](double bb) {
        std::vector<std::vector<double>> cols(3, std::vector<double>(zs.size()));
        for (std::size_t i = 0; i < zs.size(); ++i) {
            cols[0][i] = 1.0;
            cols[1][i] = std::log(zs[i]);
            cols[2][i] = std::pow(zs[i], bb);
        }
        return fit_weighted(cols, ys, ws);
    };
    double best_b = b.value_or(2.0);
    if (!b) {
        fit.b_free = true;
        double best = HUGE_VAL;
        for (double bb = 0.5; bb <= 4.0 + 1e-9; bb += 0.01) {
            const auto r = solve(bb);
            if (r.weighted_rss < best) {
                best = r.weighted_rss;
                best_b = bb;
            }
        }
    }
    const auto r = solve(best_b);
    fit.b = best_b;
    fit.intercept = r.coef[0];
    fit.kappa = r.coef[1];
    fit.c_hat = std::max(0.0, r.coef[2]);
    fit.weighted_rss = r.weighted_rss;
    return fit;
}

double pickands_asymptotic(double x)
{
    return 0.5 * x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<PickandsRow> pickands_check(std::span<const double> xs, double dt,
                                        std::size_t replicas, std::uint64_t seed, Exec exec)
{
    if (xs.empty() || replicas < 2)
        throw InputError("pickands: need levels and at least 2 replicas");
    if (!(dt > 0) || dt >= 1)
        throw InputError("pickands: dt must be in (0, 1)");
    std::vector<double> maxima(replicas);
    constexpr std::size_t block = 4096;
    const std::size_t blocks = (replicas + block - 1) / block;
    kernels::for_each_replica(
        blocks,
        [&](std::size_t b) {
            const std::size_t hi = std::min(replicas, (b + 1) * block);
            for (std::size_t r = b * block; r < hi; ++r) {
                Rng rng(seed, Stream::pickands, r);
                maxima[r] = ou_running_max(1.0, dt, rng);
            }
        },
        exec);
    std::vector<PickandsRow> out;
    for (double x : xs) {
        PickandsRow row;
        row.x = x;
        row.replicas = replicas;
        const double hits = double(std::count_if(maxima.begin(), maxima.end(),
                                                 [x](double m) { return m > x; }));
        row.empirical = hits / double(replicas);
        row.half_width = kZ95 * std::sqrt(row.empirical * (1 - row.empirical) / double(replicas));
        row.asymptotic = pickands_asymptotic(x);
        row.ratio = row.empirical / row.asymptotic;
        out.push_back(row);
    }
    return out;
}

}  // namespace macrodim

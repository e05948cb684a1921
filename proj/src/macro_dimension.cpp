#include "macrodim/macro_dimension.hpp"

#include "macrodim/kernels.hpp"
#include "macrodim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace macrodim {

namespace {

struct Valued {
    double cost = 0.0;
    bool exact = true;
    // filled only when boxes are requested
    std::vector<UprightBox> boxes;
    std::int64_t box_count = 0;
    bool elided = false;
};

void push_box(Valued& v, double x, double side, bool want)
{
    ++v.box_count;
    if (!want)
        return;
    if (v.box_count > kMaxListedBoxes) {
        v.elided = true;
        v.boxes.clear();
        v.boxes.shrink_to_fit();
        return;
    }
    if (!v.elided)
        v.boxes.push_back({{x, 0.0}, side, 1});
}

Valued content_runs(const std::vector<CellRun>& runs, int n, double rho, double c0, bool want)
{
    Valued v;
    const double scale = std::exp(-double(n) * rho);
    if (rho > 1.0 && c0 <= 1.0) {
        std::int64_t cells = 0;
        for (const auto& run : runs) {
            cells += run.size();
            if (want)
                for (std::int64_t z = run.lo; z <= run.hi && !v.elided; ++z)
                    push_box(v, double(z), 1.0, true);
        }
        v.box_count = cells;
        v.cost = double(cells) * scale;
        return v;
    }
    std::vector<Segment> segs;
    if (rho > 1.0) {
        // a run may be cheaper to cover in pieces, so the program works cell by cell
        std::int64_t cells = 0;
        for (const auto& run : runs)
            cells += run.size();
        if (cells > kMaxEnumeratedCells / 8)
            throw ResourceError("shell_content: " + std::to_string(cells) +
                                " cells are too many for rho > 1 with a minimum side above 1");
        segs.reserve(std::size_t(cells));
        for (const auto& run : runs)
            for (std::int64_t z = run.lo; z <= run.hi; ++z)
                segs.push_back({double(z), double(z + 1)});
    } else {
        segs.reserve(runs.size());
        for (const auto& run : runs)
            segs.push_back({double(run.lo), double(run.hi + 1)});
    }
    const auto gc = cover_segments(segs, rho, c0);
    v.cost = gc.cost * scale;
    v.exact = true;
    for (const auto& [i, j] : gc.groups)
        push_box(v, segs[i].lo, std::max(segs[j].hi - segs[i].lo, c0), want);
    return v;
}

Valued content_progression(const Progression& p, int n, double rho, double c0, bool want)
{
    const double m = double(p.count), delta = double(p.step);
    auto h = [&](double k) { return std::pow(std::max((k - 1.0) * delta + 1.0, c0), rho); };
    const double scale = std::exp(-double(n) * rho);
    const bool concave = h(2) - h(1) >= h(3) - h(2);
    const bool unit_exact = rho > 1.0 && c0 <= 1.0;
    if (!unit_exact && !(rho <= 1.0 && concave) && p.count <= kMaxEnumeratedCells / 8) {
        std::vector<CellRun> runs;
        for (std::int64_t k = 0; k < p.count; ++k)
            runs.push_back({p.first + k * p.step, p.first + k * p.step});
        return content_runs(runs, n, rho, c0, want);
    }
    Valued v;
    v.exact = unit_exact || (rho <= 1.0 && concave);
    const double one = h(m), unit = m * h(1);
    if (one <= unit && !unit_exact) {
        v.cost = one * scale;
        push_box(v, double(p.first), std::max(double(p.last() - p.first + 1), c0), want);
    } else {
        v.cost = unit * scale;
        v.box_count = p.count;
        if (want && p.count <= kMaxListedBoxes) {
            v.box_count = 0;
            for (std::int64_t k = 0; k < p.count; ++k)
                push_box(v, double(p.first + k * p.step), std::max(1.0, c0), true);
        } else if (want) {
            v.elided = true;
        }
    }
    return v;
}

Valued content_2d(const std::vector<Cell2>& cells, int n, double rho, double c0, bool want)
{
    Valued v;
    v.exact = false;
    const int k_min = std::max(0, int(std::ceil(std::log2(c0) - 1e-12)));
    const int k_max = std::max(k_min, int(std::floor(std::log2(std::floor(shell_outer(n))))));
    const auto dc = cover_dyadic(cells, rho, k_min, k_max, want);
    v.cost = dc.cost * std::exp(-double(n) * rho);
    v.box_count = std::int64_t(dc.squares.size());
    for (const auto& sq : dc.squares) {
        const double side = std::ldexp(1.0, sq.level);
        v.boxes.push_back({{double(sq.x) * side, double(sq.y) * side}, side, 2});
    }
    return v;
}

Valued content_impl(const PixelSet& p, int n, double rho, double c0, bool want)
{
    if (!(rho >= 0) || !std::isfinite(rho))
        throw InputError("shell_content: rho must be nonnegative");
    if (!(c0 >= 1.0))
        throw InputError("shell_content: minimum side must be at least 1");
    if (p.resolution() != 1.0)
        throw InputError("shell_content: pixels must have resolution 1; re-pixelize first");
    const auto* sc = p.shell(n);
    if (!sc || sc->empty())
        return {};
    if (p.dimension() == 2)
        return content_2d(sc->cells2, n, rho, c0, want);
    if (sc->progression)
        return content_progression(*sc->progression, n, rho, c0, want);
    return content_runs(sc->runs, n, rho, c0, want);
}

}  // namespace

CoverSolution shell_content(const PixelSet& p, int n, double rho, double c0)
{
    if (!(rho > 0))
        throw InputError("shell_content: rho must be positive");
    auto v = content_impl(p, n, rho, c0, true);
    CoverSolution out;
    out.shell = n;
    out.rho = rho;
    out.cost = v.cost;
    out.boxes = std::move(v.boxes);
    out.box_count = v.box_count;
    out.boxes_elided = v.elided;
    out.exactness = v.exact ? Exactness::exact : Exactness::upper_bound;
    return out;
}

double shell_content_value(const PixelSet& p, int n, double rho, double c0, bool* exact)
{
    auto v = content_impl(p, n, rho, c0, false);
    if (exact)
        *exact = v.exact;
    return v.cost;
}

PixelSource::PixelSource(const PixelSet& p) : p_(p) {}

std::vector<int> PixelSource::occupied_shells(int lo, int hi) const
{
    std::vector<int> out;
    for (const auto& [n, sc] : p_.shells())
        if (n >= lo && n <= hi && !sc.empty())
            out.push_back(n);
    return out;
}

double PixelSource::log_cell_count(int n) const
{
    return std::log(double(p_.count(n)) * std::pow(p_.resolution(), p_.dimension()));
}

double PixelSource::content(int n, double rho, double c0) const
{
    return shell_content_value(p_, n, rho, c0);
}

bool PixelSource::content_exact(int n, double rho, double c0) const
{
    bool exact = true;
    shell_content_value(p_, n, rho, c0, &exact);
    return exact;
}

void NormalizedSegments::add(int n, double lo, double hi)
{
    if (hi > lo)
        shells_[n].push_back({lo, hi});
}

void NormalizedSegments::finalize()
{
    for (auto& [n, segs] : shells_) {
        std::sort(segs.begin(), segs.end(),
                  [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
        std::vector<Segment> merged;
        for (const auto& s : segs) {
            if (!merged.empty() && s.lo <= merged.back().hi)
                merged.back().hi = std::max(merged.back().hi, s.hi);
            else
                merged.push_back(s);
        }
        segs = std::move(merged);
    }
}

std::vector<int> NormalizedSegments::occupied_shells(int lo, int hi) const
{
    std::vector<int> out;
    for (const auto& [n, segs] : shells_)
        if (n >= lo && n <= hi && !segs.empty())
            out.push_back(n);
    return out;
}

double NormalizedSegments::log_cell_count(int n) const
{
    auto it = shells_.find(n);
    if (it == shells_.end())
        return -INFINITY;
    double len = 0;
    for (const auto& s : it->second)
        len += s.hi - s.lo;
    return std::log(len) + double(n);
}

double NormalizedSegments::content(int n, double rho, double c0) const
{
    auto it = shells_.find(n);
    if (it == shells_.end())
        return 0.0;
    return cover_segments(it->second, rho, c0 * std::exp(-double(n))).cost;
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::hausdorff:
        return "hausdorff";
    case Method::minkowski:
        return "minkowski";
    case Method::lower_hausdorff:
        return "lower_hausdorff";
    }
    return "?";
}

std::vector<double> rho_grid(int d, double step)
{
    if (!(step > 0))
        throw InputError("rho_grid: step must be positive");
    std::vector<double> g;
    const int k = int(std::llround(double(d) / step));
    for (int i = 0; i <= k; ++i)
        g.push_back(std::min(double(d), double(i) * step));
    return g;
}

namespace {

// Shared preamble: empty or early-stopping occupancy means a bounded set.
bool bounded_or_short(const std::vector<int>& occ, int n_max, DimensionEstimate& est)
{
    if (occ.empty() || occ.back() < n_max - 2) {
        est.value = kBoundedSentinel;
        est.bounded = true;
        return true;
    }
    if (occ.size() < 4)
        throw InsufficientData("dimension estimate: only " + std::to_string(occ.size()) +
                               " occupied shells in [" + std::to_string(est.n_min) + ", " +
                               std::to_string(n_max) + "]");
    return false;
}

DimensionEstimate slope_root(const ShellSource& src, std::vector<int> occ,
                             const EstimatorOptions& opt, DimensionEstimate est)
{
    const int d = src.dimension();
    const auto grid = rho_grid(d, opt.rho_step);
    const int K = int(grid.size()) - 1;
    std::vector<double> xs(occ.begin(), occ.end());
    struct Eval {
        SlopePoint sp;
        std::vector<double> logs;
        std::vector<double> residuals;
    };
    std::map<int, Eval> cache;
    auto eval = [&](int k) -> const Eval& {
        auto it = cache.find(k);
        if (it != cache.end())
            return it->second;
        const auto c = kernels::shell_contents(src, occ, grid[std::size_t(k)], opt.c0, opt.exec);
        Eval e;
        for (double v : c) {
            if (!(v > 0))
                throw DomainError("dimension estimate: nonpositive content on an occupied shell");
            e.logs.push_back(std::log(v));
        }
        const auto f = fit_line(xs, e.logs);
        e.sp = {grid[std::size_t(k)], f.slope, f.slope_stderr};
        e.residuals = f.residuals;
        return cache.emplace(k, std::move(e)).first->second;
    };
    const double tol = opt.slope_tol;
    int lo = 0, hi = K;
    double value;
    if (eval(K).sp.slope >= -tol) {
        value = double(d);
        lo = hi = K;
    } else if (eval(0).sp.slope < -tol) {
        value = 0.0;
        lo = hi = 0;
    } else {
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            if (eval(mid).sp.slope < -tol)
                hi = mid;
            else
                lo = mid;
        }
        const double sl = eval(lo).sp.slope, sh = eval(hi).sp.slope;
        const double frac = sl > 0 ? sl / (sl - sh) : 0.0;
        value = grid[std::size_t(lo)] + std::clamp(frac, 0.0, 1.0) * (grid[std::size_t(hi)] -
                                                                   grid[std::size_t(lo)]);
    }
    const auto& at = eval(hi);
    double dsdrho = 0.0;
    if (hi > lo)
        dsdrho = (eval(hi).sp.slope - eval(lo).sp.slope) / (grid[std::size_t(hi)] -
                                                            grid[std::size_t(lo)]);
    est.stderr_ = std::abs(dsdrho) > 1e-3 ? at.sp.stderr_ / std::abs(dsdrho) : at.sp.stderr_;
    est.value = std::clamp(value, 0.0, double(d));
    est.content_exact = src.content_exact(occ.front(), grid[std::size_t(hi)], opt.c0);
    est.residuals = at.residuals;
    for (std::size_t i = 0; i < occ.size(); ++i)
        est.shells.push_back({occ[i], src.log_cell_count(occ[i]), at.logs[i]});
    for (const auto& [k, e] : cache)
        est.slopes.push_back(e.sp);
    return est;
}

}  // namespace

DimensionEstimate dimh_estimate(const ShellSource& src, int n_min, int n_max,
                                const EstimatorOptions& opt)
{
    if (n_max < n_min)
        throw InputError("dimh_estimate: empty shell range");
    DimensionEstimate est;
    est.method = Method::hausdorff;
    est.n_min = n_min;
    est.n_max = n_max;
    const auto occ = src.occupied_shells(n_min, n_max);
    if (bounded_or_short(occ, n_max, est))
        return est;
    return slope_root(src, occ, opt, est);
}

DimensionEstimate dimh_estimate(const PixelSet& p, int n_min, int n_max,
                                const EstimatorOptions& opt)
{
    return dimh_estimate(PixelSource(p), n_min, n_max, opt);
}

DimensionEstimate ldimh_estimate(const ShellSource& src, int n_min, int n_max,
                                 const EstimatorOptions& opt)
{
    auto full = dimh_estimate(src, n_min, n_max, opt);
    if (full.bounded)
        return full;
    auto occ = src.occupied_shells(n_min, n_max);
    const std::size_t keep = std::max<std::size_t>(4, (occ.size() + 1) / 2);
    occ.erase(occ.begin(), occ.end() - std::ptrdiff_t(keep));
    DimensionEstimate est;
    est.method = Method::lower_hausdorff;
    est.n_min = n_min;
    est.n_max = n_max;
    est = slope_root(src, occ, opt, est);
    if (full.value < est.value) {
        est.value = full.value;
        est.stderr_ = full.stderr_;
    }
    return est;
}

DimensionEstimate dimm_estimate(const ShellSource& src, int n_min, int n_max)
{
    if (n_max < n_min)
        throw InputError("dimm_estimate: empty shell range");
    DimensionEstimate est;
    est.method = Method::minkowski;
    est.n_min = n_min;
    est.n_max = n_max;
    const auto occ = src.occupied_shells(n_min, n_max);
    if (bounded_or_short(occ, n_max, est))
        return est;
    std::vector<double> xs(occ.begin(), occ.end()), ys;
    for (int n : occ)
        ys.push_back(src.log_cell_count(n));
    const auto f = fit_line(xs, ys);
    est.value = std::clamp(f.slope, 0.0, double(src.dimension()));
    est.stderr_ = f.slope_stderr;
    est.residuals = f.residuals;
    for (std::size_t i = 0; i < occ.size(); ++i)
        est.shells.push_back({occ[i], ys[i], 0.0});
    return est;
}

DimensionEstimate dimm_estimate(const PixelSet& p, int n_min, int n_max)
{
    return dimm_estimate(PixelSource(p), n_min, n_max);
}

namespace {

DensityEstimate finish_density(std::span<const double> windows, std::vector<double> ratios)
{
    DensityEstimate out;
    out.windows.assign(windows.begin(), windows.end());
    out.ratios = std::move(ratios);
    const std::size_t from = out.ratios.size() / 2;
    for (std::size_t i = from; i < out.ratios.size(); ++i)
        out.value = std::max(out.value, out.ratios[i]);
    return out;
}

void check_windows(std::span<const double> windows)
{
    if (windows.empty())
        throw InputError("upper_density: no windows");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(windows[i] > 0))
            throw InputError("upper_density: windows must be positive");
        if (i > 0 && !(windows[i] > windows[i - 1]))
            throw InputError("upper_density: windows must be increasing");
    }
}

}  // namespace

DensityEstimate upper_density(const PixelSet& p, std::span<const double> windows,
                              DensityDomain domain)
{
    check_windows(windows);
    const double r = p.resolution();
    const int d = p.dimension();
    std::vector<double> ratios;
    for (double t : windows) {
        const double lo = domain == DensityDomain::symmetric ? -t : 0.0;
        // cells whose corner lies in [lo, t)
        const auto zlo = std::int64_t(std::ceil(lo / r));
        const auto zhi = std::int64_t(std::ceil(t / r)) - 1;
        double count = 0;
        for (const auto& [n, sc] : p.shells()) {
            if (d == 2) {
                for (const auto& c : sc.cells2)
                    if (c[0] >= zlo && c[0] <= zhi && c[1] >= zlo && c[1] <= zhi)
                        count += 1;
                continue;
            }
            if (sc.progression) {
                const auto& pr = *sc.progression;
                for (std::int64_t k = 0; k < pr.count; ++k) {
                    const std::int64_t z = pr.first + k * pr.step;
                    if (z >= zlo && z <= zhi)
                        count += 1;
                }
                continue;
            }
            for (const auto& run : sc.runs) {
                const std::int64_t a = std::max(run.lo, zlo), b = std::min(run.hi, zhi);
                if (a <= b)
                    count += double(b - a + 1);
            }
        }
        const double side = domain == DensityDomain::symmetric ? 2.0 * t : t;
        ratios.push_back(count * std::pow(r, d) / std::pow(side, d));
    }
    return finish_density(windows, std::move(ratios));
}

DensityEstimate upper_density(std::span<const double> points, double weight,
                              std::span<const double> windows, DensityDomain domain)
{
    check_windows(windows);
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> ratios;
    for (double t : windows) {
        const double lo = domain == DensityDomain::symmetric ? -t : 0.0;
        const auto a = std::lower_bound(sorted.begin(), sorted.end(), lo);
        const auto b = std::lower_bound(sorted.begin(), sorted.end(), t);
        const double side = domain == DensityDomain::symmetric ? 2.0 * t : t;
        ratios.push_back(double(b - a) * weight / side);
    }
    return finish_density(windows, std::move(ratios));
}

FrostmanResult frostman_bound(int n, std::span<const std::pair<std::int64_t, double>> mu,
                              double rho)
{
    if (!(rho > 0))
        throw InputError("frostman_bound: rho must be positive");
    std::vector<std::pair<std::int64_t, double>> w(mu.begin(), mu.end());
    std::sort(w.begin(), w.end());
    FrostmanResult out;
    for (const auto& [z, m] : w) {
        if (!(m >= 0) || !std::isfinite(m))
            throw InputError("frostman_bound: weights must be finite and nonnegative");
        if (shell_of(double(z)) != n)
            throw InputError("frostman_bound: cell " + std::to_string(z) + " is not in shell " +
                             std::to_string(n));
        out.mass += m;
    }
    if (!(out.mass > 0))
        throw InputError("frostman_bound: zero mass");
    const std::int64_t span = w.back().first - w.front().first + 1;
    const int top = int(std::ceil(std::log2(double(span)))) + 2;
    double k_up = 0.0;
    for (int k = 0; k <= top; ++k) {
        double best = 0.0, acc = 0.0;
        std::int64_t key = 0;
        bool open = false;
        for (const auto& [z, m] : w) {
            const std::int64_t kk = z >> k;
            if (!open || kk != key) {
                acc = 0.0;
                key = kk;
                open = true;
            }
            acc += m;
            best = std::max(best, acc);
        }
        out.k_dyadic = std::max(out.k_dyadic, best / std::pow(2.0, k * rho));
        if (k >= 1)
            k_up = std::max(k_up, 2.0 * best / std::pow(2.0, (k - 1) * rho));
    }
    if (w.size() <= 4096) {
        std::vector<double> pre(w.size() + 1, 0.0);
        for (std::size_t i = 0; i < w.size(); ++i)
            pre[i + 1] = pre[i] + w[i].second;
        double k = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i; j < w.size(); ++j) {
                const double side = double(w[j].first + 1 - w[i].first);
                k = std::max(k, (pre[j + 1] - pre[i]) / std::pow(side, rho));
            }
        out.k_valid = k;
        out.k_exact = true;
    } else {
        out.k_valid = k_up;
    }
    out.bound = out.mass * std::exp(-double(n) * rho) / out.k_valid;
    return out;
}

FrostmanResult frostman_bound(int n, std::span<const std::pair<Cell2, double>> mu, double rho)
{
    if (!(rho > 0))
        throw InputError("frostman_bound: rho must be positive");
    FrostmanResult out;
    std::int64_t span = 1;
    for (const auto& [z, m] : mu) {
        if (!(m >= 0) || !std::isfinite(m))
            throw InputError("frostman_bound: weights must be finite and nonnegative");
        if (shell_of(Point{double(z[0]), double(z[1])}, 2) != n)
            throw InputError("frostman_bound: cell outside shell " + std::to_string(n));
        out.mass += m;
    }
    if (!(out.mass > 0))
        throw InputError("frostman_bound: zero mass");
    std::int64_t lo0 = mu[0].first[0], hi0 = lo0, lo1 = mu[0].first[1], hi1 = lo1;
    for (const auto& [z, m] : mu) {
        lo0 = std::min(lo0, z[0]);
        hi0 = std::max(hi0, z[0]);
        lo1 = std::min(lo1, z[1]);
        hi1 = std::max(hi1, z[1]);
    }
    span = std::max(hi0 - lo0, hi1 - lo1) + 1;
    const int top = int(std::ceil(std::log2(double(span)))) + 2;
    double k_up = 0.0;
    for (int k = 0; k <= top; ++k) {
        std::map<Cell2, double> blocks;
        for (const auto& [z, m] : mu)
            blocks[{z[0] >> k, z[1] >> k}] += m;
        double best = 0.0;
        for (const auto& [key, m] : blocks)
            best = std::max(best, m);
        out.k_dyadic = std::max(out.k_dyadic, best / std::pow(2.0, k * rho));
        if (k >= 1)
            k_up = std::max(k_up, 4.0 * best / std::pow(2.0, (k - 1) * rho));
    }
    out.k_valid = k_up;
    out.bound = out.mass * std::exp(-double(n) * rho) / out.k_valid;
    return out;
}

FixtureKind parse_fixture_kind(const std::string& s)
{
    if (s == "naturals")
        return FixtureKind::naturals;
    if (s == "exp_naturals")
        return FixtureKind::exp_naturals;
    if (s == "full_lattice")
        return FixtureKind::full_lattice;
    if (s == "skeleton")
        return FixtureKind::skeleton;
    if (s == "affine_image")
        return FixtureKind::affine_image;
    throw InputError("unknown fixture kind '" + s + "'");
}

std::string to_string(FixtureKind k)
{
    switch (k) {
    case FixtureKind::naturals:
        return "naturals";
    case FixtureKind::exp_naturals:
        return "exp_naturals";
    case FixtureKind::full_lattice:
        return "full_lattice";
    case FixtureKind::skeleton:
        return "skeleton";
    case FixtureKind::affine_image:
        return "affine_image";
    }
    return "?";
}

namespace {

// Base point sets as real progressions x0 + k*step, k < count.
struct RealProg {
    double x0;
    double step;
    std::int64_t count;
};

std::vector<RealProg> base_points(FixtureKind kind, double theta, int n_max)
{
    std::vector<RealProg> out;
    const double top = shell_outer(n_max);
    switch (kind) {
    case FixtureKind::naturals:
        out.push_back({1.0, 1.0, std::int64_t(std::ceil(top)) - 1});
        break;
    case FixtureKind::exp_naturals:
        for (int k = 1; k <= n_max; ++k)
            out.push_back({std::exp(double(k)), 1.0, 1});
        break;
    case FixtureKind::skeleton: {
        const auto sk = build_skeleton(theta, n_max, 1);
        for (int n = sk.start_shell; n <= n_max; ++n) {
            const auto ax = sk.axis(n);
            if (ax.count > 0)
                out.push_back({double(ax.first), double(ax.step), ax.count});
        }
        break;
    }
    default:
        throw InputError("affine_image: unsupported base kind " + to_string(kind));
    }
    return out;
}

bool is_integer(double x) { return std::floor(x) == x && std::abs(x) < 9.0e15; }

}  // namespace

PixelSet fixture_set(const FixtureSpec& spec, int n_min, int n_max)
{
    if (n_min < 0 || n_max < n_min)
        throw InputError("fixture_set: bad shell range");
    if (n_max > kMaxShell)
        throw InputError("fixture_set: n_max beyond " + std::to_string(kMaxShell));
    if (spec.d != 1 && spec.d != 2)
        throw InputError("fixture_set: d must be 1 or 2");
    PixelSetBuilder b(spec.d, 1.0);
    auto in_range = [&](double x) {
        const int n = shell_of(x);
        return n >= n_min && n <= n_max;
    };
    switch (spec.kind) {
    case FixtureKind::naturals:
        for (int n = std::max(1, n_min); n <= n_max; ++n) {
            const auto rg = shell_cell_range(n, 1.0);
            b.add_run(std::max<std::int64_t>(1, rg.lo), rg.hi);
        }
        break;
    case FixtureKind::exp_naturals:
        for (int k = 1; k <= n_max + 1; ++k) {
            const double z = std::floor(std::exp(double(k)));
            if (in_range(z))
                b.add_cell(std::int64_t(z));
        }
        break;
    case FixtureKind::full_lattice:
        if (spec.d == 1) {
            for (int n = n_min; n <= n_max; ++n) {
                const auto rg = shell_cell_range(n, 1.0);
                b.add_run(rg.lo, rg.hi);
                // mirror: corners in [-e^n, -e^{n-1}) or [-1, 0) for shell 0
                const auto lo = std::int64_t(std::ceil(-shell_outer(n)));
                const auto hi = n == 0 ? std::int64_t(-1)
                                       : std::int64_t(std::ceil(-shell_inner(n))) - 1;
                b.add_run(lo, hi);
            }
        } else {
            const auto lo = std::int64_t(std::ceil(-shell_outer(n_max)));
            const auto hi = std::int64_t(std::ceil(shell_outer(n_max))) - 1;
            if ((hi - lo + 1) * (hi - lo + 1) > kMaxEnumeratedCells)
                throw ResourceError("fixture_set: full lattice in d = 2 too large");
            for (std::int64_t i = lo; i <= hi; ++i)
                for (std::int64_t j = lo; j <= hi; ++j) {
                    const int n = shell_of(Point{double(i), double(j)}, 2);
                    if (n >= n_min && n <= n_max)
                        b.add_cell(Cell2{i, j});
                }
        }
        break;
    case FixtureKind::skeleton: {
        const auto sk = build_skeleton(spec.theta, std::max(n_max, 1), spec.d);
        for (int n = std::max(n_min, sk.start_shell); n <= n_max; ++n) {
            const auto ax = sk.axis(n);
            if (spec.d == 1) {
                b.add_progression(ax.first, ax.step, ax.count);
                continue;
            }
            for (const auto& pt : sk.points(n))
                b.add_cell(Cell2{std::int64_t(pt[0]), std::int64_t(pt[1])});
        }
        break;
    }
    case FixtureKind::affine_image: {
        if (spec.d != 1)
            throw InputError("affine_image: only d = 1");
        if (!(spec.q >= 1.0))
            throw InputError("affine_image: scale q must be at least 1");
        if (spec.base == FixtureKind::affine_image || spec.base == FixtureKind::full_lattice)
            throw InputError("affine_image: unsupported base kind");
        const auto first_cell = shell_cell_range(n_min, 1.0).lo;
        const auto last_cell = shell_cell_range(n_max, 1.0).hi;
        // base points whose image can land at or below the last cell
        int base_top = 1;
        while (base_top < kMaxShell && spec.q * shell_outer(base_top) + spec.s <= double(last_cell) + 1)
            ++base_top;
        for (const auto& bp : base_points(spec.base, spec.base_theta, base_top)) {
            const double x0 = spec.q * bp.x0 + spec.s, step = spec.q * bp.step;
            if (is_integer(x0) && is_integer(step)) {
                auto k0 = std::int64_t(0);
                if (x0 < double(first_cell))
                    k0 = std::int64_t(std::ceil((double(first_cell) - x0) / step));
                auto k1 = bp.count - 1;
                if (x0 + double(k1) * step > double(last_cell))
                    k1 = std::int64_t(std::floor((double(last_cell) - x0) / step));
                if (k1 >= k0)
                    b.add_progression(std::int64_t(x0) + k0 * std::int64_t(step),
                                      std::int64_t(step), k1 - k0 + 1);
                continue;
            }
            if (bp.count > kMaxEnumeratedCells)
                throw ResourceError("affine_image: non-integral image too large to enumerate");
            for (std::int64_t k = 0; k < bp.count; ++k) {
                const double z = std::floor(x0 + double(k) * step);
                if (z >= double(first_cell) && z <= double(last_cell))
                    b.add_cell(std::int64_t(z));
            }
        }
        break;
    }
    }
    return b.build();
}

}  // namespace macrodim

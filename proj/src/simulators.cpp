#include "macrodim/simulators.hpp"

#include "fft.hpp"
#include "macrodim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace macrodim {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 4> kGlNode{0.1834346424956498, 0.5255324099163290,
                                        0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeight{0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(double a, double b, const F& f)
{
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNode.size(); ++i)
        s += kGlWeight[i] * (f(mid - half * kGlNode[i]) + f(mid + half * kGlNode[i]));
    return s * half;
}

void require_step(double t_max, double dt)
{
    if (!(dt > 0) || !std::isfinite(dt))
        throw InputError("step must be positive");
    if (!(t_max > dt) || !std::isfinite(t_max))
        throw InputError("horizon must exceed the step");
}

}  // namespace

std::size_t grid_points(double t_max, double dt)
{
    require_step(t_max, dt);
    const double n = std::floor(t_max / dt + 1e-9) + 1.0;
    if (n > double(kMaxSamples))
        throw ResourceError("trajectory needs " + fmt(n) + " samples, budget is " +
                            std::to_string(kMaxSamples));
    return std::size_t(n);
}

TrajectoryGrid simulate_bm(double t_max, double dt, Rng& rng)
{
    TrajectoryGrid g;
    g.step = dt;
    g.model = "bm";
    g.values.resize(grid_points(t_max, dt));
    const double s = std::sqrt(dt);
    double b = 0.0;
    g.values[0] = 0.0;
    for (std::size_t i = 1; i < g.values.size(); ++i) {
        b += s * rng.normal();
        g.values[i] = b;
    }
    return g;
}

TrajectoryGrid simulate_ou(double t_max, double dt, Rng& rng)
{
    TrajectoryGrid g;
    g.step = dt;
    g.model = "ou";
    g.values.resize(grid_points(t_max, dt));
    const double rho = std::exp(-0.5 * dt), s = std::sqrt(-std::expm1(-dt));
    double u = rng.normal();
    g.values[0] = u;
    for (std::size_t i = 1; i < g.values.size(); ++i) {
        u = rho * u + s * rng.normal();
        g.values[i] = u;
    }
    return g;
}

double ou_running_max(double length, double dt, Rng& rng)
{
    const std::size_t n = grid_points(length, dt);
    const double rho = std::exp(-0.5 * dt), s = std::sqrt(-std::expm1(-dt));
    double u = rng.normal(), m = u;
    for (std::size_t i = 1; i < n; ++i) {
        u = rho * u + s * rng.normal();
        m = std::max(m, u);
    }
    return m;
}

double linear_she_covariance(double t, double x)
{
    if (!(t > 0))
        throw InputError("linear SHE: t must be positive");
    x = std::abs(x);
    return std::sqrt(t / kPi) * std::exp(-x * x / (4.0 * t)) -
           0.5 * x * std::erfc(x / (2.0 * std::sqrt(t)));
}

double linear_she_spectral_density(double t, double xi)
{
    if (!(t > 0))
        throw InputError("linear SHE: t must be positive");
    const double v = t * xi * xi;
    if (v < 1e-8)
        return t * (1.0 - 0.5 * v) / (2.0 * kPi);
    return -std::expm1(-v) / (2.0 * kPi * xi * xi);
}

LinearSheSampler::LinearSheSampler(double t, double x_max, double dx) : t_(t), dx_(dx)
{
    if (!(t > 0))
        throw InputError("linear SHE: t must be positive");
    if (!(dx > 0) || !(x_max > dx))
        throw InputError("linear SHE: need 0 < dx < x_max");
    points_ = grid_points(x_max, dx);
    const auto pad = std::size_t(std::ceil(10.0 * std::sqrt(t) / dx));
    n_ = 1;
    while (n_ < 2 * (points_ + pad))
        n_ *= 2;
    if (n_ > std::size_t(kMaxSamples))
        throw ResourceError("linear SHE: embedding of size " + std::to_string(n_) +
                            " exceeds the budget");
    detail::RealFft fft(n_, 1);
    auto row = fft.real();
    for (std::size_t k = 0; k < n_; ++k)
        row[k] = linear_she_covariance(t, double(std::min(k, n_ - k)) * dx);
    fft.forward();
    const auto spec = fft.spectrum();
    sqrt_eig_.resize(n_);
    double top = 0.0, low = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        const double lam = spec[k <= n_ / 2 ? k : n_ - k].real();
        top = std::max(top, lam);
        low = std::min(low, lam);
        sqrt_eig_[k] = std::sqrt(std::max(lam, 0.0) / double(n_));
    }
    clipped_ = top > 0 ? -low / top : 0.0;
}

std::pair<Field, Field> LinearSheSampler::sample_pair(Rng& rng) const
{
    detail::ComplexFft fft(n_);
    auto buf = fft.data();
    for (std::size_t k = 0; k < n_; ++k) {
        const double a = rng.normal(), b = rng.normal();
        buf[k] = {sqrt_eig_[k] * a, sqrt_eig_[k] * b};
    }
    fft.forward();
    Field re, im;
    for (Field* f : {&re, &im}) {
        f->d = 1;
        f->dx = dx_;
        f->t = t_;
        f->nx = points_;
        f->model = "linear_she";
        f->values.resize(points_);
    }
    for (std::size_t i = 0; i < points_; ++i) {
        re.values[i] = buf[i].real();
        im.values[i] = buf[i].imag();
    }
    return {std::move(re), std::move(im)};
}

Field sample_linear_she(double t, double x_max, double dx, Rng& rng)
{
    return LinearSheSampler(t, x_max, dx).sample(rng);
}

WindowedSheSampler::WindowedSheSampler(const WindowedSheSpec& spec) : spec_(spec)
{
    if (!(spec.t > 0))
        throw InputError("windowed SHE: t must be positive");
    if (spec.x.empty())
        throw InputError("windowed SHE: no evaluation points");
    if (!(spec.B > 0) || !(spec.dy > 0) || spec.time_intervals < 2 || !(spec.tau_min > 0) ||
        !(spec.tau_min < spec.t))
        throw InputError("windowed SHE: bad discretization");
    const double half = spec.y_half > 0 ? spec.y_half : 10.0 * std::sqrt(spec.t);
    const double radius = std::sqrt(spec.B * spec.t);
    if (radius > half)
        throw InputError("windowed SHE: window half-width " + fmt(radius) +
                         " exceeds the domain half-width " + fmt(half));
    const auto [xmin, xmax] = std::minmax_element(spec.x.begin(), spec.x.end());
    const double y_lo = *xmin - half;
    n_y_ = std::size_t(std::ceil((*xmax + half - y_lo) / spec.dy));
    n_tau_ = std::size_t(spec.time_intervals);
    if (n_y_ * n_tau_ > std::size_t(kMaxSamples))
        throw ResourceError("windowed SHE: too many noise cells");
    std::vector<double> edges{0.0};
    for (std::size_t k = 0; k < n_tau_; ++k)
        edges.push_back(spec.tau_min *
                        std::pow(spec.t / spec.tau_min, double(k) / double(n_tau_ - 1)));
    edges.back() = spec.t;

    for (double x : spec.x) {
        std::vector<double> w(n_tau_ * n_y_);
        std::vector<char> win(n_tau_ * n_y_);
        double vf = 0, vw = 0, vd = 0;
        for (std::size_t j = 0; j < n_y_; ++j) {
            const double a = y_lo + double(j) * spec.dy, b = a + spec.dy;
            const bool inside = std::abs(a + 0.5 * spec.dy - x) <= radius;
            for (std::size_t k = 0; k < n_tau_; ++k) {
                const double t0 = edges[k], t1 = edges[k + 1];
                const double mass = gauss_legendre(t0, t1, [&](double tau) {
                    const double s = std::sqrt(2.0 * tau);
                    return 0.5 * (std::erf((b - x) / s) - std::erf((a - x) / s));
                });
                const double wt = mass / std::sqrt((t1 - t0) * spec.dy);
                w[k * n_y_ + j] = wt;
                win[k * n_y_ + j] = inside;
                vf += wt * wt;
                (inside ? vw : vd) += wt * wt;
            }
        }
        weights_.push_back(std::move(w));
        in_window_.push_back(std::move(win));
        var_full_.push_back(vf);
        var_win_.push_back(vw);
        var_diff_.push_back(vd);
    }
}

WindowedSheSample WindowedSheSampler::sample(Rng& rng) const
{
    std::vector<double> z(n_tau_ * n_y_);
    rng.fill_normal(z);
    WindowedSheSample out;
    for (std::size_t p = 0; p < weights_.size(); ++p) {
        double full = 0, win = 0;
        const auto& w = weights_[p];
        const auto& in = in_window_[p];
        for (std::size_t c = 0; c < z.size(); ++c) {
            const double v = w[c] * z[c];
            full += v;
            if (in[c])
                win += v;
        }
        out.full.push_back(full);
        out.windowed.push_back(win);
    }
    return out;
}

double SigmaSpec::operator()(double u) const
{
    switch (kind) {
    case SigmaKind::linear:
        return c * u;
    case SigmaKind::clipped_linear:
        return u * std::clamp(std::abs(u), ell, L);
    case SigmaKind::table: {
        const auto& k = knots;
        std::size_t i = 0;
        if (u >= k.back().first)
            i = k.size() - 2;
        else if (u > k.front().first)
            i = std::size_t(std::upper_bound(k.begin(), k.end(), std::make_pair(u, -HUGE_VAL)) -
                            k.begin()) - 1;
        const auto [u0, s0] = k[i];
        const auto [u1, s1] = k[i + 1];
        return s0 + (s1 - s0) * (u - u0) / (u1 - u0);
    }
    }
    return 0.0;
}

double SigmaSpec::rate(double u) const
{
    switch (kind) {
    case SigmaKind::linear:
        return c;
    case SigmaKind::clipped_linear:
        return std::clamp(std::abs(u), ell, L);
    case SigmaKind::table:
        if (u == 0.0) {
            const double e = 1e-9;
            return ((*this)(e) - (*this)(-e)) / (2 * e);
        }
        return (*this)(u) / u;
    }
    return 0.0;
}

namespace {

std::vector<double> table_ratios(const SigmaSpec& s)
{
    std::vector<double> r;
    for (const auto& [u, v] : s.knots)
        if (u != 0.0)
            r.push_back(std::abs(v / u));
    const auto& k = s.knots;
    r.push_back(std::abs((k[1].second - k[0].second) / (k[1].first - k[0].first)));
    const std::size_t m = k.size() - 1;
    r.push_back(std::abs((k[m].second - k[m - 1].second) / (k[m].first - k[m - 1].first)));
    r.push_back(std::abs(s.rate(0.0)));
    return r;
}

}  // namespace

double SigmaSpec::ell_sigma() const
{
    switch (kind) {
    case SigmaKind::linear:
        return std::abs(c);
    case SigmaKind::clipped_linear:
        return ell;
    case SigmaKind::table: {
        const auto r = table_ratios(*this);
        return *std::min_element(r.begin(), r.end());
    }
    }
    return 0.0;
}

double SigmaSpec::L_sigma() const
{
    switch (kind) {
    case SigmaKind::linear:
        return std::abs(c);
    case SigmaKind::clipped_linear:
        return L;
    case SigmaKind::table: {
        const auto r = table_ratios(*this);
        return *std::max_element(r.begin(), r.end());
    }
    }
    return 0.0;
}

void SigmaSpec::validate() const
{
    switch (kind) {
    case SigmaKind::linear:
        if (!std::isfinite(c))
            throw InputError("sigma: c must be finite");
        break;
    case SigmaKind::clipped_linear:
        if (!(ell > 0) || !(L >= ell) || !std::isfinite(L))
            throw InputError("sigma: clipped_linear needs 0 < ell <= L");
        break;
    case SigmaKind::table:
        if (knots.size() < 2)
            throw InputError("sigma: table needs at least two knots");
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i].first > knots[i - 1].first))
                throw InputError("sigma: table knots must be strictly increasing in u");
        if (std::abs((*this)(0.0)) > 1e-12)
            throw InputError("sigma(0) must be 0, got " + fmt((*this)(0.0)));
        break;
    }
}

std::string SigmaSpec::describe() const
{
    switch (kind) {
    case SigmaKind::linear:
        return "linear:c=" + fmt(c);
    case SigmaKind::clipped_linear:
        return "clipped_linear:ell=" + fmt(ell) + ",L=" + fmt(L);
    case SigmaKind::table: {
        std::string s = "table:";
        for (std::size_t i = 0; i < knots.size(); ++i)
            s += (i ? ";" : "") + fmt(knots[i].first) + ":" + fmt(knots[i].second);
        return s;
    }
    }
    return "?";
}

namespace {

double parse_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError(what + ": '" + s + "' is not a number");
    }
    if (used != s.size())
        throw InputError(what + ": '" + s + "' is not a number");
    return v;
}

// "name:k=v,k=v" -> name and pairs
std::pair<std::string, std::vector<std::pair<std::string, std::string>>>
split_spec(const std::string& s)
{
    const auto colon = s.find(':');
    std::pair<std::string, std::vector<std::pair<std::string, std::string>>> out;
    out.first = s.substr(0, colon);
    if (colon == std::string::npos)
        return out;
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InputError("expected key=value in '" + s + "'");
        out.second.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

}  // namespace

SigmaSpec parse_sigma(const std::string& s)
{
    SigmaSpec out;
    if (s == "zero") {
        out.c = 0.0;
        return out;
    }
    if (s.rfind("table:", 0) == 0) {
        out.kind = SigmaKind::table;
        std::stringstream ss(s.substr(6));
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto c = item.find(':');
            if (c == std::string::npos)
                throw InputError("sigma table: expected u:value in '" + item + "'");
            out.knots.emplace_back(parse_number(item.substr(0, c), "sigma table"),
                                   parse_number(item.substr(c + 1), "sigma table"));
        }
        out.validate();
        return out;
    }
    const auto [name, kv] = split_spec(s);
    if (name == "linear") {
        for (const auto& [k, v] : kv) {
            if (k != "c")
                throw InputError("sigma linear: unknown parameter '" + k + "'");
            out.c = parse_number(v, "sigma c");
        }
    } else if (name == "clipped_linear") {
        out.kind = SigmaKind::clipped_linear;
        for (const auto& [k, v] : kv) {
            if (k == "ell")
                out.ell = parse_number(v, "sigma ell");
            else if (k == "L")
                out.L = parse_number(v, "sigma L");
            else
                throw InputError("sigma clipped_linear: unknown parameter '" + k + "'");
        }
    } else {
        throw InputError("unknown sigma '" + name + "'");
    }
    out.validate();
    return out;
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "explicit_euler")
        return Scheme::explicit_euler;
    if (s == "exp_multiplicative")
        return Scheme::exp_multiplicative;
    throw InputError("unknown scheme '" + s + "'");
}

std::string to_string(Scheme s)
{
    return s == Scheme::explicit_euler ? "explicit_euler" : "exp_multiplicative";
}

namespace {

std::size_t steps_for(double t_end, double dt) { return std::size_t(std::ceil(t_end / dt - 1e-9)); }

std::vector<std::size_t> snapshot_steps(const std::vector<double>& times, double t_end,
                                        double dt_eff)
{
    std::vector<std::size_t> out;
    if (times.empty()) {
        out.push_back(steps_for(t_end, dt_eff));
        return out;
    }
    for (double s : times)
        out.push_back(std::max<std::size_t>(1, std::size_t(std::llround(s / dt_eff))));
    return out;
}

void check_snapshots(const std::vector<double>& times, double t_end)
{
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0) || times[i] > t_end * (1 + 1e-12))
            throw InputError("snapshot times must lie in (0, t_end]");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw InputError("snapshot times must be increasing");
    }
}

}  // namespace

void validate(const SheSpec& s)
{
    if (!(s.dx > 0) || !(s.dt > 0))
        throw InputError("she: dt and dx must be positive");
    const double limit = s.dx * s.dx / 2.0;
    if (s.dt > limit * (1 + 1e-12))
        throw InputError("she: stability requires dt <= dx^2/2 = " + fmt(limit) + ", got " +
                         fmt(s.dt));
    if (!(s.t_end > 0))
        throw InputError("she: t_end must be positive");
    if (!(s.x_max >= 3 * s.dx))
        throw InputError("she: domain needs at least 3 sites");
    if (s.x_max / s.dx > double(kMaxSamples))
        throw ResourceError("she: grid of " + fmt(std::round(s.x_max / s.dx)) +
                            " sites exceeds the budget");
    s.sigma.validate();
    check_snapshots(s.snapshots, s.t_end);
    if (s.window && !(s.window->first < s.window->second))
        throw InputError("she: window must satisfy a < b");
}

SheResult solve_she_1d(const SheSpec& spec, Rng& rng)
{
    validate(spec);
    const std::size_t nx = std::size_t(std::llround(spec.x_max / spec.dx));
    SheResult res;
    res.steps = steps_for(spec.t_end, spec.dt);
    res.dt = spec.t_end / double(res.steps);
    const double dt = res.dt;
    const double lambda = dt / (2 * spec.dx * spec.dx);
    const double a = std::sqrt(dt / spec.dx), b = dt / (2 * spec.dx);
    const auto snaps = snapshot_steps(spec.snapshots, spec.t_end, dt);

    std::vector<char> mask;
    if (spec.window) {
        mask.resize(nx);
        for (std::size_t j = 0; j < nx; ++j) {
            const double x = double(j) * spec.dx;
            mask[j] = x >= spec.window->first && x <= spec.window->second;
        }
    }
    std::vector<double> u(nx, 1.0), next(nx), z(nx);
    const auto& sigma = spec.sigma;
    auto rate = [&sigma](double v) { return sigma.rate(v); };
    auto sig = [&sigma](double v) { return sigma(v); };
    std::size_t snap_i = 0;
    for (std::size_t m = 1; m <= res.steps; ++m) {
        kernels::heat_step_1d(u, next, lambda, spec.exec);
        rng.fill_normal(z);
        if (!mask.empty())
            for (std::size_t j = 0; j < nx; ++j)
                if (!mask[j])
                    z[j] = 0.0;
        if (spec.scheme == Scheme::explicit_euler) {
            kernels::euler_noise(u, next, z, a, sig, spec.exec);
            std::size_t neg = 0;
            for (double v : next)
                neg += v < 0;
            res.negative_fraction = std::max(res.negative_fraction, double(neg) / double(nx));
            u.swap(next);
        } else {
            u.swap(next);
            kernels::multiplicative_update(u, z, a, b, rate, spec.exec);
            for (double v : u)
                if (!(v > 0))
                    throw DomainError("she: positivity lost at step " + std::to_string(m));
        }
        while (snap_i < snaps.size() && snaps[snap_i] == m) {
            Field f;
            f.d = 1;
            f.dx = spec.dx;
            f.t = double(m) * dt;
            f.nx = nx;
            f.values = u;
            f.model = "she_1d:" + sigma.describe();
            res.snapshots.push_back(std::move(f));
            ++snap_i;
        }
    }
    return res;
}

double BumpSpec::h(double r2) const
{
    if (r2 > trunc * trunc * w * w)
        return 0.0;
    return A * std::exp(-r2 / (2 * w * w));
}

double BumpSpec::f(double r2, int d) const
{
    return A * A * std::pow(kPi * w * w, 0.5 * d) * std::exp(-r2 / (4 * w * w));
}

BumpSpec parse_bump(const std::string& s)
{
    const auto [name, kv] = split_spec(s);
    if (name != "gaussian")
        throw InputError("unknown noise kernel '" + name + "'");
    BumpSpec b;
    for (const auto& [k, v] : kv) {
        if (k == "A")
            b.A = parse_number(v, "kernel A");
        else if (k == "w")
            b.w = parse_number(v, "kernel w");
        else if (k == "trunc")
            b.trunc = parse_number(v, "kernel trunc");
        else
            throw InputError("kernel: unknown parameter '" + k + "'");
    }
    if (!(b.A > 0) || !(b.w > 0) || !(b.trunc > 0))
        throw InputError("kernel: A, w, trunc must be positive");
    return b;
}

void validate(const ColoredSpec& s)
{
    if (s.d != 1 && s.d != 2)
        throw InputError("colored PAM: d must be 1 or 2");
    if (!(s.dx > 0) || !(s.dt > 0))
        throw InputError("colored PAM: dt and dx must be positive");
    const double limit = s.dx * s.dx / (2.0 * s.d);
    if (s.dt > limit * (1 + 1e-12))
        throw InputError("colored PAM: stability requires dt <= dx^2/(2d) = " + fmt(limit) +
                         ", got " + fmt(s.dt));
    if (!(s.t_end > 0))
        throw InputError("colored PAM: t_end must be positive");
    if (!(s.bump.A > 0) || !(s.bump.w > 0) || !(s.bump.trunc > 0))
        throw InputError("colored PAM: bad kernel");
    if (!(2 * s.bump.trunc * s.bump.w < s.extent))
        throw InputError("colored PAM: kernel support does not fit in the periodic box");
    const double n = std::round(s.extent / s.dx);
    if (n < 3)
        throw InputError("colored PAM: box needs at least 3 sites per axis");
    if (std::pow(n, s.d) > double(kMaxSamples))
        throw ResourceError("colored PAM: grid exceeds the budget");
    check_snapshots(s.snapshots, s.t_end);
    if (s.window && !(s.window->first < s.window->second))
        throw InputError("colored PAM: window must satisfy lo < hi");
}

ColoredPam::ColoredPam(const ColoredSpec& spec) : spec_(spec)
{
    validate(spec);
    n_ = std::size_t(std::llround(spec.extent / spec.dx));
    const std::size_t ny = spec.d == 2 ? n_ : 1;
    detail::RealFft fft(n_, ny);
    auto h = fft.real();
    auto offset = [&](std::size_t i) {
        const double o = i <= n_ / 2 ? double(i) : double(i) - double(n_);
        return o * spec.dx;
    };
    double norm = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double x = offset(i), y = spec.d == 2 ? offset(j) : 0.0;
            const double v = spec.bump.h(x * x + y * y);
            h[i * ny + j] = v;
            norm += v * v;
        }
    f0_disc_ = norm * std::pow(spec.dx, spec.d);
    fft.forward();
    kernel_hat_.assign(fft.spectrum().begin(), fft.spectrum().end());
}

std::vector<double> ColoredPam::noise_field(Rng& rng) const
{
    const std::size_t ny = spec_.d == 2 ? n_ : 1;
    detail::RealFft fft(n_, ny);
    auto w = fft.real();
    rng.fill_normal(w);
    fft.forward();
    auto spec = fft.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k)
        spec[k] *= kernel_hat_[k];
    fft.inverse();
    const double scale = std::pow(spec_.dx, 0.5 * spec_.d) / double(n_ * ny);
    std::vector<double> out(w.begin(), w.end());
    for (double& v : out)
        v *= scale;
    return out;
}

ColoredResult ColoredPam::solve(Rng& rng) const
{
    const int d = spec_.d;
    const std::size_t ny = d == 2 ? n_ : 1, cells = n_ * ny;
    ColoredResult res;
    res.f0 = spec_.bump.f0(d);
    res.f0_discrete = f0_disc_;
    res.steps = steps_for(spec_.t_end, spec_.dt);
    res.dt = spec_.t_end / double(res.steps);
    const double dt = res.dt, lambda = dt / (2 * spec_.dx * spec_.dx);
    const double a = std::sqrt(dt), b = 0.5 * f0_disc_ * dt;
    const auto snaps = snapshot_steps(spec_.snapshots, spec_.t_end, dt);

    std::vector<char> mask;
    if (spec_.window) {
        mask.resize(cells);
        auto in = [&](std::size_t i) {
            const double x = double(i) * spec_.dx;
            return x >= spec_.window->first && x <= spec_.window->second;
        };
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < ny; ++j)
                mask[i * ny + j] = in(i) && (d == 1 || in(j));
    }

    std::vector<double> u(cells, 1.0), next(cells);
    std::size_t snap_i = 0;
    for (std::size_t m = 1; m <= res.steps; ++m) {
        if (d == 1)
            kernels::heat_step_1d(u, next, lambda, spec_.exec);
        else
            kernels::heat_step_2d(u, next, n_, n_, lambda, spec_.exec);
        u.swap(next);
        auto eta = noise_field(rng);
        if (mask.empty()) {
            kernels::multiplicative_update(u, eta, a, b, [](double) { return 1.0; }, spec_.exec);
        } else {
            for (std::size_t c = 0; c < cells; ++c)
                if (mask[c])
                    u[c] *= std::exp(a * eta[c] - b);
        }
        for (double v : u)
            if (!(v > 0))
                throw DomainError("colored PAM: positivity lost at step " + std::to_string(m));
        while (snap_i < snaps.size() && snaps[snap_i] == m) {
            Field f;
            f.d = d;
            f.dx = spec_.dx;
            f.t = double(m) * dt;
            f.nx = n_;
            f.ny = ny;
            f.values = u;
            f.model = "pam_colored";
            res.snapshots.push_back(std::move(f));
            ++snap_i;
        }
    }
    return res;
}

ColoredResult solve_pam_colored(const ColoredSpec& spec, Rng& rng)
{
    return ColoredPam(spec).solve(rng);
}

void write_field_csv(std::ostream& os, const Field& f, std::uint64_t seed)
{
    os << "# model=" << f.model << " t=" << fmt(f.t) << " dx=" << fmt(f.dx) << " seed=" << seed
       << "\n";
    if (f.d == 1) {
        os << "x,value\n";
        for (std::size_t i = 0; i < f.nx; ++i)
            os << fmt(f.coord(i)) << ',' << fmt(f.values[i]) << '\n';
        return;
    }
    os << "x,y,value\n";
    for (std::size_t i = 0; i < f.nx; ++i)
        for (std::size_t j = 0; j < f.ny; ++j)
            os << fmt(f.coord(i)) << ',' << fmt(f.coord(j)) << ',' << fmt(f.values[i * f.ny + j])
               << '\n';
}

void write_trajectory_csv(std::ostream& os, const TrajectoryGrid& g)
{
    os << "t,value\n";
    for (std::size_t i = 0; i < g.values.size(); ++i)
        os << fmt(g.time(i)) << ',' << fmt(g.values[i]) << '\n';
}

}  // namespace macrodim

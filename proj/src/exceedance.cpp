#include "macrodim/exceedance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace macrodim {

GaugeKind parse_gauge_kind(const std::string& s)
{
    if (s == "bm_lil")
        return GaugeKind::bm_lil;
    if (s == "sqrt_log")
        return GaugeKind::sqrt_log;
    if (s == "log_two_thirds")
        return GaugeKind::log_two_thirds;
    if (s == "sqrt_log_colored")
        return GaugeKind::sqrt_log_colored;
    throw InputError("unknown gauge '" + s + "'");
}

std::string to_string(GaugeKind k)
{
    switch (k) {
    case GaugeKind::bm_lil:
        return "bm_lil";
    case GaugeKind::sqrt_log:
        return "sqrt_log";
    case GaugeKind::log_two_thirds:
        return "log_two_thirds";
    case GaugeKind::sqrt_log_colored:
        return "sqrt_log_colored";
    }
    return "?";
}

double GaugeSpec::start_abscissa() const
{
    if (start > 0)
        return start;
    // sqrt_log needs log x >= 1 only; the rest start where log log x >= 0 comfortably
    return kind == GaugeKind::sqrt_log ? std::numbers::e : std::exp(std::numbers::e);
}

double gauge_eval(const GaugeSpec& g, double x)
{
    if (!(g.norm > 0))
        throw InputError("gauge normalization must be positive");
    if (!(x >= g.start_abscissa()))
        throw DomainError("gauge " + to_string(g.kind) + " evaluated at " + fmt(x) +
                          " below its start " + fmt(g.start_abscissa()));
    const double lx = std::log(x);
    switch (g.kind) {
    case GaugeKind::bm_lil:
        return g.norm * std::sqrt(2.0 * x * std::log(lx));
    case GaugeKind::sqrt_log:
        return g.norm * std::sqrt(2.0 * lx);
    case GaugeKind::log_two_thirds:
        return g.norm * std::pow(lx, 2.0 / 3.0);
    case GaugeKind::sqrt_log_colored:
        return g.norm * std::sqrt(lx);
    }
    return 0.0;
}

Transform parse_transform(const std::string& s)
{
    if (s == "identity")
        return Transform::identity;
    if (s == "log")
        return Transform::log;
    if (s == "signed")
        return Transform::signed_value;
    throw InputError("unknown transform '" + s + "'");
}

std::string to_string(Transform t)
{
    switch (t) {
    case Transform::identity:
        return "identity";
    case Transform::log:
        return "log";
    case Transform::signed_value:
        return "signed";
    }
    return "?";
}

namespace {

double apply(Transform tr, double v)
{
    if (tr == Transform::log)
        return v > 0 ? std::log(v) : -HUGE_VAL;
    return v;
}

void check_levels(std::span<const double> gammas)
{
    if (gammas.empty())
        throw InputError("exceedance: no levels");
    for (double g : gammas)
        if (!(g > 0) || !std::isfinite(g))
            throw InputError("exceedance: gamma must be positive, got " + fmt(g));
}

// Accumulates increasing 1-D cells into runs.
class RunSink {
public:
    void mark(std::int64_t z)
    {
        if (open_ && z <= hi_ + 1) {
            hi_ = std::max(hi_, z);
            return;
        }
        flush();
        lo_ = hi_ = z;
        open_ = true;
    }
    PixelSet finish()
    {
        flush();
        return b_.build();
    }

private:
    void flush()
    {
        if (open_)
            b_.add_run(lo_, hi_);
        open_ = false;
    }
    PixelSetBuilder b_{1, 1.0};
    bool open_ = false;
    std::int64_t lo_ = 0, hi_ = 0;
};

std::vector<PixelSet> levels_1d(double x0, double step, std::span<const double> v,
                                const GaugeSpec& gauge, std::span<const double> gammas,
                                Transform tr, Rng* bridge, ExceedanceInfo* info)
{
    check_levels(gammas);
    if (!(step > 0) || step > 1.0)
        throw InputError("exceedance: grid step must be in (0, 1], got " + fmt(step));
    if (bridge && tr == Transform::log)
        throw InputError("exceedance: the bridge correction applies to untransformed paths");
    const double start = gauge.start_abscissa();
    std::vector<RunSink> sinks(gammas.size());
    ExceedanceInfo local;
    const std::size_t n = v.size();
    double g_here = 0.0;
    bool have_g = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x0 + double(i) * step;
        if (x < start)
            continue;
        ++local.samples_used;
        if (!have_g)
            g_here = gauge_eval(gauge, x);
        const double y = apply(tr, v[i]);
        const auto z = std::int64_t(std::floor(x));
        for (std::size_t k = 0; k < gammas.size(); ++k)
            if (y >= gammas[k] * g_here)
                sinks[k].mark(z);
        have_g = false;
        if (bridge && i + 1 < n) {
            const double g_next = gauge_eval(gauge, x + step);
            const double y_next = apply(tr, v[i + 1]);
            const double u = bridge->uniform();
            for (std::size_t k = 0; k < gammas.size(); ++k) {
                const double a = gammas[k] * std::max(g_here, g_next);
                if (y < a && y_next < a &&
                    u < std::exp(-2.0 * (a - y) * (a - y_next) / step)) {
                    sinks[k].mark(z);
                    ++local.bridge_crossings;
                }
            }
            g_here = g_next;
            have_g = true;
        }
    }
    local.all_below_start = local.samples_used == 0;
    if (info)
        *info = local;
    std::vector<PixelSet> out;
    for (auto& s : sinks)
        out.push_back(s.finish());
    return out;
}

std::vector<PixelSet> levels_2d(const Field& f, const GaugeSpec& gauge,
                                std::span<const double> gammas, Transform tr,
                                ExceedanceInfo* info)
{
    check_levels(gammas);
    if (!(f.dx > 0) || f.dx > 1.0)
        throw InputError("exceedance: grid step must be in (0, 1], got " + fmt(f.dx));
    const double start = gauge.start_abscissa();
    std::vector<PixelSetBuilder> builders(gammas.size(), PixelSetBuilder(2, 1.0));
    ExceedanceInfo local;
    for (std::size_t i = 0; i < f.nx; ++i)
        for (std::size_t j = 0; j < f.ny; ++j) {
            const double x = f.coord(i), y = f.coord(j);
            const double r = std::max(std::abs(x), std::abs(y));
            if (r < start)
                continue;
            ++local.samples_used;
            const double g = gauge_eval(gauge, r);
            const double val = apply(tr, f.values[i * f.ny + j]);
            const Cell2 c{std::int64_t(std::floor(x)), std::int64_t(std::floor(y))};
            for (std::size_t k = 0; k < gammas.size(); ++k)
                if (val >= gammas[k] * g)
                    builders[k].add_cell(c);
        }
    local.all_below_start = local.samples_used == 0;
    if (info)
        *info = local;
    std::vector<PixelSet> out;
    for (auto& b : builders)
        out.push_back(b.build());
    return out;
}

}  // namespace

PixelSet exceedance_pixels(const TrajectoryGrid& data, const ExceedanceSpec& spec, Transform tr,
                           Rng* bridge, ExceedanceInfo* info)
{
    const double g[1] = {spec.gamma};
    return std::move(
        levels_1d(data.t0, data.step, data.values, spec.gauge, g, tr, bridge, info).front());
}

PixelSet exceedance_pixels(const Field& data, const ExceedanceSpec& spec, Transform tr,
                           ExceedanceInfo* info)
{
    const double g[1] = {spec.gamma};
    if (data.d == 2)
        return std::move(levels_2d(data, spec.gauge, g, tr, info).front());
    return std::move(
        levels_1d(data.x0, data.dx, data.values, spec.gauge, g, tr, nullptr, info).front());
}

std::vector<PixelSet> exceedance_levels(const TrajectoryGrid& data, const GaugeSpec& gauge,
                                        std::span<const double> gammas, Transform tr,
                                        Rng* bridge)
{
    return levels_1d(data.t0, data.step, data.values, gauge, gammas, tr, bridge, nullptr);
}

std::vector<PixelSet> exceedance_levels(const Field& data, const GaugeSpec& gauge,
                                        std::span<const double> gammas, Transform tr)
{
    if (data.d == 2)
        return levels_2d(data, gauge, gammas, tr, nullptr);
    return levels_1d(data.x0, data.dx, data.values, gauge, gammas, tr, nullptr, nullptr);
}

}  // namespace macrodim

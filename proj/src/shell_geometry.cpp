#include "macrodim/shell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace macrodim {

namespace {

bool in_v(double x, int n)
{
    const double e = std::exp(double(n));
    return x >= -e && x < e;
}

// Largest z' >= z whose corner lies in the same shell as the corner of z.
std::int64_t last_same_shell(std::int64_t z, double r)
{
    const double x = r * double(z);
    const int n = shell_of(x);
    double bound;
    if (x >= 0 || n == 0)
        bound = std::exp(double(n));
    else
        bound = -std::exp(double(n - 1));
    auto c = static_cast<std::int64_t>(std::ceil(bound / r)) - 1;
    c = std::max(c, z);
    while (shell_of(r * double(c + 1)) == n)
        ++c;
    while (c > z && shell_of(r * double(c)) != n)
        --c;
    return c;
}

std::vector<CellRun> merge_runs(std::vector<CellRun> runs)
{
    std::sort(runs.begin(), runs.end(),
              [](const CellRun& a, const CellRun& b) { return a.lo < b.lo; });
    std::vector<CellRun> out;
    for (const auto& run : runs) {
        if (!out.empty() && run.lo <= out.back().hi + 1)
            out.back().hi = std::max(out.back().hi, run.hi);
        else
            out.push_back(run);
    }
    return out;
}

// Singleton runs with a common gap become a progression.
void canonicalize(ShellCells& sc)
{
    if (sc.progression || sc.runs.size() < 3)
        return;
    for (const auto& run : sc.runs)
        if (run.lo != run.hi)
            return;
    const std::int64_t step = sc.runs[1].lo - sc.runs[0].lo;
    for (std::size_t i = 1; i < sc.runs.size(); ++i)
        if (sc.runs[i].lo - sc.runs[i - 1].lo != step)
            return;
    sc.progression = Progression{sc.runs.front().lo, step, std::int64_t(sc.runs.size())};
    sc.runs.clear();
}

void expand_into(std::vector<CellRun>& out, const Progression& p)
{
    if (std::int64_t(out.size()) + p.count > kMaxEnumeratedCells)
        throw ResourceError("progression too large to expand: " + std::to_string(p.count) +
                            " cells");
    for (std::int64_t k = 0; k < p.count; ++k) {
        const std::int64_t z = p.first + k * p.step;
        out.push_back({z, z});
    }
}

}  // namespace

int shell_of(double x)
{
    if (!std::isfinite(x))
        throw InputError("shell_of: non-finite coordinate");
    if (in_v(x, 0))
        return 0;
    int n = std::max(1, int(std::ceil(std::log(std::abs(x)))));
    while (n > 0 && in_v(x, n - 1))
        --n;
    while (!in_v(x, n))
        ++n;
    return n;
}

int shell_of(std::span<const double> x)
{
    int n = 0;
    for (double v : x)
        n = std::max(n, shell_of(v));
    return n;
}

int shell_of(const Point& x, int d)
{
    return shell_of(std::span<const double>(x.data(), std::size_t(d)));
}

double shell_outer(int n) { return std::exp(double(n)); }

double shell_inner(int n) { return n == 0 ? 0.0 : std::exp(double(n - 1)); }

bool UprightBox::contains(const Point& x) const
{
    for (int i = 0; i < d; ++i)
        if (!(x[i] >= corner[i] && x[i] < corner[i] + side))
            return false;
    return true;
}

bool UprightBox::meets_cell(std::int64_t z, double r) const
{
    const double lo = r * double(z);
    return lo < corner[0] + side && lo + r > corner[0];
}

bool UprightBox::meets_cell(const Cell2& z, double r) const
{
    for (int i = 0; i < 2; ++i) {
        const double lo = r * double(z[i]);
        if (!(lo < corner[i] + side && lo + r > corner[i]))
            return false;
    }
    return true;
}

std::int64_t ShellCells::count() const
{
    if (progression)
        return progression->count;
    if (!cells2.empty())
        return std::int64_t(cells2.size());
    std::int64_t c = 0;
    for (const auto& run : runs)
        c += run.size();
    return c;
}

PixelSet::PixelSet(int d, double resolution) : d_(d), r_(resolution)
{
    if (d != 1 && d != 2)
        throw InputError("PixelSet: dimension must be 1 or 2");
    if (!(resolution > 0) || !std::isfinite(resolution))
        throw InputError("PixelSet: resolution must be positive");
}

const ShellCells* PixelSet::shell(int n) const
{
    auto it = shells_.find(n);
    return it == shells_.end() ? nullptr : &it->second;
}

std::int64_t PixelSet::count(int n) const
{
    const auto* sc = shell(n);
    return sc ? sc->count() : 0;
}

std::int64_t PixelSet::total_count() const
{
    std::int64_t c = 0;
    for (const auto& [n, sc] : shells_)
        c += sc.count();
    return c;
}

bool PixelSet::contains(std::int64_t z) const
{
    if (d_ != 1)
        throw InputError("contains: dimension mismatch");
    const auto* sc = shell(shell_of(r_ * double(z)));
    if (!sc)
        return false;
    if (sc->progression) {
        const auto& p = *sc->progression;
        return z >= p.first && z <= p.last() && (z - p.first) % p.step == 0;
    }
    auto it = std::upper_bound(sc->runs.begin(), sc->runs.end(), z,
                               [](std::int64_t v, const CellRun& run) { return v < run.lo; });
    if (it == sc->runs.begin())
        return false;
    --it;
    return z <= it->hi;
}

bool PixelSet::contains(const Cell2& z) const
{
    if (d_ != 2)
        throw InputError("contains: dimension mismatch");
    const Point corner{r_ * double(z[0]), r_ * double(z[1])};
    const auto* sc = shell(shell_of(corner, 2));
    return sc && std::binary_search(sc->cells2.begin(), sc->cells2.end(), z);
}

bool PixelSet::any_in(std::int64_t lo, std::int64_t hi) const
{
    if (lo > hi)
        return false;
    for (const auto& [n, sc] : shells_) {
        if (sc.progression) {
            const auto& p = *sc.progression;
            std::int64_t k = 0;
            if (lo > p.first)
                k = (lo - p.first + p.step - 1) / p.step;
            if (k < p.count && p.first + k * p.step <= hi)
                return true;
            continue;
        }
        auto it = std::lower_bound(sc.runs.begin(), sc.runs.end(), lo,
                                   [](const CellRun& run, std::int64_t v) { return run.hi < v; });
        if (it != sc.runs.end() && it->lo <= hi)
            return true;
    }
    return false;
}

bool PixelSet::any_in(const Cell2& lo, const Cell2& hi) const
{
    if (lo[0] > hi[0] || lo[1] > hi[1])
        return false;
    for (const auto& [n, sc] : shells_) {
        auto it = std::lower_bound(sc.cells2.begin(), sc.cells2.end(),
                                   Cell2{lo[0], std::numeric_limits<std::int64_t>::min()});
        for (; it != sc.cells2.end() && (*it)[0] <= hi[0]; ++it)
            if ((*it)[1] >= lo[1] && (*it)[1] <= hi[1])
                return true;
    }
    return false;
}

std::optional<std::int64_t> PixelSet::first_at_or_after(std::int64_t z) const
{
    std::optional<std::int64_t> best;
    for (const auto& [n, sc] : shells_) {
        std::optional<std::int64_t> cand;
        if (sc.progression) {
            const auto& p = *sc.progression;
            std::int64_t k = 0;
            if (z > p.first)
                k = (z - p.first + p.step - 1) / p.step;
            if (k < p.count)
                cand = p.first + k * p.step;
        } else {
            auto it = std::lower_bound(sc.runs.begin(), sc.runs.end(), z,
                                       [](const CellRun& run, std::int64_t v) { return run.hi < v; });
            if (it != sc.runs.end())
                cand = std::max(z, it->lo);
        }
        if (cand && (!best || *cand < *best))
            best = cand;
    }
    return best;
}

std::int64_t PixelSet::block_end(std::int64_t c) const
{
    while (true) {
        const auto* sc = shell(shell_of(r_ * double(c)));
        if (!sc)
            return c - 1;
        std::int64_t end = c;
        if (!sc->progression) {
            auto it = std::upper_bound(sc->runs.begin(), sc->runs.end(), c,
                                       [](std::int64_t v, const CellRun& run) { return v < run.lo; });
            if (it == sc->runs.begin())
                return c - 1;
            --it;
            if (c > it->hi)
                return c - 1;
            end = it->hi;
        } else if (!contains(c)) {
            return c - 1;
        }
        if (!contains(end + 1))
            return end;
        c = end + 1;
    }
}

std::vector<CellRun> PixelSet::runs(int n) const
{
    if (d_ != 1)
        throw InputError("runs: only defined for d = 1");
    const auto* sc = shell(n);
    if (!sc)
        return {};
    if (!sc->progression)
        return sc->runs;
    std::vector<CellRun> out;
    expand_into(out, *sc->progression);
    return out;
}

std::vector<std::int64_t> PixelSet::cells(int n) const
{
    std::vector<std::int64_t> out;
    for (const auto& run : runs(n)) {
        if (std::int64_t(out.size()) + run.size() > kMaxEnumeratedCells)
            throw ResourceError("cells: shell too large to enumerate");
        for (std::int64_t z = run.lo; z <= run.hi; ++z)
            out.push_back(z);
    }
    return out;
}

bool PixelSet::is_subset_of(const PixelSet& other) const
{
    if (d_ != other.d_ || r_ != other.r_)
        return false;
    for (const auto& [n, sc] : shells_) {
        const auto* osc = other.shell(n);
        if (!osc)
            return false;
        if (d_ == 2) {
            for (const auto& c : sc.cells2)
                if (!std::binary_search(osc->cells2.begin(), osc->cells2.end(), c))
                    return false;
            continue;
        }
        if (sc.progression || osc->progression) {
            for (const auto& run : runs(n))
                for (std::int64_t z = run.lo; z <= run.hi; ++z)
                    if (!other.contains(z))
                        return false;
            continue;
        }
        for (const auto& run : sc.runs) {
            auto it = std::upper_bound(
                osc->runs.begin(), osc->runs.end(), run.lo,
                [](std::int64_t v, const CellRun& o) { return v < o.lo; });
            if (it == osc->runs.begin())
                return false;
            --it;
            if (run.hi > it->hi)
                return false;
        }
    }
    return true;
}

PixelSetBuilder::PixelSetBuilder(int d, double resolution) : d_(d), r_(resolution)
{
    PixelSet check(d, resolution);
}

void PixelSetBuilder::add_cell(std::int64_t z) { runs_.push_back({z, z}); }

void PixelSetBuilder::add_run(std::int64_t lo, std::int64_t hi)
{
    if (lo <= hi)
        runs_.push_back({lo, hi});
}

void PixelSetBuilder::add_progression(std::int64_t first, std::int64_t step, std::int64_t count)
{
    if (count <= 0)
        return;
    if (step <= 0)
        throw InputError("add_progression: step must be positive");
    if (step == 1 || count == 1)
        add_run(first, first + (count - 1) * step);
    else
        progs_.push_back({first, step, count});
}

void PixelSetBuilder::add_cell(const Cell2& z) { cells2_.push_back(z); }

PixelSet PixelSetBuilder::build()
{
    PixelSet out(d_, r_);
    if (d_ == 2) {
        std::sort(cells2_.begin(), cells2_.end());
        cells2_.erase(std::unique(cells2_.begin(), cells2_.end()), cells2_.end());
        for (const auto& c : cells2_) {
            const Point corner{r_ * double(c[0]), r_ * double(c[1])};
            out.shells_[shell_of(corner, 2)].cells2.push_back(c);
        }
        cells2_.clear();
        return out;
    }

    std::map<int, std::vector<Progression>> progs;
    for (const auto& p : progs_) {
        std::int64_t k = 0;
        while (k < p.count) {
            const std::int64_t z = p.first + k * p.step;
            const std::int64_t e = last_same_shell(z, r_);
            const std::int64_t kk = std::min((e - z) / p.step + 1, p.count - k);
            progs[shell_of(r_ * double(z))].push_back({z, p.step, kk});
            k += kk;
        }
    }
    std::map<int, std::vector<CellRun>> runs;
    for (const auto& run : merge_runs(std::move(runs_))) {
        std::int64_t z = run.lo;
        while (z <= run.hi) {
            const std::int64_t e = std::min(run.hi, last_same_shell(z, r_));
            runs[shell_of(r_ * double(z))].push_back({z, e});
            z = e + 1;
        }
    }
    runs_.clear();
    progs_.clear();

    for (auto& [n, list] : progs) {
        auto& target = runs[n];
        if (list.size() == 1 && target.empty() && list[0].count >= 3) {
            out.shells_[n].progression = list[0];
            continue;
        }
        for (const auto& p : list)
            expand_into(target, p);
        target = merge_runs(std::move(target));
    }
    for (auto& [n, list] : runs) {
        if (list.empty())
            continue;
        auto& sc = out.shells_[n];
        if (sc.progression) {
            // a progression already occupies this shell; mixing forces expansion
            std::vector<CellRun> all = list;
            expand_into(all, *sc.progression);
            sc.progression.reset();
            sc.runs = merge_runs(std::move(all));
        } else {
            sc.runs = std::move(list);
        }
        canonicalize(sc);
    }
    return out;
}

CellRun shell_cell_range(int n, double r)
{
    const double lo_x = shell_inner(n);
    auto lo = static_cast<std::int64_t>(std::ceil(lo_x / r));
    while (lo > 0 && shell_of(r * double(lo - 1)) == n)
        --lo;
    while (shell_of(r * double(lo)) != n)
        ++lo;
    return {lo, last_same_shell(lo, r)};
}

PixelSet pixelize(const Geometry& g, double r)
{
    if (!(r > 0))
        throw InputError("pixelize: resolution must be positive");
    PixelSetBuilder b(g.d, r);
    auto cell = [r](double x) {
        if (!std::isfinite(x))
            throw InputError("pixelize: non-finite geometry");
        return static_cast<std::int64_t>(std::floor(x / r));
    };
    auto cell_open = [r](double x) {
        if (!std::isfinite(x))
            throw InputError("pixelize: non-finite geometry");
        return static_cast<std::int64_t>(std::ceil(x / r)) - 1;
    };
    for (const auto& p : g.points) {
        if (g.d == 1)
            b.add_cell(cell(p[0]));
        else
            b.add_cell(Cell2{cell(p[0]), cell(p[1])});
    }
    for (const auto& rc : g.closed) {
        if (g.d == 1) {
            b.add_run(cell(rc.lo[0]), cell(rc.hi[0]));
            continue;
        }
        const std::int64_t x0 = cell(rc.lo[0]), x1 = cell(rc.hi[0]);
        const std::int64_t y0 = cell(rc.lo[1]), y1 = cell(rc.hi[1]);
        if ((x1 - x0 + 1) * (y1 - y0 + 1) > kMaxEnumeratedCells)
            throw ResourceError("pixelize: rectangle covers too many cells");
        for (std::int64_t i = x0; i <= x1; ++i)
            for (std::int64_t j = y0; j <= y1; ++j)
                b.add_cell(Cell2{i, j});
    }
    for (const auto& box : g.boxes) {
        if (g.d == 1) {
            b.add_run(cell(box.corner[0]), cell_open(box.corner[0] + box.side));
            continue;
        }
        const std::int64_t x0 = cell(box.corner[0]), x1 = cell_open(box.corner[0] + box.side);
        const std::int64_t y0 = cell(box.corner[1]), y1 = cell_open(box.corner[1] + box.side);
        for (std::int64_t i = x0; i <= x1; ++i)
            for (std::int64_t j = y0; j <= y1; ++j)
                b.add_cell(Cell2{i, j});
    }
    return b.build();
}

Geometry cells_as_boxes(const PixelSet& p)
{
    Geometry g;
    g.d = p.dimension();
    const double r = p.resolution();
    for (const auto& [n, sc] : p.shells()) {
        if (g.d == 2) {
            for (const auto& c : sc.cells2)
                g.boxes.push_back({{r * double(c[0]), r * double(c[1])}, r, 2});
            continue;
        }
        for (const auto& run : p.runs(n))
            for (std::int64_t z = run.lo; z <= run.hi; ++z)
                g.boxes.push_back({{r * double(z), 0.0}, r, 1});
    }
    return g;
}

Progression Skeleton::axis(int n) const
{
    if (n < start_shell || n > n_max)
        return {0, 2, 0};
    const double side = box_side(n);
    const double first = std::ceil(shell_inner(n));
    const double spacing = std::ceil(side);
    const double room = shell_outer(n) - side - first;
    const std::int64_t count = room >= 0 ? std::int64_t(std::floor(room / spacing)) + 1 : 0;
    return {std::int64_t(first), std::int64_t(spacing), count};
}

std::int64_t Skeleton::count(int n) const
{
    const std::int64_t c = axis(n).count;
    return d == 1 ? c : c * c;
}

double Skeleton::box_side(int n) const { return std::exp(theta * double(n)); }

std::vector<Point> Skeleton::points(int n) const
{
    const auto ax = axis(n);
    if (count(n) > kMaxEnumeratedCells)
        throw ResourceError("skeleton shell too large to enumerate");
    std::vector<Point> out;
    for (std::int64_t i = 0; i < ax.count; ++i) {
        const double x = double(ax.first + i * ax.step);
        if (d == 1) {
            out.push_back({x, 0.0});
            continue;
        }
        for (std::int64_t j = 0; j < ax.count; ++j)
            out.push_back({x, double(ax.first + j * ax.step)});
    }
    return out;
}

Skeleton build_skeleton(double theta, int n_max, int d)
{
    if (!(theta > 0 && theta < 1))
        throw InputError("build_skeleton: theta must lie in (0, 1)");
    if (d != 1 && d != 2)
        throw InputError("build_skeleton: d must be 1 or 2");
    if (n_max > kMaxShell)
        throw InputError("build_skeleton: n_max beyond " + std::to_string(kMaxShell));
    Skeleton sk;
    sk.theta = theta;
    sk.d = d;
    sk.n_max = kMaxShell;
    sk.start_shell = 1;
    const double a1 = (1.0 - std::exp(-1.0)) / 4.0;
    sk.a = std::pow(a1, d);
    // start shell: first n from which the cardinality bounds hold through kMaxShell
    int start = kMaxShell + 1;
    for (int n = kMaxShell; n >= 1; --n) {
        const double target = std::exp(double(n) * (1.0 - theta));
        const double c = double(sk.axis(n).count);
        if (c >= a1 * target && c <= target / a1)
            start = n;
        else
            break;
    }
    sk.start_shell = start;
    sk.n_max = n_max;
    if (n_max < start)
        throw InputError("build_skeleton: n_max " + std::to_string(n_max) +
                         " is below the start shell " + std::to_string(start));
    return sk;
}

ThickResult is_theta_thick(const PixelSet& set, const Skeleton& sk, int n_lo, int n_hi)
{
    if (n_hi > sk.n_max)
        throw InputError("is_theta_thick: shell range exceeds skeleton n_max");
    if (set.dimension() != sk.d)
        throw InputError("is_theta_thick: dimension mismatch");
    const double r = set.resolution();
    for (int n = std::max(n_lo, sk.start_shell); n <= n_hi; ++n) {
        const auto ax = sk.axis(n);
        const double side = sk.box_side(n);
        auto zlo = [&](std::int64_t j) {
            return std::int64_t(std::floor(double(ax.first + j * ax.step) / r));
        };
        auto zhi = [&](std::int64_t j) {
            return std::int64_t(std::ceil((double(ax.first + j * ax.step) + side) / r)) - 1;
        };
        if (sk.d == 1) {
            std::int64_t j = 0;
            while (j < ax.count) {
                const std::int64_t lo = zlo(j), hi = zhi(j);
                if (!set.any_in(lo, hi))
                    return {false, n, {double(ax.first + j * ax.step), 0.0}};
                const std::int64_t c = set.block_end(*set.first_at_or_after(lo));
                std::int64_t next = j + 1;
                while (next < ax.count && zlo(next) <= c)
                    ++next;
                j = next;
            }
            continue;
        }
        for (std::int64_t i = 0; i < ax.count; ++i) {
            for (std::int64_t k = 0; k < ax.count; ++k) {
                const double x = double(ax.first + i * ax.step), y = double(ax.first + k * ax.step);
                const Cell2 lo{std::int64_t(std::floor(x / r)), std::int64_t(std::floor(y / r))};
                const Cell2 hi{std::int64_t(std::ceil((x + side) / r)) - 1,
                               std::int64_t(std::ceil((y + side) / r)) - 1};
                if (!set.any_in(lo, hi))
                    return {false, n, {x, y}};
            }
        }
    }
    return {};
}

ThickResult is_theta_thick(const std::function<bool(const UprightBox&)>& meets,
                           const Skeleton& sk, int n_lo, int n_hi)
{
    if (n_hi > sk.n_max)
        throw InputError("is_theta_thick: shell range exceeds skeleton n_max");
    std::int64_t budget = 0;
    for (int n = std::max(n_lo, sk.start_shell); n <= n_hi; ++n)
        budget += sk.count(n);
    if (budget > kMaxEnumeratedCells)
        throw ResourceError("is_theta_thick: " + std::to_string(budget) + " anchors to test");
    for (int n = std::max(n_lo, sk.start_shell); n <= n_hi; ++n) {
        for (const auto& x : sk.points(n)) {
            UprightBox box{x, sk.box_side(n), sk.d};
            if (!meets(box))
                return {false, n, x};
        }
    }
    return {};
}

void write_pixels_csv(std::ostream& os, const PixelSet& p)
{
    if (p.total_count() > kMaxEnumeratedCells)
        throw ResourceError("write_pixels_csv: " + std::to_string(p.total_count()) +
                            " cells exceed the output budget");
    os << "# resolution=" << fmt(p.resolution()) << " d=" << p.dimension() << "\n";
    os << (p.dimension() == 1 ? "shell,z1\n" : "shell,z1,z2\n");
    for (const auto& [n, sc] : p.shells()) {
        if (p.dimension() == 2) {
            for (const auto& c : sc.cells2)
                os << n << ',' << c[0] << ',' << c[1] << '\n';
            continue;
        }
        for (const auto& run : p.runs(n))
            for (std::int64_t z = run.lo; z <= run.hi; ++z)
                os << n << ',' << z << '\n';
    }
}

PixelSet read_pixels_csv(std::istream& is)
{
    std::string line;
    double r = 1.0;
    int d = 1;
    bool have_header = false;
    std::vector<std::pair<int, std::vector<std::int64_t>>> rows;
    std::size_t lineno = 0;
    std::optional<PixelSetBuilder> b;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                if (tok.rfind("resolution=", 0) == 0)
                    r = std::stod(tok.substr(11));
                else if (tok.rfind("d=", 0) == 0)
                    d = std::stoi(tok.substr(2));
            }
            have_header = true;
            continue;
        }
        if (line.rfind("shell", 0) == 0)
            continue;
        if (!have_header)
            throw InputError("pixels csv: missing '# resolution=' header");
        if (!b)
            b.emplace(d, r);
        std::istringstream ss(line);
        std::string f;
        std::vector<std::int64_t> v;
        while (std::getline(ss, f, ','))
            v.push_back(std::stoll(f));
        if (int(v.size()) != d + 1)
            throw InputError("pixels csv: bad column count at line " + std::to_string(lineno));
        if (d == 1) {
            if (shell_of(r * double(v[1])) != v[0])
                throw InputError("pixels csv: shell column disagrees with cell at line " +
                                 std::to_string(lineno));
            b->add_cell(v[1]);
        } else {
            const Point c{r * double(v[1]), r * double(v[2])};
            if (shell_of(c, 2) != v[0])
                throw InputError("pixels csv: shell column disagrees with cell at line " +
                                 std::to_string(lineno));
            b->add_cell(Cell2{v[1], v[2]});
        }
    }
    if (!have_header)
        throw InputError("pixels csv: missing '# resolution=' header");
    if (!b)
        return PixelSet(d, r);
    return b->build();
}

}  // namespace macrodim

#pragma once

#include "macrodim/common.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace macrodim {

using Point = std::array<double, 2>;
using Cell2 = std::array<std::int64_t, 2>;

// Smallest n with x in [-e^n, e^n)^d. Throws InputError on non-finite input.
int shell_of(double x);
int shell_of(std::span<const double> x);
int shell_of(const Point& x, int d);

// e^n, the outer radius of V_n.
double shell_outer(int n);
// e^{n-1} for n >= 1, 0 for n = 0.
double shell_inner(int n);

struct UprightBox {
    Point corner{0.0, 0.0};
    double side = 1.0;
    int d = 1;

    bool contains(const Point& x) const;
    // The half-open unit cell [r z, r(z+1)) meets this box.
    bool meets_cell(std::int64_t z, double r) const;
    bool meets_cell(const Cell2& z, double r) const;
};

// Inclusive run of consecutive cells.
struct CellRun {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t size() const { return hi - lo + 1; }
    bool operator==(const CellRun&) const = default;
};

// Cells first, first+step, ..., first+(count-1)*step with step >= 2.
struct Progression {
    std::int64_t first = 0;
    std::int64_t step = 2;
    std::int64_t count = 0;
    std::int64_t last() const { return first + (count - 1) * step; }
    bool operator==(const Progression&) const = default;
};

struct ShellCells {
    std::vector<CellRun> runs;
    std::optional<Progression> progression;
    std::vector<Cell2> cells2;

    std::int64_t count() const;
    bool empty() const { return count() == 0; }
    bool operator==(const ShellCells&) const = default;
};

class PixelSetBuilder;

class PixelSet {
public:
    PixelSet() = default;
    PixelSet(int d, double resolution);

    int dimension() const { return d_; }
    double resolution() const { return r_; }
    const std::map<int, ShellCells>& shells() const { return shells_; }
    const ShellCells* shell(int n) const;
    std::int64_t count(int n) const;
    std::int64_t total_count() const;
    bool empty() const { return shells_.empty(); }

    bool contains(std::int64_t z) const;
    bool contains(const Cell2& z) const;
    // Any occupied cell with coordinates in [lo, hi] (d = 1) or the product box (d = 2).
    bool any_in(std::int64_t lo, std::int64_t hi) const;
    bool any_in(const Cell2& lo, const Cell2& hi) const;
    // d = 1: smallest occupied cell >= z, and the end of the contiguous block holding c.
    std::optional<std::int64_t> first_at_or_after(std::int64_t z) const;
    std::int64_t block_end(std::int64_t c) const;

    // Runs of shell n, expanding a progression. ResourceError past the budget.
    std::vector<CellRun> runs(int n) const;
    std::vector<std::int64_t> cells(int n) const;

    bool is_subset_of(const PixelSet& other) const;
    bool operator==(const PixelSet&) const = default;

private:
    friend class PixelSetBuilder;
    int d_ = 1;
    double r_ = 1.0;
    std::map<int, ShellCells> shells_;
};

class PixelSetBuilder {
public:
    explicit PixelSetBuilder(int d = 1, double resolution = 1.0);

    void add_cell(std::int64_t z);
    void add_run(std::int64_t lo, std::int64_t hi);
    void add_progression(std::int64_t first, std::int64_t step, std::int64_t count);
    void add_cell(const Cell2& z);
    PixelSet build();

private:
    int d_;
    double r_;
    std::vector<CellRun> runs_;
    std::vector<Progression> progs_;
    std::vector<Cell2> cells2_;
};

// Cells of shell n along one axis: [lo, hi] on the positive side at resolution r.
CellRun shell_cell_range(int n, double r);

struct Rect {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
};

struct Geometry {
    int d = 1;
    std::vector<Point> points;
    std::vector<Rect> closed;        // closed intervals (d=1 uses lo[0], hi[0]) or rectangles
    std::vector<UprightBox> boxes;   // half-open
};

PixelSet pixelize(const Geometry& g, double r);
Geometry cells_as_boxes(const PixelSet& p);

struct Skeleton {
    double theta = 0.5;
    int d = 1;
    int start_shell = 1;
    int n_max = 1;
    double a = 0.0;

    // Anchors along one axis in shell n (all integers).
    Progression axis(int n) const;
    std::int64_t count(int n) const;
    double box_side(int n) const;
    std::vector<Point> points(int n) const;
};

inline constexpr int kMaxShell = 40;

Skeleton build_skeleton(double theta, int n_max, int d = 1);

struct ThickResult {
    bool thick = true;
    int fail_shell = -1;
    Point fail_point{0.0, 0.0};
};

ThickResult is_theta_thick(const PixelSet& set, const Skeleton& sk, int n_lo, int n_hi);
ThickResult is_theta_thick(const std::function<bool(const UprightBox&)>& meets,
                           const Skeleton& sk, int n_lo, int n_hi);

void write_pixels_csv(std::ostream& os, const PixelSet& p);
PixelSet read_pixels_csv(std::istream& is);

}  // namespace macrodim

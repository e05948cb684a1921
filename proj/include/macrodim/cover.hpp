#pragma once

#include "macrodim/shell_geometry.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace macrodim {

// Half-open segment [lo, hi) in arbitrary units, sorted and disjoint in a list.
struct Segment {
    double lo = 0.0;
    double hi = 0.0;
};

// One box per group of consecutive segments; cost = sum of max(span, min_side)^rho.
struct GroupCover {
    double cost = 0.0;
    double total_side = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // inclusive index ranges
};

inline constexpr double kTieTol = 1e-12;

// O(m^2) dynamic program with exact pruning. Ties: fewer boxes, then smaller total side.
GroupCover cover_reference(std::span<const Segment> segs, double rho, double min_side);

// O(m log m) least-weight-subsequence solver. Requires rho <= 1 and every
// segment at least min_side long, so the group cost is concave in the span.
GroupCover cover_fast(std::span<const Segment> segs, double rho, double min_side);

bool fast_cover_applies(std::span<const Segment> segs, double rho, double min_side);

// Picks the fast solver when it applies.
GroupCover cover_segments(std::span<const Segment> segs, double rho, double min_side);

struct DyadicSquare {
    std::int64_t x = 0;  // square index at its level
    std::int64_t y = 0;
    int level = 0;       // side 2^level
};

struct DyadicCover {
    double cost = 0.0;  // sum of 2^{level*rho}
    std::vector<DyadicSquare> squares;
};

// Optimal cover of unit cells by grid-aligned dyadic squares with levels in [k_min, k_max].
DyadicCover cover_dyadic(std::span<const Cell2> cells, double rho, int k_min, int k_max,
                         bool want_squares = true);

}  // namespace macrodim

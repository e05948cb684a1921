#include "macrodim/cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace macrodim {

namespace {

struct State {
    double cost = 0.0;
    std::size_t boxes = 0;
    double side = 0.0;
};

bool better(const State& a, const State& b)
{
    const double scale = std::max(std::abs(a.cost), std::abs(b.cost));
    if (a.cost < b.cost - kTieTol * scale)
        return true;
    if (a.cost > b.cost + kTieTol * scale)
        return false;
    if (a.boxes != b.boxes)
        return a.boxes < b.boxes;
    return a.side < b.side;
}

GroupCover rebuild(std::span<const Segment> segs, const std::vector<std::size_t>& parent,
                   double cost, double min_side)
{
    GroupCover out;
    out.cost = cost;
    std::size_t j = segs.size();
    while (j > 0) {
        const std::size_t i = parent[j];
        out.groups.emplace_back(i, j - 1);
        out.total_side += std::max(segs[j - 1].hi - segs[i].lo, min_side);
        j = i;
    }
    std::reverse(out.groups.begin(), out.groups.end());
    return out;
}

}  // namespace

GroupCover cover_reference(std::span<const Segment> segs, double rho, double min_side)
{
    const std::size_t m = segs.size();
    std::vector<State> f(m + 1);
    std::vector<std::size_t> parent(m + 1, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        State best;
        bool have = false;
        for (std::size_t i = j; i-- > 0;) {
            const double span = std::max(segs[j - 1].hi - segs[i].lo, min_side);
            const double w = std::pow(span, rho);
            if (have && w > best.cost * (1.0 + kTieTol))
                break;
            State cand{f[i].cost + w, f[i].boxes + 1, f[i].side + span};
            if (!have || better(cand, best)) {
                best = cand;
                parent[j] = i;
                have = true;
            }
        }
        f[j] = best;
    }
    return rebuild(segs, parent, f[m].cost, min_side);
}

bool fast_cover_applies(std::span<const Segment> segs, double rho, double min_side)
{
    if (rho > 1.0)
        return false;
    for (const auto& s : segs)
        if (s.hi - s.lo < min_side)
            return false;
    return true;
}

GroupCover cover_fast(std::span<const Segment> segs, double rho, double min_side)
{
    const std::size_t m = segs.size();
    if (m == 0)
        return {};
    std::vector<double> f(m + 1, 0.0);
    std::vector<std::size_t> parent(m + 1, 0);
    auto value = [&](std::size_t i, std::size_t j) {
        return f[i] + std::pow(std::max(segs[j - 1].hi - segs[i].lo, min_side), rho);
    };
    // newer candidate strictly better at j; ties stay with the older one
    auto beats = [&](std::size_t fresh, std::size_t old, std::size_t j) {
        const double a = value(fresh, j), b = value(old, j);
        return a < b - kTieTol * std::max(std::abs(a), std::abs(b));
    };
    struct Entry {
        std::size_t cand;
        std::size_t start;
    };
    // back() is the newest candidate and owns the earliest range of j
    std::vector<Entry> st{{0, 1}};
    auto range_end = [&](std::size_t k) { return k == 0 ? m + 1 : st[k - 1].start; };
    for (std::size_t j = 1; j <= m; ++j) {
        while (st.size() >= 2 && st[st.size() - 2].start <= j)
            st.pop_back();
        const std::size_t i = st.back().cand;
        f[j] = value(i, j);
        parent[j] = i;
        if (j == m)
            break;
        bool placed = false;
        while (!st.empty()) {
            const std::size_t k = st.size() - 1;
            const std::size_t s = std::max(st[k].start, j + 1);
            const std::size_t e = range_end(k) - 1;
            if (s > e || beats(j, st[k].cand, e)) {
                st.pop_back();
                continue;
            }
            std::size_t lo = s, hi = e;
            while (lo < hi) {
                const std::size_t mid = lo + (hi - lo) / 2;
                if (beats(j, st[k].cand, mid))
                    lo = mid + 1;
                else
                    hi = mid;
            }
            // j owns [j + 1, lo), which may include ranges of entries popped above
            if (lo > j + 1) {
                st[k].start = std::max(st[k].start, lo);
                st.push_back({j, j + 1});
            }
            placed = true;
            break;
        }
        if (!placed)
            st.push_back({j, j + 1});
    }
    return rebuild(segs, parent, f[m], min_side);
}

GroupCover cover_segments(std::span<const Segment> segs, double rho, double min_side)
{
    if (fast_cover_applies(segs, rho, min_side))
        return cover_fast(segs, rho, min_side);
    return cover_reference(segs, rho, min_side);
}

DyadicCover cover_dyadic(std::span<const Cell2> cells, double rho, int k_min, int k_max,
                         bool want_squares)
{
    DyadicCover out;
    if (cells.empty())
        return out;
    k_max = std::max(k_max, k_min);
    struct Node {
        double cost;
        bool whole;
    };
    std::vector<std::map<Cell2, Node>> levels(std::size_t(k_max + 1));
    for (const auto& c : cells) {
        const Cell2 key{c[0] >> k_min, c[1] >> k_min};
        levels[std::size_t(k_min)][key] = {std::pow(2.0, k_min * rho), true};
    }
    for (int k = k_min + 1; k <= k_max; ++k) {
        auto& up = levels[std::size_t(k)];
        for (const auto& [key, node] : levels[std::size_t(k - 1)]) {
            const Cell2 pk{key[0] >> 1, key[1] >> 1};
            auto [it, fresh] = up.try_emplace(pk, Node{0.0, false});
            it->second.cost += node.cost;
        }
        const double whole = std::pow(2.0, k * rho);
        for (auto& [key, node] : up) {
            if (whole <= node.cost) {
                node.cost = whole;
                node.whole = true;
            }
        }
    }
    for (const auto& [key, node] : levels[std::size_t(k_max)])
        out.cost += node.cost;
    if (!want_squares)
        return out;
    std::vector<DyadicSquare> todo;
    for (const auto& [key, node] : levels[std::size_t(k_max)])
        todo.push_back({key[0], key[1], k_max});
    while (!todo.empty()) {
        const auto sq = todo.back();
        todo.pop_back();
        const auto& node = levels[std::size_t(sq.level)].at({sq.x, sq.y});
        if (node.whole) {
            out.squares.push_back(sq);
            continue;
        }
        const auto& below = levels[std::size_t(sq.level - 1)];
        for (std::int64_t dx = 0; dx < 2; ++dx)
            for (std::int64_t dy = 0; dy < 2; ++dy)
                if (below.count({2 * sq.x + dx, 2 * sq.y + dy}))
                    todo.push_back({2 * sq.x + dx, 2 * sq.y + dy, sq.level - 1});
    }
    std::sort(out.squares.begin(), out.squares.end(), [](const auto& a, const auto& b) {
        return std::tie(a.level, a.x, a.y) < std::tie(b.level, b.x, b.y);
    });
    return out;
}

}  // namespace macrodim

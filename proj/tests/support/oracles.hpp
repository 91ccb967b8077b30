#pragma once

// Independent reference computations for tests. Nothing here calls the library's search,
// pipeline or audit code; hosts are only read through their raw edge lists and class sizes.

#include <redhyper/hypercore.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle
{
    using redhyper::Index;
    using redhyper::IndexTriple;
    using redhyper::ReducedHypergraph;

    /// SplitMix64: tiny seeded generator for test inputs, deliberately unrelated to the library Rng.
    class SplitMix
    {
    public:
        explicit SplitMix(std::uint64_t seed) : _state(seed) {}

        auto next() -> std::uint64_t
        {
            std::uint64_t z = (_state += 0x9e3779b97f4a7c15ull);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        }

        /// Uniform in [lo, hi] (modulo bias is irrelevant for test inputs).
        auto between(int lo, int hi) -> int { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

        /// True with probability num / den.
        auto chance(std::uint64_t num, std::uint64_t den) -> bool { return next() % den < num; }

    private:
        std::uint64_t _state;
    };

    /// Host with per-pair class sizes in [min_size, max_size]; every cell is an edge with probability num/den.
    inline auto random_host(std::uint64_t seed, int m, int min_size, int max_size, std::uint64_t num, std::uint64_t den)
        -> ReducedHypergraph
    {
        SplitMix rng(seed);
        redhyper::ReducedHypergraphBuilder b(m);
        for (Index i = 1; i <= m; ++i)
            for (Index j = i + 1; j <= m; ++j)
                b.set_class_size(i, j, rng.between(min_size, max_size));
        for (Index i = 1; i <= m; ++i)
            for (Index j = i + 1; j <= m; ++j)
                for (Index k = j + 1; k <= m; ++k)
                    for (int a = 0; a < b.class_size(i, j); ++a)
                        for (int c = 0; c < b.class_size(i, k); ++c)
                            for (int e = 0; e < b.class_size(j, k); ++e)
                                if (rng.chance(num, den))
                                    b.add_edge(i, j, k, a, c, e);
        return b.build();
    }

    /// Raw edge table keyed by sorted index triple.
    class EdgeTable
    {
    public:
        explicit EdgeTable(const ReducedHypergraph & h) : _m(h.index_count())
        {
            for (const auto & t : h.triples())
                for (auto [a, b, c] : h.constituent(t).edges())
                    _edges.insert({t.i, t.j, t.k, a, b, c});
            for (Index i = 1; i <= _m; ++i)
                for (Index j = i + 1; j <= _m; ++j)
                    _sizes[{i, j}] = h.class_size(i, j);
        }

        auto size(Index a, Index b) const -> int { return _sizes.at({std::min(a, b), std::max(a, b)}); }

        /// Edge with vertices named by the pairs they sit on, indices in any order.
        auto has(Index x, Index y, Index z, int vxy, int vxz, int vyz) const -> bool
        {
            std::array<Index, 3> idx{x, y, z};
            std::sort(idx.begin(), idx.end());
            auto on = [&](Index p, Index q) {
                auto lo = std::min(p, q), hi = std::max(p, q);
                if (lo == std::min(x, y) && hi == std::max(x, y))
                    return vxy;
                if (lo == std::min(x, z) && hi == std::max(x, z))
                    return vxz;
                return vyz;
            };
            return _edges.count({idx[0], idx[1], idx[2], on(idx[0], idx[1]), on(idx[0], idx[2]), on(idx[1], idx[2])}) != 0;
        }

        /// Oriented lookup for i < j < k.
        auto has_sorted(Index i, Index j, Index k, int a, int b, int c) const -> bool
        {
            return _edges.count({i, j, k, a, b, c}) != 0;
        }

        auto edge_count(Index i, Index j, Index k) const -> std::int64_t
        {
            auto lo = _edges.lower_bound({i, j, k, -1, -1, -1});
            auto hi = _edges.lower_bound({i, j, k + 1, -1, -1, -1});
            return std::distance(lo, hi);
        }

    private:
        int _m;
        std::set<std::array<int, 6>> _edges;
        std::map<std::pair<Index, Index>, int> _sizes;
    };

    /// count >= (num/den) * base, in integers.
    inline auto reaches(std::int64_t count, std::int64_t num, std::int64_t den, std::int64_t base) -> bool
    {
        return count * den >= num * base;
    }

    /// Degrees in the low Q-graph of triple t (indexed by v in P^{ik}) and in the high Q-graph,
    /// with eps = en/ed, recounted from raw edges.
    struct NaiveDegrees
    {
        std::vector<std::int64_t> low, high;
    };

    inline auto naive_degrees(const EdgeTable & e, const IndexTriple & t, std::int64_t en, std::int64_t ed) -> NaiveDegrees
    {
        const int pij = e.size(t.i, t.j), pik = e.size(t.i, t.k), pjk = e.size(t.j, t.k);
        NaiveDegrees d{std::vector<std::int64_t>(pik, 0), std::vector<std::int64_t>(pik, 0)};
        for (int v = 0; v < pik; ++v) {
            for (int w = 0; w < pij; ++w) {
                std::int64_t count = 0;
                for (int u = 0; u < pjk; ++u)
                    count += e.has_sorted(t.i, t.j, t.k, w, v, u);
                if (reaches(count, en * en, ed * ed, pjk))
                    ++d.low[v];
            }
            for (int w = 0; w < pjk; ++w) {
                std::int64_t count = 0;
                for (int u = 0; u < pij; ++u)
                    count += e.has_sorted(t.i, t.j, t.k, u, v, w);
                if (reaches(count, en * en, ed * ed, pij))
                    ++d.high[v];
            }
        }
        return d;
    }

    /// Number of directed 3-cycles in a tournament on 4 vertices given as 6 bits over the
    /// pairs 12, 13, 14, 23, 24, 34 (bit set = lower vertex wins).
    inline auto cyclic_triangles_on_four(unsigned bits) -> int
    {
        const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        bool beats[4][4] = {};
        for (int p = 0; p < 6; ++p) {
            auto [a, b] = pairs[p];
            if (bits >> p & 1)
                beats[a][b] = true;
            else
                beats[b][a] = true;
        }
        int cyclic = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                for (int c = b + 1; c < 4; ++c) {
                    // cyclic iff every vertex wins exactly once inside the triple
                    int wa = beats[a][b] + beats[a][c], wb = beats[b][a] + beats[b][c], wc = beats[c][a] + beats[c][b];
                    cyclic += (wa == 1 && wb == 1 && wc == 1);
                }
        return cyclic;
    }

    /// Labelled injective copies of pattern edges in a plain 3-graph, by trying every injection.
    inline auto naive_copy_count(int n, const std::set<std::array<int, 3>> & edges, int pn,
        const std::vector<std::array<int, 3>> & pattern) -> std::uint64_t
    {
        std::vector<int> image(pn, 0);
        std::vector<bool> used(n + 1, false);
        std::uint64_t count = 0;
        auto rec = [&](auto && self, int u) -> void {
            if (u == pn) {
                for (const auto & e : pattern) {
                    std::array<int, 3> im{image[e[0] - 1], image[e[1] - 1], image[e[2] - 1]};
                    std::sort(im.begin(), im.end());
                    if (! edges.count(im))
                        return;
                }
                ++count;
                return;
            }
            for (int v = 1; v <= n; ++v)
                if (! used[v]) {
                    used[v] = true;
                    image[u] = v;
                    self(self, u + 1);
                    used[v] = false;
                }
        };
        rec(rec, 0);
        return count;
    }

    /// e(U) for a vertex list, by direct triple enumeration.
    inline auto edges_inside(const std::set<std::array<int, 3>> & edges, const std::vector<int> & u) -> std::int64_t
    {
        std::int64_t count = 0;
        for (std::size_t a = 0; a < u.size(); ++a)
            for (std::size_t b = a + 1; b < u.size(); ++b)
                for (std::size_t c = b + 1; c < u.size(); ++c) {
                    std::array<int, 3> t{u[a], u[b], u[c]};
                    std::sort(t.begin(), t.end());
                    count += edges.count(t);
                }
        return count;
    }

    /// Glued configurations counted with the vertex loops in a different order from the library
    /// enumerator (glued pair first, then the a12 fan, then the a34 base).
    inline auto naive_glued_count(const ReducedHypergraph & h) -> std::uint64_t
    {
        EdgeTable e(h);
        const int m = h.index_count();
        std::uint64_t count = 0;
        for (Index i4 = 1; i4 <= m; ++i4)
            for (Index i3 = 1; i3 <= m; ++i3)
                for (Index i2 = 1; i2 <= m; ++i2)
                    for (Index i1 = 1; i1 <= m; ++i1) {
                        std::set<Index> distinct{i1, i2, i3, i4};
                        if (distinct.size() != 4)
                            continue;
                        for (int a34 = 0; a34 < e.size(i3, i4); ++a34)
                            for (int a24p = 0; a24p < e.size(i2, i4); ++a24p)
                                for (int a23p = 0; a23p < e.size(i2, i3); ++a23p) {
                                    if (! e.has(i2, i3, i4, a23p, a24p, a34))
                                        continue;
                                    for (int a12 = 0; a12 < e.size(i1, i2); ++a12)
                                        for (int a14 = 0; a14 < e.size(i1, i4); ++a14)
                                            for (int a13 = 0; a13 < e.size(i1, i3); ++a13) {
                                                if (! e.has(i1, i3, i4, a13, a14, a34))
                                                    continue;
                                                std::uint64_t left = 0, right = 0;
                                                for (int a23 = 0; a23 < e.size(i2, i3); ++a23)
                                                    left += e.has(i1, i2, i3, a12, a13, a23);
                                                for (int a24 = 0; a24 < e.size(i2, i4); ++a24)
                                                    right += e.has(i1, i2, i4, a12, a14, a24);
                                                count += left * right;
                                            }
                                }
                    }
        return count;
    }
}

#include <redhyper/errors.hpp>
#include <redhyper/hypercore.hpp>

#include <algorithm>
#include <map>

namespace redhyper
{
    auto IndexPair::of(Index a, Index b) -> IndexPair
    {
        if (a == b)
            throw DomainError("index pair needs two distinct indices, got " + std::to_string(a) + " twice");
        return a < b ? IndexPair{a, b} : IndexPair{b, a};
    }

    auto IndexTriple::of(Index a, Index b, Index c) -> IndexTriple
    {
        std::array<Index, 3> s{a, b, c};
        std::sort(s.begin(), s.end());
        if (s[0] == s[1] || s[1] == s[2])
            throw DomainError("index triple needs three distinct indices");
        return {s[0], s[1], s[2]};
    }

    auto to_string(const IndexTriple & t) -> std::string
    {
        return std::to_string(t.i) + " " + std::to_string(t.j) + " " + std::to_string(t.k);
    }

    Constituent::Constituent(int size_ij, int size_ik, int size_jk, std::vector<std::array<Vertex, 3>> edges) :
        _sizes{size_ij, size_ik, size_jk},
        _edges(std::move(edges))
    {
        std::sort(_edges.begin(), _edges.end());

        const auto p = static_cast<std::size_t>(size_ij), q = static_cast<std::size_t>(size_ik),
                   r = static_cast<std::size_t>(size_jk);
        _cube.resize(p * q * r);
        _by_ab.assign(p * q, Bitset(r));
        _by_ac.assign(p * r, Bitset(q));
        _by_bc.assign(q * r, Bitset(p));
        _link_a.assign(p, Bitset(q * r));
        _link_b.assign(q, Bitset(p * r));
        _link_c.assign(r, Bitset(p * q));

        for (auto [a, b, c] : _edges) {
            _cube.set((a * q + b) * r + c);
            _by_ab[a * q + b].set(c);
            _by_ac[a * r + c].set(b);
            _by_bc[b * r + c].set(a);
            _link_a[a].set(b * r + c);
            _link_b[b].set(a * r + c);
            _link_c[c].set(a * q + b);
        }
    }

    auto ReducedHypergraph::pair_slot(Index a, Index b) const -> std::size_t
    {
        if (! valid_index(a) || ! valid_index(b) || a == b)
            throw DomainError("no vertex class for indices " + std::to_string(a) + ", " + std::to_string(b));
        if (a > b)
            std::swap(a, b);
        return static_cast<std::size_t>(a - 1) * _m + (b - 1);
    }

    auto ReducedHypergraph::triple_slot(const IndexTriple & t) const -> std::size_t
    {
        if (! valid_index(t.i) || ! valid_index(t.j) || ! valid_index(t.k) || ! (t.i < t.j && t.j < t.k))
            throw DomainError("unknown index triple " + to_string(t));
        auto slot = _triple_lookup[(static_cast<std::size_t>(t.i - 1) * _m + (t.j - 1)) * _m + (t.k - 1)];
        return static_cast<std::size_t>(slot);
    }

    auto ReducedHypergraph::class_size(Index a, Index b) const -> int
    {
        return _class_sizes[pair_slot(a, b)];
    }

    auto ReducedHypergraph::constituent(const IndexTriple & t) const -> const Constituent &
    {
        return _constituents[triple_slot(t)];
    }

    auto ReducedHypergraph::contains_edge(Index x, Index y, Index z, Vertex v_xy, Vertex v_xz, Vertex v_yz) const -> bool
    {
        auto t = IndexTriple::of(x, y, z);
        // place each vertex on the sorted pair it belongs to
        auto vertex_on = [&](Index p, Index q) -> Vertex {
            auto pq = IndexPair::of(p, q);
            if (pq == IndexPair::of(x, y))
                return v_xy;
            if (pq == IndexPair::of(x, z))
                return v_xz;
            return v_yz;
        };
        auto a = vertex_on(t.i, t.j), b = vertex_on(t.i, t.k), c = vertex_on(t.j, t.k);
        const auto & con = constituent(t);
        if (a < 0 || b < 0 || c < 0 || a >= con.size_ij() || b >= con.size_ik() || c >= con.size_jk())
            throw DomainError("vertex out of range for its class in triple " + to_string(t));
        return con.contains(a, b, c);
    }

    auto ReducedHypergraph::pairs() const -> std::vector<IndexPair>
    {
        std::vector<IndexPair> result;
        for (Index i = 1; i <= _m; ++i)
            for (Index j = i + 1; j <= _m; ++j)
                result.push_back({i, j});
        return result;
    }

    auto ReducedHypergraph::triples() const -> std::vector<IndexTriple>
    {
        std::vector<IndexTriple> result;
        for (Index i = 1; i <= _m; ++i)
            for (Index j = i + 1; j <= _m; ++j)
                for (Index k = j + 1; k <= _m; ++k)
                    result.push_back({i, j, k});
        return result;
    }

    auto ReducedHypergraph::total_edges() const -> std::int64_t
    {
        std::int64_t total = 0;
        for (const auto & c : _constituents)
            total += c.edge_count();
        return total;
    }

    auto ReducedHypergraph::operator==(const ReducedHypergraph & other) const -> bool
    {
        if (_m != other._m || _class_sizes != other._class_sizes)
            return false;
        for (std::size_t s = 0; s < _constituents.size(); ++s)
            if (_constituents[s].edges() != other._constituents[s].edges())
                return false;
        return true;
    }

    ReducedHypergraphBuilder::ReducedHypergraphBuilder(int index_count) :
        _m(index_count)
    {
        if (index_count < 1)
            throw DomainError("index count must be positive");
        _class_sizes.assign(static_cast<std::size_t>(_m) * _m, 0);
        _edges.resize(static_cast<std::size_t>(_m) * _m * _m);
    }

    auto ReducedHypergraphBuilder::pair_slot(Index i, Index j) const -> std::size_t
    {
        if (i < 1 || j < 1 || i > _m || j > _m || i == j)
            throw DomainError("index pair " + std::to_string(i) + " " + std::to_string(j) + " out of range for M = " +
                std::to_string(_m));
        if (i > j)
            std::swap(i, j);
        return static_cast<std::size_t>(i - 1) * _m + (j - 1);
    }

    auto ReducedHypergraphBuilder::triple_slot(Index i, Index j, Index k) const -> std::size_t
    {
        if (! (1 <= i && i < j && j < k && k <= _m))
            throw DomainError("index triple " + std::to_string(i) + " " + std::to_string(j) + " " + std::to_string(k) +
                " must satisfy 1 <= i < j < k <= " + std::to_string(_m));
        return (static_cast<std::size_t>(i - 1) * _m + (j - 1)) * _m + (k - 1);
    }

    auto ReducedHypergraphBuilder::set_class_size(Index i, Index j, int size) -> ReducedHypergraphBuilder &
    {
        if (size < 1)
            throw DomainError("class size must be at least 1");
        auto slot = pair_slot(i, j);
        if (_class_sizes[slot] != 0 && _class_sizes[slot] != size) {
            // shrinking would orphan edges; only allow when the class is still unused
            for (Index k = 1; k <= _m; ++k) {
                if (k == i || k == j)
                    continue;
                auto t = IndexTriple::of(i, j, k);
                if (! _edges[triple_slot(t.i, t.j, t.k)].empty())
                    throw DomainError("cannot resize a vertex class that already carries edges");
            }
        }
        _class_sizes[slot] = size;
        return *this;
    }

    auto ReducedHypergraphBuilder::set_all_class_sizes(int size) -> ReducedHypergraphBuilder &
    {
        for (Index i = 1; i <= _m; ++i)
            for (Index j = i + 1; j <= _m; ++j)
                set_class_size(i, j, size);
        return *this;
    }

    auto ReducedHypergraphBuilder::class_size(Index i, Index j) const -> int
    {
        return _class_sizes[pair_slot(i, j)];
    }

    auto ReducedHypergraphBuilder::add_edge(Index i, Index j, Index k, Vertex a, Vertex b, Vertex c)
        -> ReducedHypergraphBuilder &
    {
        auto slot = triple_slot(i, j, k);
        auto sij = class_size(i, j), sik = class_size(i, k), sjk = class_size(j, k);
        if (sij == 0 || sik == 0 || sjk == 0)
            throw DomainError("edge added before all three class sizes were set");
        if (a < 0 || a >= sij || b < 0 || b >= sik || c < 0 || c >= sjk)
            throw DomainError("edge vertex out of range for its class");
        if (! _edges[slot].insert({a, b, c}).second)
            throw DomainError("duplicate edge");
        return *this;
    }

    auto ReducedHypergraphBuilder::has_edge(Index i, Index j, Index k, Vertex a, Vertex b, Vertex c) const -> bool
    {
        return _edges[triple_slot(i, j, k)].count({a, b, c}) != 0;
    }

    auto ReducedHypergraphBuilder::build() const -> ReducedHypergraph
    {
        ReducedHypergraph h;
        h._m = _m;
        h._class_sizes = _class_sizes;
        for (Index i = 1; i <= _m; ++i)
            for (Index j = i + 1; j <= _m; ++j)
                if (_class_sizes[pair_slot(i, j)] < 1)
                    throw DomainError("missing class size for pair " + std::to_string(i) + " " + std::to_string(j));

        h._triple_lookup.assign(static_cast<std::size_t>(_m) * _m * _m, -1);
        for (Index i = 1; i <= _m; ++i)
            for (Index j = i + 1; j <= _m; ++j)
                for (Index k = j + 1; k <= _m; ++k) {
                    auto slot = triple_slot(i, j, k);
                    h._triple_lookup[slot] = static_cast<int>(h._constituents.size());
                    h._constituents.emplace_back(class_size(i, j), class_size(i, k), class_size(j, k),
                        std::vector<std::array<Vertex, 3>>(_edges[slot].begin(), _edges[slot].end()));
                }
        return h;
    }

    auto relabel(const ReducedHypergraph & h, const std::vector<Index> & order) -> ReducedHypergraph
    {
        const int n = static_cast<int>(order.size());
        if (n < 1)
            throw DomainError("relabel needs at least one index");
        {
            auto sorted = order;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw DomainError("relabel order repeats an index");
            for (auto o : sorted)
                if (! h.valid_index(o))
                    throw DomainError("relabel order names unknown index " + std::to_string(o));
        }

        ReducedHypergraphBuilder b(n);
        for (Index s = 1; s <= n; ++s)
            for (Index t = s + 1; t <= n; ++t)
                b.set_class_size(s, t, h.class_size(order[s - 1], order[t - 1]));

        for (Index s = 1; s <= n; ++s)
            for (Index t = s + 1; t <= n; ++t)
                for (Index u = t + 1; u <= n; ++u) {
                    Index os = order[s - 1], ot = order[t - 1], ou = order[u - 1];
                    auto orig = IndexTriple::of(os, ot, ou);
                    for (auto [a, bb, c] : h.constituent(orig).edges()) {
                        // vertex sitting on the original pair {p, q}
                        auto on = [&](Index p, Index q) -> Vertex {
                            auto pq = IndexPair::of(p, q);
                            if (pq == IndexPair{orig.i, orig.j})
                                return a;
                            if (pq == IndexPair{orig.i, orig.k})
                                return bb;
                            return c;
                        };
                        b.add_edge(s, t, u, on(os, ot), on(os, ou), on(ot, ou));
                    }
                }
        return b.build();
    }

    auto constituent_density(const ReducedHypergraph & h, const IndexTriple & triple) -> Rational
    {
        const auto & c = h.constituent(triple);
        return Rational{c.edge_count(), c.cell_count()};
    }

    auto is_box_dense(const ReducedHypergraph & h, const Rational & d) -> BoxDensityResult
    {
        for (const auto & t : h.triples())
            if (constituent_density(h, t) < d)
                return {false, t};
        return {true, std::nullopt};
    }

    auto VertexPair::of(PatternVertex a, PatternVertex b) -> VertexPair
    {
        if (a == b)
            throw DomainError("vertex pair needs two distinct vertices");
        return a < b ? VertexPair{a, b} : VertexPair{b, a};
    }

    Pattern::Pattern(int vertex_count, std::vector<std::array<PatternVertex, 3>> edges, std::string name) :
        _n(vertex_count),
        _edges(std::move(edges)),
        _name(std::move(name))
    {
        if (_n < 1)
            throw DomainError("pattern needs at least one vertex");
        for (auto & e : _edges) {
            std::sort(e.begin(), e.end());
            if (e[0] == e[1] || e[1] == e[2])
                throw DomainError("pattern edge must have three distinct vertices");
            if (e[0] < 1 || e[2] > _n)
                throw DomainError("pattern edge vertex out of range 1.." + std::to_string(_n));
        }
        std::sort(_edges.begin(), _edges.end());
        if (std::adjacent_find(_edges.begin(), _edges.end()) != _edges.end())
            throw DomainError("duplicate pattern edge");

        std::set<VertexPair> pairs;
        for (auto [u, v, w] : _edges) {
            pairs.insert({u, v});
            pairs.insert({u, w});
            pairs.insert({v, w});
        }
        _shadow.assign(pairs.begin(), pairs.end());
    }

    auto Pattern::in_shadow(PatternVertex a, PatternVertex b) const -> bool
    {
        if (a == b)
            return false;
        return std::binary_search(_shadow.begin(), _shadow.end(), VertexPair::of(a, b));
    }

    auto shadow(const Pattern & p) -> std::vector<VertexPair>
    {
        return p.shadow();
    }

    auto blow_up(const Pattern & p, int t) -> Pattern
    {
        if (t < 1)
            throw DomainError("blow-up factor must be at least 1");
        auto copy = [t](PatternVertex u, int c) { return (u - 1) * t + c + 1; };
        std::vector<std::array<PatternVertex, 3>> edges;
        for (auto [u, v, w] : p.edges())
            for (int a = 0; a < t; ++a)
                for (int b = 0; b < t; ++b)
                    for (int c = 0; c < t; ++c)
                        edges.push_back({copy(u, a), copy(v, b), copy(w, c)});
        auto name = p.name().empty() ? std::string{} : p.name() + "(" + std::to_string(t) + ")";
        return Pattern{p.vertex_count() * t, std::move(edges), name};
    }

    auto pattern_catalog(CatalogPattern which) -> Pattern
    {
        switch (which) {
        case CatalogPattern::Fstar:
            return Pattern{5, {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {1, 2, 5}, {3, 4, 5}}, "Fstar"};
        case CatalogPattern::K4minus:
            return Pattern{4, {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}}, "K4minus"};
        case CatalogPattern::K4:
            return Pattern{4, {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}, "K4"};
        case CatalogPattern::single_edge:
            return Pattern{3, {{1, 2, 3}}, "single_edge"};
        }
        throw DomainError("unknown catalog pattern");
    }

    namespace
    {
        const std::map<std::string_view, CatalogPattern> catalog_names{
            {"Fstar", CatalogPattern::Fstar},
            {"K4minus", CatalogPattern::K4minus},
            {"K4", CatalogPattern::K4},
            {"single_edge", CatalogPattern::single_edge},
        };
    }

    auto is_catalog_name(std::string_view name) -> bool
    {
        return catalog_names.count(name) != 0;
    }

    auto pattern_catalog(std::string_view name) -> Pattern
    {
        auto it = catalog_names.find(name);
        if (it == catalog_names.end())
            throw DomainError("unknown pattern name '" + std::string(name) + "'");
        return pattern_catalog(it->second);
    }
}

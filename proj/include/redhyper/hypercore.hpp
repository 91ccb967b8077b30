#pragma once

#include <redhyper/rational.hpp>

#include <boost/dynamic_bitset.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace redhyper
{
    /// Index of a reduced hypergraph, 1..M.
    using Index = int;
    /// Vertex inside one vertex class, 0..|P|-1.
    using Vertex = int;

    using Bitset = boost::dynamic_bitset<std::uint64_t>;

    struct IndexPair
    {
        Index lo = 0, hi = 0;

        /// Sorts the two indices. Throws DomainError when they coincide.
        static auto of(Index a, Index b) -> IndexPair;

        auto operator<=>(const IndexPair &) const = default;
    };

    struct IndexTriple
    {
        Index i = 0, j = 0, k = 0;

        /// Sorts the three indices. Throws DomainError unless they are distinct.
        static auto of(Index a, Index b, Index c) -> IndexTriple;

        auto operator<=>(const IndexTriple &) const = default;
    };

    auto to_string(const IndexTriple & t) -> std::string;

    /// The 3-partite constituent A^{ijk} of a reduced hypergraph, i < j < k.
    ///
    /// Edges are triples (a, b, c) with a in P^{ij}, b in P^{ik}, c in P^{jk}. Membership is a
    /// dense bit cube; the pair links give, for two fixed coordinates, the bitset of all
    /// completions in the third class. Vertex links give, for one fixed coordinate, the bitset
    /// of completing pairs of the other two (row-major in the remaining coordinates).
    class Constituent
    {
    public:
        Constituent(int size_ij, int size_ik, int size_jk, std::vector<std::array<Vertex, 3>> edges);

        auto size_ij() const -> int { return _sizes[0]; }
        auto size_ik() const -> int { return _sizes[1]; }
        auto size_jk() const -> int { return _sizes[2]; }

        auto contains(Vertex a, Vertex b, Vertex c) const -> bool
        {
            return _cube.test((static_cast<std::size_t>(a) * _sizes[1] + b) * _sizes[2] + c);
        }

        auto edge_count() const -> std::int64_t { return static_cast<std::int64_t>(_edges.size()); }
        auto cell_count() const -> std::int64_t
        {
            return std::int64_t{_sizes[0]} * _sizes[1] * _sizes[2];
        }

        /// Sorted edge list.
        auto edges() const -> const std::vector<std::array<Vertex, 3>> & { return _edges; }

        /// Completions c in P^{jk} of a fixed (a, b).
        auto completions_jk(Vertex a, Vertex b) const -> const Bitset & { return _by_ab[a * _sizes[1] + b]; }
        /// Completions b in P^{ik} of a fixed (a, c).
        auto completions_ik(Vertex a, Vertex c) const -> const Bitset & { return _by_ac[a * _sizes[2] + c]; }
        /// Completions a in P^{ij} of a fixed (b, c).
        auto completions_ij(Vertex b, Vertex c) const -> const Bitset & { return _by_bc[b * _sizes[2] + c]; }

        /// Pairs (b, c) completing a fixed a, bit b * |P^{jk}| + c.
        auto link_of_ij(Vertex a) const -> const Bitset & { return _link_a[a]; }
        /// Pairs (a, c) completing a fixed b, bit a * |P^{jk}| + c.
        auto link_of_ik(Vertex b) const -> const Bitset & { return _link_b[b]; }
        /// Pairs (a, b) completing a fixed c, bit a * |P^{ik}| + b.
        auto link_of_jk(Vertex c) const -> const Bitset & { return _link_c[c]; }

    private:
        std::array<int, 3> _sizes;
        std::vector<std::array<Vertex, 3>> _edges;
        Bitset _cube;
        std::vector<Bitset> _by_ab, _by_ac, _by_bc;
        std::vector<Bitset> _link_a, _link_b, _link_c;
    };

    /// Reduced hypergraph with index set 1..M, one vertex class per index pair and one
    /// constituent per index triple. Immutable; build with ReducedHypergraphBuilder.
    class ReducedHypergraph
    {
    public:
        auto index_count() const -> int { return _m; }

        /// |P^{ab}| for distinct a, b in either order.
        auto class_size(Index a, Index b) const -> int;
        auto class_size(IndexPair p) const -> int { return class_size(p.lo, p.hi); }

        auto constituent(const IndexTriple & t) const -> const Constituent &;

        /// Edge test with arbitrary index order: v_xy in P^{xy}, v_xz in P^{xz}, v_yz in P^{yz}.
        auto contains_edge(Index x, Index y, Index z, Vertex v_xy, Vertex v_xz, Vertex v_yz) const -> bool;

        auto valid_index(Index i) const -> bool { return i >= 1 && i <= _m; }

        /// All pairs, lexicographic.
        auto pairs() const -> std::vector<IndexPair>;
        /// All triples i < j < k, lexicographic.
        auto triples() const -> std::vector<IndexTriple>;

        auto total_edges() const -> std::int64_t;

        auto operator==(const ReducedHypergraph & other) const -> bool;

    private:
        friend class ReducedHypergraphBuilder;

        ReducedHypergraph() = default;

        auto pair_slot(Index a, Index b) const -> std::size_t;
        auto triple_slot(const IndexTriple & t) const -> std::size_t;

        int _m = 0;
        std::vector<int> _class_sizes;
        std::vector<int> _triple_lookup;
        std::vector<Constituent> _constituents;
    };

    class ReducedHypergraphBuilder
    {
    public:
        explicit ReducedHypergraphBuilder(int index_count);

        auto index_count() const -> int { return _m; }

        /// Every pair needs a class size >= 1 before edges that touch it are added.
        auto set_class_size(Index i, Index j, int size) -> ReducedHypergraphBuilder &;
        auto set_all_class_sizes(int size) -> ReducedHypergraphBuilder &;

        /// i < j < k and a in P^{ij}, b in P^{ik}, c in P^{jk}. Duplicates are rejected.
        auto add_edge(Index i, Index j, Index k, Vertex a, Vertex b, Vertex c) -> ReducedHypergraphBuilder &;

        auto class_size(Index i, Index j) const -> int;
        auto has_edge(Index i, Index j, Index k, Vertex a, Vertex b, Vertex c) const -> bool;

        auto build() const -> ReducedHypergraph;

    private:
        int _m;
        std::vector<int> _class_sizes;
        std::vector<std::set<std::array<Vertex, 3>>> _edges;

        auto pair_slot(Index i, Index j) const -> std::size_t;
        auto triple_slot(Index i, Index j, Index k) const -> std::size_t;
    };

    /// Sub-hypergraph on the listed original indices; new index t is order[t-1]. The order need
    /// not be increasing, in which case constituents are re-oriented.
    auto relabel(const ReducedHypergraph & h, const std::vector<Index> & order) -> ReducedHypergraph;

    /// e(A^{ijk}) / (|P^{ij}| |P^{ik}| |P^{jk}|).
    auto constituent_density(const ReducedHypergraph & h, const IndexTriple & triple) -> Rational;

    struct BoxDensityResult
    {
        bool dense = true;
        /// Lexicographically least triple whose density is below d, when not dense.
        std::optional<IndexTriple> witness;
    };

    /// (d, box)-density: every constituent has density at least d.
    auto is_box_dense(const ReducedHypergraph & h, const Rational & d) -> BoxDensityResult;

    /// Pattern vertex, 1..v(F).
    using PatternVertex = int;

    struct VertexPair
    {
        PatternVertex u = 0, v = 0;

        static auto of(PatternVertex a, PatternVertex b) -> VertexPair;

        auto operator<=>(const VertexPair &) const = default;
    };

    /// A small 3-graph F with its shadow. Edges are stored sorted, each with sorted vertices.
    class Pattern
    {
    public:
        Pattern(int vertex_count, std::vector<std::array<PatternVertex, 3>> edges, std::string name = "");

        auto vertex_count() const -> int { return _n; }
        auto edges() const -> const std::vector<std::array<PatternVertex, 3>> & { return _edges; }
        auto shadow() const -> const std::vector<VertexPair> & { return _shadow; }
        auto name() const -> const std::string & { return _name; }

        auto in_shadow(PatternVertex a, PatternVertex b) const -> bool;

    private:
        int _n;
        std::vector<std::array<PatternVertex, 3>> _edges;
        std::vector<VertexPair> _shadow;
        std::string _name;
    };

    /// { e \ x : x in e in E(F) }, sorted.
    auto shadow(const Pattern & p) -> std::vector<VertexPair>;

    /// F(t): vertex u becomes copies (u-1)*t+1 .. u*t; an edge for every choice of copies of an
    /// original edge.
    auto blow_up(const Pattern & p, int t) -> Pattern;

    enum class CatalogPattern
    {
        Fstar,
        K4minus,
        K4,
        single_edge
    };

    auto pattern_catalog(CatalogPattern which) -> Pattern;
    /// Accepts "Fstar", "K4minus", "K4", "single_edge". Throws DomainError otherwise.
    auto pattern_catalog(std::string_view name) -> Pattern;
    auto is_catalog_name(std::string_view name) -> bool;
}

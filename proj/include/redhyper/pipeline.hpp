#pragma once

#include <redhyper/embed.hpp>
#include <redhyper/hypercore.hpp>
#include <redhyper/rational.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace redhyper
{
    /// Explicit, finite stand-ins for the asymptotic constants of the cleaning and row
    /// preparation argument. Every threshold is a named field.
    struct PipelineConfig
    {
        Rational eps{1, 10};
        Rational delta{1, 20};
        /// Rows to prepare; 0 selects default_rounds(eps).
        int rounds = 0;
        int min_final_indices = 3;
        /// Sizes of the two monochromatic extractions; 0 asks for the largest one.
        int ramsey_target_1 = 0;
        int ramsey_target_2 = 0;
        /// Keep going when the sum-of-squares inequality fails on some triple.
        bool best_effort = false;
        /// Branch-and-bound node cap for each monochromatic extraction before the greedy fallback.
        std::uint64_t ramsey_node_cap = 5'000'000;
        /// Decreasing target sizes |I_0| >= m_1 > m_2 > ... for the glued search; empty selects a default.
        std::vector<int> ladder;
        int threads = 1;

        /// Throws DomainError unless 0 < eps < 1, 0 < delta < eps, rounds >= 0, min_final_indices >= 3.
        auto validate() const -> void;
        auto effective_rounds() const -> int;
    };

    /// ceil(2 / eps^2) + 1.
    auto default_rounds(const Rational & eps) -> int;

    /// Number of S-set levels, ceil(1 / (2 delta)).
    auto level_count(const Rational & delta) -> int;

    /// Bipartite graph between two vertex classes with adjacency bitsets on both sides.
    class BipartiteGraph
    {
    public:
        BipartiteGraph() = default;
        BipartiteGraph(int left, int right);

        auto left_size() const -> int { return static_cast<int>(_left.size()); }
        auto right_size() const -> int { return static_cast<int>(_right.size()); }

        auto add_edge(Vertex l, Vertex r) -> void;
        auto has_edge(Vertex l, Vertex r) const -> bool { return _left[l].test(r); }

        /// Neighbours of left vertex l, as a bitset over the right side.
        auto left_neighbours(Vertex l) const -> const Bitset & { return _left[l]; }
        /// Neighbours of right vertex r, as a bitset over the left side.
        auto right_neighbours(Vertex r) const -> const Bitset & { return _right[r]; }

        auto left_degree(Vertex l) const -> std::int64_t { return static_cast<std::int64_t>(_left[l].count()); }
        auto right_degree(Vertex r) const -> std::int64_t { return static_cast<std::int64_t>(_right[r].count()); }
        auto edge_count() const -> std::int64_t;

        auto operator==(const BipartiteGraph &) const -> bool = default;

    private:
        std::vector<Bitset> _left, _right;
    };

    enum class TripleColour
    {
        blue,
        red
    };

    auto to_string(TripleColour c) -> std::string;

    /// Auxiliary graphs of the cleaning process for a host with indices 1..M.
    ///
    /// For i < j < k, q_low(ijk) joins w in P^{ij} (left) and v in P^{ik} (right) when at least
    /// eps^2 |P^{jk}| vertices u complete wvu to an edge of A^{ijk}; q_high(ijk) joins v in P^{ik}
    /// (left) and w in P^{jk} (right) when at least eps^2 |P^{ij}| vertices u complete uvw.
    struct QGraphSystem
    {
        Rational eps, delta;
        int index_count = 0;
        std::vector<BipartiteGraph> low, high;
        /// Flat M^3 lookup from (i, j, k) to the position in low/high.
        std::vector<int> slots;
        std::map<IndexTriple, TripleColour> colour;
        /// Second colouring: largest level r with |S(r)| >= delta |P^{ik}|, 0 when none.
        std::map<IndexTriple, int> level;
        int r_star = 0;
        /// Working labels of the cleaned index set.
        std::vector<Index> surviving_indices;
        /// original_index[t - 1] is the index of the input host that working label t stands for.
        std::vector<Index> original_index;

        auto q_low(const IndexTriple & t) const -> const BipartiteGraph & { return low[slot(t)]; }
        auto q_high(const IndexTriple & t) const -> const BipartiteGraph & { return high[slot(t)]; }

        /// Adjacency in Q^r between a in P^{rj} and b in P^{rk}, for r < j, r < k, j != k.
        auto q_adjacent(Index r, Index j, Vertex a, Index k, Vertex b) const -> bool;
        /// Neighbours in P^{rk} of a in P^{rj} under Q^r.
        auto q_neighbours(Index r, Index j, Vertex a, Index k) const -> Bitset;

        auto slot(const IndexTriple & t) const -> std::size_t;
    };

    /// Builds q_low and q_high for every triple; original_index is the identity.
    auto build_q_graphs(const ReducedHypergraph & h, const Rational & eps, const Rational & delta = Rational{1, 20},
        int threads = 1) -> QGraphSystem;

    struct SumOfSquares
    {
        /// sum over v in P^{ik} of d_low(v) d_high(v)
        Rational lhs;
        /// (1/4 + eps/2) |P^{ij}| |P^{jk}| |P^{ik}|
        Rational rhs;
        bool holds = false;
    };

    auto check_sum_of_squares(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t) -> SumOfSquares;

    struct ColourSums
    {
        /// sum over v in P^{ik} of d_low(v)^2, and its threshold (1/4 + eps/2) |P^{ij}|^2 |P^{ik}|
        Rational blue_lhs, blue_rhs;
        /// sum over v in P^{ik} of d_high(v)^2, and its threshold (1/4 + eps/2) |P^{jk}|^2 |P^{ik}|
        Rational red_lhs, red_rhs;
    };

    auto colour_sums(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t) -> ColourSums;

    /// Blue iff the low-side square sum reaches its threshold, else red. Wherever the
    /// sum-of-squares inequality holds, red triples are checked to satisfy the high-side
    /// inequality (std::logic_error otherwise). Stores and returns the colouring.
    auto color_triples(const ReducedHypergraph & h, QGraphSystem & q) -> std::map<IndexTriple, TripleColour>;

    /// S^i_{jk}(r) as a bitset over P^{ik}: degree in q_low(ijk) at least (1/2 + r delta) |P^{ij}|.
    auto s_set(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t, int r) -> Bitset;

    /// Largest r in 1..level_count(delta) with |S(r)| >= delta |P^{ik}|; 0 when there is none.
    auto s_level(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t) -> int;

    struct RamseyResult
    {
        std::optional<std::vector<Index>> subset;
        int colour = 0;
        /// False when the node cap forced the greedy fallback; a failure is then not a proof.
        bool exhaustive = true;
        std::uint64_t nodes = 0;
    };

    using TripleColouring = std::function<int(const IndexTriple &)>;

    /// Lexicographically least subset of exactly `target` items all of whose triples share one
    /// colour from `palette`. Exact branch and bound up to node_cap, then greedy.
    /// Throws DomainError when target < 3 or target > |items|.
    auto ramsey_extract(const std::vector<Index> & items, const TripleColouring & colouring, int target,
        const std::vector<int> & palette, std::uint64_t node_cap = 5'000'000) -> RamseyResult;

    /// Largest monochromatic subset (trying sizes from |items| down to 3).
    auto ramsey_extract_largest(const std::vector<Index> & items, const TripleColouring & colouring,
        const std::vector<int> & palette, std::uint64_t node_cap = 5'000'000) -> RamseyResult;

    struct StageFailure
    {
        std::string stage;
        std::string reason;
    };

    /// Line-oriented record of every decision taken by clean / find_fstar / find_glued.
    struct Trace
    {
        std::vector<std::string> lines;

        auto add(std::string line) -> void { lines.push_back(std::move(line)); }
    };

    struct CleanResult
    {
        /// Host restricted to the surviving indices, relabelled 1..m in working order.
        std::optional<ReducedHypergraph> host;
        /// Q-graphs of `host`, with colourings, r_star and the relabelling map.
        QGraphSystem q;
        std::optional<StageFailure> failure;
        /// Sum-of-squares values of the input host, per triple.
        std::map<IndexTriple, SumOfSquares> sum_of_squares;
        bool ramsey_exhaustive = true;

        auto ok() const -> bool { return ! failure.has_value(); }
    };

    /// Cleaning: Q-graphs, sum-of-squares check, blue/red colouring, first monochromatic
    /// extraction (a red set is reversed so that it becomes blue), S-level colouring, second
    /// extraction, and a from-scratch re-verification of the cleaning conclusion.
    auto clean(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace = nullptr) -> CleanResult;

    /// Both clauses of the cleaning conclusion for one triple of a cleaned host, recomputed from
    /// the constituent links without using stored Q-graphs: blue inequality, and
    /// |S(r_star)| >= delta |P^{ik}| > |S(r_star + 1)|.
    auto star_clauses_hold(const ReducedHypergraph & h, const Rational & eps, const Rational & delta,
        const IndexTriple & t, int r_star) -> bool;

    struct QTriangle
    {
        Vertex y = 0;
        Vertex z = 0;

        auto operator<=>(const QTriangle &) const = default;
    };

    /// All triangles x y z of Q^i with y in P^{i j2}, z in P^{i j1}, for i < j1 < j2 < k and x in
    /// S^i_{j1 k}(r_star) and S^i_{j2 k}(r_star). Throws DomainError otherwise.
    auto find_many_triangles(const ReducedHypergraph & h, const QGraphSystem & q, Index i, Index j1, Index j2, Index k,
        Vertex x) -> std::vector<QTriangle>;

    /// Whether the exact margin behind the triangle-count lower bound holds:
    /// 1/4 + eps/2 > (1/2 - r d)(1/2 + (r+1) d)^2 + (1/2 + r d)(1/2 - r d)^2 + 3 d.
    auto triangle_bound_applies(const Rational & eps, const Rational & delta, int r_star) -> bool;

    struct RowRecord
    {
        int round = 0;
        std::vector<Index> input;
        Index r = 0;
        Index m = 0;
        /// Indices j whose S-set contains x.
        std::vector<Index> first_candidates;
        Vertex x = 0;
        Index r_next = 0;
        Vertex y = 0;
        /// z_j in P^{r j} for j in J \ {r_next, m}
        std::map<Index, Vertex> z;
        std::vector<Index> next;
        /// |J| >= delta^2 |I|
        bool bound_met = false;
    };

    struct RowResult
    {
        std::optional<RowRecord> row;
        std::optional<StageFailure> failure;
    };

    /// One row: apex x in P^{rm}, connector y in P^{r r'} and spine vertices z_j with x z_j y a
    /// triangle of Q^r, where r = min I and m = max I. With `strict`, |I| > 2 / delta^2 is
    /// required (DomainError otherwise).
    auto prepare_row(const ReducedHypergraph & h, const QGraphSystem & q, const std::vector<Index> & indices, Index m,
        bool strict = true) -> RowResult;

    /// Every x z_j y of the row is a triangle of Q^r.
    auto row_is_sound(const QGraphSystem & q, const RowRecord & row) -> bool;

    struct ProjectionSet
    {
        int round = 0;
        Vertex x = 0;
        Vertex z = 0;
        /// completions v in P^{m' m}
        Bitset members;
    };

    /// Counting array over the ground set: least element of maximal multiplicity, with the sets
    /// that contain it.
    struct PigeonholeChoice
    {
        int element = -1;
        int multiplicity = 0;
        std::vector<int> containing;
    };

    auto pigeonhole(const std::vector<Bitset> & sets, std::size_t ground) -> PigeonholeChoice;

    struct FstarResult
    {
        std::optional<EmbedCertificate> certificate;
        std::optional<StageFailure> failure;
        CleanResult cleaning;
        std::vector<RowRecord> rows;
        Index m_prime = 0;
        std::vector<ProjectionSet> projections;
        PigeonholeChoice choice;

        auto ok() const -> bool { return certificate.has_value(); }
    };

    /// Runs clean, `rounds` rows, the projection pigeonhole and the completion recovery, and
    /// assembles a reduced image of Fstar in the input host (original indices). The map is
    /// validated before it is returned.
    auto find_fstar(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace = nullptr) -> FstarResult;
}

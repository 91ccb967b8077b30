#pragma once

#include <redhyper/hypercore.hpp>
#include <redhyper/io.hpp>
#include <redhyper/rational.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace redhyper
{
    /// Ordinary 3-graph on vertices 1..n.
    class Plain3Graph
    {
    public:
        /// Triples are sorted internally; repeats, out-of-range or degenerate triples throw DomainError.
        Plain3Graph(int vertex_count, std::vector<std::array<int, 3>> edges);
        explicit Plain3Graph(const TripleSystem & t) : Plain3Graph(t.vertex_count, t.triples) {}

        auto vertex_count() const -> int { return _n; }
        auto edges() const -> const std::vector<std::array<int, 3>> & { return _edges; }
        auto edge_count() const -> std::int64_t { return static_cast<std::int64_t>(_edges.size()); }
        auto has_edge(int a, int b, int c) const -> bool;

        auto to_triple_system() const -> TripleSystem { return {_n, _edges}; }

    private:
        int _n;
        std::vector<std::array<int, 3>> _edges;
        std::set<std::array<int, 3>> _lookup;
    };

    enum class AuditOutcome
    {
        pass,
        sampled_pass,
        fail
    };

    auto to_string(AuditOutcome outcome) -> std::string;

    struct AuditOptions
    {
        bool exhaustive = true;
        /// Largest n accepted in exhaustive mode.
        int exhaustive_cap = 20;
        /// Sampled mode: samples per size and seed.
        std::uint64_t samples = 1000;
        std::uint64_t seed = 0;
        /// Sampled mode: subset sizes to audit; empty means 3..n.
        std::vector<int> sizes;
    };

    struct AuditResult
    {
        AuditOutcome outcome = AuditOutcome::pass;
        /// Most violated U (largest d C(|U|,3) - eta n^3 - e(U); then smallest, then lexicographically least).
        std::vector<int> witness;
        std::int64_t witness_edges = 0;
        Rational witness_deficit{0};
        std::uint64_t subsets_checked = 0;
    };

    /// Checks e(U) >= d C(|U|,3) - eta n^3 for every U (exhaustive) or for sampled U.
    /// Exhaustive mode above the cap throws CapExceeded.
    auto uniform_density_audit(const Plain3Graph & g, const Rational & d, const Rational & eta,
        const AuditOptions & options = {}) -> AuditResult;

    /// Largest s with d C(s,3) <= eta n^3: subsets of at most this size can never violate.
    auto trivial_pass_size(const Rational & d, const Rational & eta, int n) -> int;

    struct CopyCount
    {
        /// Injective maps V(P) -> V(G) sending edges to edges.
        std::uint64_t labelled = 0;
        std::uint64_t automorphisms = 1;
        std::uint64_t unlabelled = 0;
    };

    /// Requires v(P) <= n (DomainError otherwise).
    auto count_copies(const Plain3Graph & g, const Pattern & p) -> CopyCount;

    /// Permutations of V(P) preserving the edge set, by brute force.
    auto automorphism_count(const Pattern & p) -> std::uint64_t;
}

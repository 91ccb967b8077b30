#pragma once

#include <redhyper/hypercore.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace redhyper
{
    /// phi(uv): a vertex together with the class it is claimed to live in.
    struct ClassVertex
    {
        IndexPair cls;
        Vertex vertex = 0;

        auto operator<=>(const ClassVertex &) const = default;
    };

    /// The pair (lambda, phi) carrying a pattern into a reduced hypergraph.
    struct ReducedMap
    {
        /// lambda[u - 1] is the index of pattern vertex u.
        std::vector<Index> lambda;
        std::map<VertexPair, ClassVertex> phi;

        auto operator==(const ReducedMap &) const -> bool = default;
    };

    enum class ViolationKind
    {
        distinctness,
        class_membership,
        missing_edge
    };

    auto to_string(ViolationKind kind) -> std::string;

    struct Violation
    {
        ViolationKind kind;
        /// Offending shadow pair (distinctness, class_membership).
        VertexPair pair{};
        /// Offending pattern edge (missing_edge).
        std::array<PatternVertex, 3> edge{};
    };

    struct ValidationResult
    {
        bool valid = true;
        std::optional<Violation> violation;
    };

    /// Checks the reduced-map conditions in order: for every shadow pair (sorted) distinct
    /// indices and then class membership, then every pattern edge (sorted) lands on a
    /// constituent edge. Dangling references (wrong lambda length, unknown index, missing or
    /// surplus phi entries, vertex outside its named class) raise DomainError instead.
    auto validate_reduced_map(const ReducedHypergraph & h, const Pattern & p, const ReducedMap & m) -> ValidationResult;

    struct SearchOptions
    {
        /// Node limit; every lambda or phi assignment is one node.
        std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
        /// Enumerate every valid map instead of stopping at the first.
        bool count_all = false;
        /// 0 keeps natural ascending value order; otherwise values are tried in a seeded order.
        std::uint64_t seed = 0;
        int threads = 1;
        /// With threads > 1, return the solution of the lowest top-level branch.
        bool deterministic = true;
    };

    struct SearchStats
    {
        std::uint64_t nodes = 0;
        double seconds = 0.0;
    };

    struct EmbedCertificate
    {
        ReducedMap map;
        std::string pattern_id;
        SearchStats stats;
    };

    enum class SearchOutcome
    {
        found,
        not_found,
        budget_exhausted
    };

    auto to_string(SearchOutcome outcome) -> std::string;

    struct SearchResult
    {
        SearchOutcome outcome = SearchOutcome::not_found;
        std::optional<EmbedCertificate> certificate;
        /// Number of valid maps; only meaningful with count_all (then exact unless the budget ran out).
        std::uint64_t count = 0;
        SearchStats stats;
    };

    /// Complete backtracking search for a reduced image of p in h. Lambda is assigned first
    /// (pattern vertices ascending), then phi by fewest remaining values. Every constraint
    /// whose three indices are fixed is kept generalised-arc-consistent through the link
    /// bitsets. not_found is only returned after the whole space has been refuted.
    auto find_reduced_image(const ReducedHypergraph & h, const Pattern & p, const SearchOptions & options = {})
        -> SearchResult;

    struct OracleResult
    {
        bool found = false;
        std::uint64_t count = 0;
        /// Size of the naive (lambda, phi) space that was covered.
        std::uint64_t leaves = 0;
    };

    inline constexpr std::uint64_t default_oracle_cap = 1'000'000'000;

    /// Size of the naive space: sum over lambda with distinct shadow indices of the product of
    /// class sizes over the shadow. Saturates at UINT64_MAX.
    auto oracle_search_space(const ReducedHypergraph & h, const Pattern & p) -> std::uint64_t;

    /// Independent brute force over every (lambda, phi). Edge membership is checked against its
    /// own copy of the raw edge lists. Throws CapExceeded when the space exceeds cap.
    auto exhaustive_oracle(const ReducedHypergraph & h, const Pattern & p, std::uint64_t cap = default_oracle_cap,
        bool count_all = true) -> OracleResult;
}

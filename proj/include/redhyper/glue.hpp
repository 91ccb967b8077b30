#pragma once

#include <redhyper/hypercore.hpp>
#include <redhyper/pipeline.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace redhyper
{
    /// Four indices with one vertex per index pair plus the extra pair a23', a24' sharing a34.
    ///
    /// Edges: a13 a14 a34 in A^{i1 i3 i4}, a12 a13 a23 in A^{i1 i2 i3}, a12 a14 a24 in A^{i1 i2 i4},
    /// a23' a24' a34 in A^{i2 i3 i4}.
    struct GluedConfiguration
    {
        std::array<Index, 4> indices{};
        Vertex a12 = 0, a13 = 0, a14 = 0, a23 = 0, a24 = 0, a34 = 0;
        Vertex a23p = 0, a24p = 0;

        auto operator<=>(const GluedConfiguration &) const = default;
    };

    struct GlueValidation
    {
        bool valid = true;
        /// 0..3 in the order listed on GluedConfiguration, when an edge is missing.
        std::optional<int> missing_edge;
    };

    /// Checks distinct indices, vertex ranges (DomainError on dangling values) and the four edges.
    auto validate_glued(const ReducedHypergraph & h, const GluedConfiguration & g) -> GlueValidation;

    struct GlueRowRecord
    {
        int round = 0;
        std::vector<Index> input;
        Index r = 0;
        Index m = 0;
        Vertex x = 0;
        std::vector<Index> first_candidates;
        /// k_1 > k_2 > ... in selection order
        std::vector<Index> ks;
        /// z_k in P^{r k} for every selected k
        std::map<Index, Vertex> z;
        std::vector<Index> next;
        Index r_next = 0;
        /// Some k had no follower and took vertex 0.
        bool degenerate = false;
        int target = 0;
        /// |I| >= (target + 1) / delta^target
        bool hypothesis_met = false;
    };

    struct GlueRowResult
    {
        std::optional<GlueRowRecord> row;
        std::optional<StageFailure> failure;
    };

    /// Row with the all-pairs triangle property: for j < k in J \ m there is y in P^{rj} with
    /// x z_k y a triangle of Q^r. Stops once |J| = |{m, k_1, ...}| reaches m2_target and fails
    /// when the candidates run out first.
    auto prepare_row_glue(const ReducedHypergraph & h, const QGraphSystem & q, const std::vector<Index> & indices,
        Index m, int m2_target) -> GlueRowResult;

    /// Exhaustive re-check of the all-pairs property by direct Q lookups.
    auto glue_row_is_sound(const ReducedHypergraph & h, const QGraphSystem & q, const GlueRowRecord & row) -> bool;

    /// ladder[0] = |I_0|, then one less per row, for ceil(1/eps^2) + 1 rows but never below
    /// min_final_indices.
    auto default_ladder(int initial, const Rational & eps, int min_final_indices) -> std::vector<int>;

    struct GlueResult
    {
        std::optional<GluedConfiguration> configuration;
        std::optional<StageFailure> failure;
        CleanResult cleaning;
        std::vector<GlueRowRecord> rows;
        std::vector<int> ladder;
        Index m_prime = 0;
        PigeonholeChoice choice;

        auto ok() const -> bool { return configuration.has_value(); }
    };

    /// Cleaning, a ladder of glue rows, the two-set projection pigeonhole and the recovery of
    /// y, u1, u2. The configuration uses original indices and is validated before it is returned.
    auto find_glued(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace = nullptr) -> GlueResult;

    struct GlueOracleResult
    {
        bool found = false;
        std::uint64_t count = 0;
        /// Naive assignment space: ordered index 4-tuples times the eight class sizes.
        std::uint64_t space = 0;
        std::optional<GluedConfiguration> first;
    };

    inline constexpr std::uint64_t default_glue_oracle_cap = 2'000'000'000;

    /// Every ordered 4-tuple of distinct indices and every vertex choice. Throws CapExceeded
    /// when the naive space exceeds cap. With count_all false it stops at the first hit.
    auto brute_force_glued(const ReducedHypergraph & h, std::uint64_t cap = default_glue_oracle_cap,
        bool count_all = true) -> GlueOracleResult;

    auto glued_search_space(const ReducedHypergraph & h) -> std::uint64_t;
}

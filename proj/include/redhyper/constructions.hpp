#pragma once

#include <redhyper/hypercore.hpp>
#include <redhyper/plaingraph.hpp>
#include <redhyper/rational.hpp>

#include <cstdint>
#include <vector>

namespace redhyper
{
    /// Tournament on vertices 1..n, one orientation bit per pair u < v (true = u -> v).
    class Tournament
    {
    public:
        static auto random(int n, std::uint64_t seed) -> Tournament;
        static auto transitive(int n) -> Tournament;
        /// Bits in lexicographic pair order (1,2), (1,3), ..., (n-1,n).
        static auto from_bits(int n, std::vector<bool> bits) -> Tournament;

        auto vertex_count() const -> int { return _n; }
        /// Orientation of the pair {u, v}, u < v: true when u -> v.
        auto low_to_high(int u, int v) const -> bool;
        auto beats(int u, int v) const -> bool;

    private:
        Tournament(int n, std::vector<bool> bits);

        int _n;
        std::vector<bool> _bits;
    };

    /// Case table over the 8 orientations of a triple i < j < k; true = low -> high.
    auto is_cyclic_orientation(bool ij, bool jk, bool ik) -> bool;

    /// All triples spanning a directed 3-cycle. Requires n >= 3.
    auto cyclic_triple_3graph(const Tournament & t) -> Plain3Graph;

    /// Classes {0, 1} encode the orientation of each index pair (0 = low -> high); A^{ijk} holds
    /// the two cyclic orientation triples, so every constituent has density exactly 1/4.
    auto orientation_reduced(int m) -> ReducedHypergraph;

    /// Every constituent gets exactly ceil(d p^3) distinct uniformly drawn edges.
    auto random_box_dense(int m, int class_size, const Rational & d, std::uint64_t seed) -> ReducedHypergraph;

    /// As random_box_dense, but each class size is drawn uniformly from 1..max_class_size first;
    /// every constituent gets ceil(d |P^{ij}||P^{ik}||P^{jk}|) edges.
    auto random_box_dense_mixed(int m, int max_class_size, const Rational & d, std::uint64_t seed)
        -> ReducedHypergraph;

    /// Class vertex a becomes copies a*t .. a*t+t-1; every edge lifts to all t^3 copy choices.
    auto reduced_blow_up(const ReducedHypergraph & h, int t) -> ReducedHypergraph;
}

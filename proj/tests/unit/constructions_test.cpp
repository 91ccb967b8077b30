#include "../support/oracles.hpp"

#include <redhyper/constructions.hpp>
#include <redhyper/embed.hpp>
#include <redhyper/errors.hpp>

#include <gtest/gtest.h>

using namespace redhyper;

namespace
{
    /// Cyclic iff the three pair orientations do not agree with any linear order.
    auto cyclic_by_cases(bool ij, bool jk, bool ik) -> bool
    {
        // i->j->k->i or i->k->j->i
        return (ij && jk && ! ik) || (! ij && ! jk && ik);
    }
}

TEST(Tournaments, CaseTableMatchesDirectCheck)
{
    for (int bits = 0; bits < 8; ++bits) {
        bool ij = bits & 1, jk = bits & 2, ik = bits & 4;
        EXPECT_EQ(is_cyclic_orientation(ij, jk, ik), cyclic_by_cases(ij, jk, ik)) << bits;
    }
}

TEST(Tournaments, EveryFourVertexTournamentHasAtMostTwoCyclicTriples)
{
    int worst = 0;
    for (unsigned bits = 0; bits < 64; ++bits) {
        std::vector<bool> b;
        for (int p = 0; p < 6; ++p)
            b.push_back(bits >> p & 1);
        auto g = cyclic_triple_3graph(Tournament::from_bits(4, b));
        ASSERT_EQ(g.edge_count(), oracle::cyclic_triangles_on_four(bits)) << bits;
        worst = std::max(worst, oracle::cyclic_triangles_on_four(bits));
    }
    EXPECT_EQ(worst, 2);
}

TEST(Tournaments, TransitiveAndThreeCycle)
{
    for (int n = 3; n <= 9; ++n)
        EXPECT_EQ(cyclic_triple_3graph(Tournament::transitive(n)).edge_count(), 0);
    auto c3 = cyclic_triple_3graph(Tournament::from_bits(3, {true, false, true}));
    EXPECT_EQ(c3.edge_count(), 1);
    EXPECT_THROW(cyclic_triple_3graph(Tournament::transitive(2)), DomainError);
}

TEST(Tournaments, CyclicTripleGraphsAreK4MinusFree)
{
    for (int n = 4; n <= 12; ++n)
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            auto g = cyclic_triple_3graph(Tournament::random(n, seed));
            std::set<std::array<int, 3>> edges(g.edges().begin(), g.edges().end());
            for (int a = 1; a <= n; ++a)
                for (int b = a + 1; b <= n; ++b)
                    for (int c = b + 1; c <= n; ++c)
                        for (int d = c + 1; d <= n; ++d)
                            ASSERT_LE(oracle::edges_inside(edges, {a, b, c, d}), 2);
        }
}

TEST(Tournaments, EdgeCountNearQuarter)
{
    const int n = 40;
    const double all = n * (n - 1) * (n - 2) / 6.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = cyclic_triple_3graph(Tournament::random(n, seed));
        EXPECT_NEAR(g.edge_count() / all, 0.25, 0.025) << seed;
    }
}

TEST(Orientation, ExactQuarterDensity)
{
    for (int m = 3; m <= 8; ++m) {
        auto h = orientation_reduced(m);
        for (const auto & t : h.triples()) {
            ASSERT_EQ(constituent_density(h, t), Rational(1, 4));
            // the two edges are exactly the cyclic orientation triples
            for (auto [a, b, c] : h.constituent(t).edges())
                ASSERT_TRUE(cyclic_by_cases(a == 0, c == 0, b == 0));
        }
        EXPECT_TRUE(is_box_dense(h, Rational{1, 4}).dense);
        EXPECT_FALSE(is_box_dense(h, Rational{1, 4} + Rational{1, 1000000}).dense);
    }
}

TEST(RandomDense, ExactEdgeCounts)
{
    auto full = random_box_dense(4, 3, Rational{1}, 9);
    auto none = random_box_dense(4, 3, Rational{0}, 9);
    for (const auto & t : full.triples()) {
        EXPECT_EQ(full.constituent(t).edge_count(), 27);
        EXPECT_EQ(none.constituent(t).edge_count(), 0);
    }
    auto h = random_box_dense(6, 4, Rational{1, 4} + Rational{1, 10}, 2024);
    EXPECT_TRUE(is_box_dense(h, Rational{7, 20}).dense);
    for (const auto & t : h.triples())
        EXPECT_EQ(h.constituent(t).edge_count(), 23);  // ceil(7/20 * 64)

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = random_box_dense_mixed(5, 4, Rational{13, 50}, seed);
        ASSERT_TRUE(is_box_dense(g, Rational{13, 50}).dense);
        for (const auto & [lo, hi] : g.pairs()) {
            ASSERT_GE(g.class_size(lo, hi), 1);
            ASSERT_LE(g.class_size(lo, hi), 4);
        }
    }
    EXPECT_EQ(random_box_dense(5, 3, Rational{1, 2}, 17), random_box_dense(5, 3, Rational{1, 2}, 17));
    EXPECT_THROW(random_box_dense(4, 2, Rational{3, 2}, 1), DomainError);
    EXPECT_THROW(random_box_dense(4, 0, Rational{1, 2}, 1), DomainError);
}

TEST(BlowUp, PreservesDensitiesAndFindStatus)
{
    auto h = orientation_reduced(4);
    EXPECT_EQ(reduced_blow_up(h, 1), h);
    auto b3 = reduced_blow_up(h, 3);
    for (const auto & t : b3.triples())
        EXPECT_EQ(constituent_density(b3, t), Rational(1, 4));
    EXPECT_THROW(reduced_blow_up(h, 0), DomainError);

    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto g = random_box_dense_mixed(4, 2, Rational{3, 10}, seed);
        auto g2 = reduced_blow_up(g, 2);
        for (const auto & t : g.triples())
            ASSERT_EQ(constituent_density(g, t), constituent_density(g2, t));
        // copies of one vertex share every edge, so a lifted edge keeps its preimage
        auto k4m = pattern_catalog(CatalogPattern::K4minus);
        EXPECT_EQ(exhaustive_oracle(g, k4m, default_oracle_cap, false).found,
            exhaustive_oracle(g2, k4m, default_oracle_cap, false).found);
    }
    auto o5 = orientation_reduced(5);
    EXPECT_FALSE(exhaustive_oracle(reduced_blow_up(o5, 2), pattern_catalog(CatalogPattern::K4minus),
        default_oracle_cap, false)
                     .found);
}

#include "../support/oracles.hpp"

#include <redhyper/constructions.hpp>
#include <redhyper/errors.hpp>
#include <redhyper/plaingraph.hpp>

#include <gtest/gtest.h>

using namespace redhyper;

namespace
{
    auto complete_graph(int n) -> Plain3Graph
    {
        std::vector<std::array<int, 3>> e;
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                for (int c = b + 1; c <= n; ++c)
                    e.push_back({a, b, c});
        return Plain3Graph(n, e);
    }

    auto random_graph(std::uint64_t seed, int n, std::uint64_t num, std::uint64_t den) -> Plain3Graph
    {
        oracle::SplitMix rng(seed);
        std::vector<std::array<int, 3>> e;
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                for (int c = b + 1; c <= n; ++c)
                    if (rng.chance(num, den))
                        e.push_back({a, b, c});
        return Plain3Graph(n, e);
    }

    auto choose3(std::int64_t s) -> std::int64_t { return s * (s - 1) * (s - 2) / 6; }

    struct NaiveAudit
    {
        bool pass = true;
        std::vector<int> witness;
        Rational deficit{0};
    };

    /// Every subset by bitmask, edges recounted by triple enumeration.
    auto naive_audit(const Plain3Graph & g, Rational d, Rational eta) -> NaiveAudit
    {
        const int n = g.vertex_count();
        std::set<std::array<int, 3>> edges(g.edges().begin(), g.edges().end());
        NaiveAudit best;
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<int> u;
            for (int v = 0; v < n; ++v)
                if (mask >> v & 1)
                    u.push_back(v + 1);
            auto s = static_cast<std::int64_t>(u.size());
            Rational deficit = d * choose3(s) - eta * (n * n * n) - oracle::edges_inside(edges, u);
            if (deficit <= 0)
                continue;
            bool better = best.pass || deficit > best.deficit ||
                (deficit == best.deficit && (u.size() < best.witness.size() || (u.size() == best.witness.size() && u < best.witness)));
            if (better) {
                best.pass = false;
                best.witness = u;
                best.deficit = deficit;
            }
        }
        return best;
    }
}

TEST(Audit, CompleteAndEmptySix)
{
    auto k6 = complete_graph(6);
    for (auto d : {Rational{1}, Rational{1, 2}, Rational{0}})
        EXPECT_EQ(uniform_density_audit(k6, d, Rational{0}).outcome, AuditOutcome::pass);

    auto empty = Plain3Graph(6, {});
    auto r = uniform_density_audit(empty, Rational{1, 2}, Rational{0});
    EXPECT_EQ(r.outcome, AuditOutcome::fail);
    EXPECT_EQ(r.witness, (std::vector<int>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(r.witness_edges, 0);
    EXPECT_EQ(r.witness_deficit, Rational(10));
}

TEST(Audit, MatchesBitmaskOracle)
{
    const std::vector<std::pair<Rational, Rational>> params{
        {Rational{1, 4}, Rational{0}}, {Rational{1, 2}, Rational{1, 100}}, {Rational{1, 3}, Rational{1, 200}}};
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto g = random_graph(seed, 6 + static_cast<int>(seed % 4), 1, 3);
        for (auto [d, eta] : params) {
            auto r = uniform_density_audit(g, d, eta);
            auto n = naive_audit(g, d, eta);
            ASSERT_EQ(r.outcome == AuditOutcome::pass, n.pass) << seed;
            if (! n.pass) {
                ASSERT_EQ(r.witness, n.witness);
                ASSERT_EQ(r.witness_deficit, n.deficit);
            }
        }
    }
}

TEST(Audit, CyclicTriplesTwelveIsReproducible)
{
    auto g = cyclic_triple_3graph(Tournament::random(12, 5));
    auto a = uniform_density_audit(g, Rational{1, 4}, Rational{1, 20});
    auto b = uniform_density_audit(g, Rational{1, 4}, Rational{1, 20});
    EXPECT_EQ(a.outcome, b.outcome);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_EQ(a.subsets_checked, 4095u);
}

TEST(Audit, SampledModeNeverClaimsPass)
{
    auto k = complete_graph(25);
    AuditOptions options;
    EXPECT_THROW(uniform_density_audit(k, Rational{1}, Rational{0}, options), CapExceeded);
    options.exhaustive = false;
    options.samples = 50;
    options.seed = 3;
    auto r = uniform_density_audit(k, Rational{1}, Rational{0}, options);
    EXPECT_EQ(r.outcome, AuditOutcome::sampled_pass);
    EXPECT_EQ(to_string(r.outcome), "sampled-pass");

    auto sparse = Plain3Graph(25, {});
    options.sizes = {25};
    auto f = uniform_density_audit(sparse, Rational{1, 2}, Rational{0}, options);
    EXPECT_EQ(f.outcome, AuditOutcome::fail);
    EXPECT_EQ(f.witness.size(), 25u);
}

TEST(Audit, TrivialPassThreshold)
{
    for (int n = 4; n <= 10; ++n)
        for (auto [d, eta] : std::vector<std::pair<Rational, Rational>>{
                 {Rational{1}, Rational{1, 100}}, {Rational{1, 2}, Rational{1, 30}}, {Rational{1, 4}, Rational{1, 4}}}) {
            const int s = trivial_pass_size(d, eta, n);
            const Rational slack = eta * (n * n * n);
            ASSERT_LE(d * choose3(s), slack);
            if (s < n)
                ASSERT_GT(d * choose3(s + 1), slack);
            // the empty graph cannot fail on sets of at most s vertices
            auto r = uniform_density_audit(Plain3Graph(n, {}), d, eta);
            if (r.outcome == AuditOutcome::fail)
                ASSERT_GT(static_cast<int>(r.witness.size()), s);
        }
}

TEST(Copies, SingleEdgeInK5)
{
    auto c = count_copies(complete_graph(5), pattern_catalog(CatalogPattern::single_edge));
    EXPECT_EQ(c.labelled, 60u);
    EXPECT_EQ(c.automorphisms, 6u);
    EXPECT_EQ(c.unlabelled, 10u);
}

TEST(Copies, AutomorphismsOfCatalog)
{
    EXPECT_EQ(automorphism_count(pattern_catalog(CatalogPattern::K4)), 24u);
    EXPECT_EQ(automorphism_count(pattern_catalog(CatalogPattern::K4minus)), 6u);
    auto fstar = pattern_catalog(CatalogPattern::Fstar);
    std::vector<std::array<int, 3>> e(fstar.edges().begin(), fstar.edges().end());
    EXPECT_GE(count_copies(Plain3Graph(5, e), fstar).labelled, 1u);
}

TEST(Copies, AgreeWithNaiveInjections)
{
    const std::vector<CatalogPattern> patterns{
        CatalogPattern::single_edge, CatalogPattern::K4minus, CatalogPattern::K4, CatalogPattern::Fstar};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 5 + static_cast<int>(seed % 4);
        auto g = random_graph(seed, n, 1, 2);
        std::set<std::array<int, 3>> edges(g.edges().begin(), g.edges().end());
        for (auto which : patterns) {
            auto p = pattern_catalog(which);
            std::vector<std::array<int, 3>> pe(p.edges().begin(), p.edges().end());
            ASSERT_EQ(count_copies(g, p).labelled, oracle::naive_copy_count(n, edges, p.vertex_count(), pe));
        }
    }
    EXPECT_THROW(count_copies(Plain3Graph(3, {{1, 2, 3}}), pattern_catalog(CatalogPattern::K4)), DomainError);
}

TEST(Copies, AddingEdgesNeverDecreasesCount)
{
    auto p = pattern_catalog(CatalogPattern::K4minus);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        auto g = random_graph(seed, 8, 1, 4);
        auto edges = g.edges();
        oracle::SplitMix rng(seed * 31);
        auto before = count_copies(g, p).labelled;
        for (int step = 0; step < 5; ++step) {
            std::array<int, 3> t{rng.between(1, 8), rng.between(1, 8), rng.between(1, 8)};
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2] || g.has_edge(t[0], t[1], t[2]))
                continue;
            edges.push_back(t);
            g = Plain3Graph(8, edges);
            auto after = count_copies(g, p).labelled;
            ASSERT_GE(after, before);
            before = after;
        }
    }
}

TEST(Copies, CyclicTripleGraphsHaveNoK4Minus)
{
    auto p = pattern_catalog(CatalogPattern::K4minus);
    for (std::uint64_t seed = 1; seed <= 30; ++seed)
        EXPECT_EQ(count_copies(cyclic_triple_3graph(Tournament::random(10, seed)), p).labelled, 0u);
}

TEST(Plain, RejectsMalformedTriples)
{
    EXPECT_THROW(Plain3Graph(4, {{1, 1, 2}}), DomainError);
    EXPECT_THROW(Plain3Graph(4, {{1, 2, 5}}), DomainError);
    EXPECT_THROW(Plain3Graph(4, {{1, 2, 3}, {3, 2, 1}}), DomainError);
}

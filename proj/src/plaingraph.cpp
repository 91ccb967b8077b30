#include <redhyper/errors.hpp>
#include <redhyper/plaingraph.hpp>
#include <redhyper/rng.hpp>

#include <algorithm>
#include <bit>
#include <numeric>

namespace redhyper
{
    Plain3Graph::Plain3Graph(int vertex_count, std::vector<std::array<int, 3>> edges) : _n(vertex_count)
    {
        if (_n < 1)
            throw DomainError("3-graph needs at least one vertex");
        for (auto & e : edges) {
            std::sort(e.begin(), e.end());
            if (e[0] < 1 || e[2] > _n)
                throw DomainError("triple vertex out of range");
            if (e[0] == e[1] || e[1] == e[2])
                throw DomainError("triple needs three distinct vertices");
            if (! _lookup.insert(e).second)
                throw DomainError("duplicate triple");
        }
        _edges.assign(_lookup.begin(), _lookup.end());
    }

    auto Plain3Graph::has_edge(int a, int b, int c) const -> bool
    {
        std::array<int, 3> e{a, b, c};
        std::sort(e.begin(), e.end());
        return _lookup.count(e) != 0;
    }

    auto to_string(AuditOutcome outcome) -> std::string
    {
        switch (outcome) {
        case AuditOutcome::pass:
            return "pass";
        case AuditOutcome::sampled_pass:
            return "sampled-pass";
        case AuditOutcome::fail:
            return "fail";
        }
        return "?";
    }

    namespace
    {
        auto choose3(std::int64_t s) -> std::int64_t { return s < 3 ? 0 : s * (s - 1) * (s - 2) / 6; }

        /// Tracks the most violated subset seen so far.
        struct WorstSubset
        {
            Rational d, slack;
            std::optional<Rational> deficit;
            std::vector<int> vertices;
            std::int64_t edges = 0;

            auto offer(std::vector<int> u, std::int64_t e) -> void
            {
                auto value = d * choose3(static_cast<std::int64_t>(u.size())) - slack - e;
                if (value <= 0)
                    return;
                bool better = ! deficit || value > *deficit ||
                    (value == *deficit &&
                        (u.size() < vertices.size() || (u.size() == vertices.size() && u < vertices)));
                if (better) {
                    deficit = value;
                    vertices = std::move(u);
                    edges = e;
                }
            }
        };
    }

    auto trivial_pass_size(const Rational & d, const Rational & eta, int n) -> int
    {
        const auto slack = eta * (std::int64_t{n} * n * n);
        int s = 0;
        while (s < n && d * choose3(s + 1) <= slack)
            ++s;
        return s;
    }

    auto uniform_density_audit(const Plain3Graph & g, const Rational & d, const Rational & eta,
        const AuditOptions & options) -> AuditResult
    {
        const int n = g.vertex_count();
        WorstSubset worst{d, eta * (std::int64_t{n} * n * n), std::nullopt, {}, 0};
        AuditResult result;

        if (options.exhaustive) {
            if (n > options.exhaustive_cap)
                throw CapExceeded("exhaustive audit is capped at n = " + std::to_string(options.exhaustive_cap) +
                    "; use sampled mode");
            // link[v][a]: mask of b with {v, a, b} an edge (0-based)
            std::vector<std::vector<std::uint32_t>> link(n, std::vector<std::uint32_t>(n, 0));
            for (auto [a, b, c] : g.edges()) {
                --a, --b, --c;
                link[a][b] |= 1u << c, link[a][c] |= 1u << b;
                link[b][a] |= 1u << c, link[b][c] |= 1u << a;
                link[c][a] |= 1u << b, link[c][b] |= 1u << a;
            }
            const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
            std::vector<std::int32_t> edges_in(static_cast<std::size_t>(full) + 1, 0);
            for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
                const int v = std::countr_zero(mask);
                const std::uint32_t rest = mask & (mask - 1);
                std::int32_t through_v = 0;
                for (std::uint32_t r = rest; r; r &= r - 1)
                    through_v += std::popcount(link[v][std::countr_zero(r)] & rest);
                edges_in[mask] = edges_in[rest] + through_v / 2;

                ++result.subsets_checked;
                const auto size = std::popcount(mask);
                if (d * choose3(size) - worst.slack - edges_in[mask] > 0) {
                    std::vector<int> u;
                    for (std::uint32_t r = mask; r; r &= r - 1)
                        u.push_back(std::countr_zero(r) + 1);
                    worst.offer(std::move(u), edges_in[mask]);
                }
                if (mask == full)
                    break;
            }
        }
        else {
            Rng rng(options.seed);
            auto sizes = options.sizes;
            if (sizes.empty())
                for (int s = 3; s <= n; ++s)
                    sizes.push_back(s);
            for (int s : sizes) {
                if (s < 0 || s > n)
                    throw DomainError("audit size out of range");
                for (std::uint64_t sample = 0; sample < options.samples; ++sample) {
                    std::vector<int> u;
                    for (auto v : rng.sample(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s)))
                        u.push_back(static_cast<int>(v) + 1);
                    std::sort(u.begin(), u.end());
                    std::int64_t e = 0;
                    for (std::size_t x = 0; x < u.size(); ++x)
                        for (std::size_t y = x + 1; y < u.size(); ++y)
                            for (std::size_t z = y + 1; z < u.size(); ++z)
                                e += g.has_edge(u[x], u[y], u[z]) ? 1 : 0;
                    ++result.subsets_checked;
                    worst.offer(std::move(u), e);
                }
            }
        }

        if (worst.deficit) {
            result.outcome = AuditOutcome::fail;
            result.witness = worst.vertices;
            result.witness_edges = worst.edges;
            result.witness_deficit = *worst.deficit;
        }
        else
            result.outcome = options.exhaustive ? AuditOutcome::pass : AuditOutcome::sampled_pass;
        return result;
    }

    auto automorphism_count(const Pattern & p) -> std::uint64_t
    {
        std::vector<int> perm(static_cast<std::size_t>(p.vertex_count()));
        std::iota(perm.begin(), perm.end(), 1);
        std::set<std::array<int, 3>> edges(p.edges().begin(), p.edges().end());
        std::uint64_t count = 0;
        do {
            bool preserved = true;
            for (const auto & e : p.edges()) {
                std::array<int, 3> image{perm[e[0] - 1], perm[e[1] - 1], perm[e[2] - 1]};
                std::sort(image.begin(), image.end());
                if (! edges.count(image)) {
                    preserved = false;
                    break;
                }
            }
            count += preserved ? 1 : 0;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return count;
    }

    namespace
    {
        struct CopyCounter
        {
            const Plain3Graph & g;
            const Pattern & p;
            /// edges of P whose largest vertex is u, indexed by u
            std::vector<std::vector<std::array<int, 3>>> closing;
            std::vector<int> image;
            std::vector<bool> used;
            std::uint64_t count = 0;

            auto run(int u) -> void
            {
                if (u > p.vertex_count()) {
                    ++count;
                    return;
                }
                for (int v = 1; v <= g.vertex_count(); ++v) {
                    if (used[v])
                        continue;
                    image[u] = v;
                    bool ok = true;
                    for (const auto & e : closing[u])
                        if (! g.has_edge(image[e[0]], image[e[1]], image[e[2]])) {
                            ok = false;
                            break;
                        }
                    if (! ok)
                        continue;
                    used[v] = true;
                    run(u + 1);
                    used[v] = false;
                }
            }
        };
    }

    auto count_copies(const Plain3Graph & g, const Pattern & p) -> CopyCount
    {
        if (p.vertex_count() > g.vertex_count())
            throw DomainError("pattern has more vertices than the host");
        CopyCounter counter{g, p, std::vector<std::vector<std::array<int, 3>>>(p.vertex_count() + 1),
            std::vector<int>(p.vertex_count() + 1, 0), std::vector<bool>(g.vertex_count() + 1, false), 0};
        for (const auto & e : p.edges())
            counter.closing[e[2]].push_back(e);
        counter.run(1);

        CopyCount out;
        out.labelled = counter.count;
        out.automorphisms = automorphism_count(p);
        out.unlabelled = out.labelled / out.automorphisms;
        return out;
    }
}

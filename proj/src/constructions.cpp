#include <redhyper/constructions.hpp>
#include <redhyper/errors.hpp>
#include <redhyper/rng.hpp>

namespace redhyper
{
    namespace
    {
        auto pair_position(int n, int u, int v) -> std::size_t
        {
            // pairs (1,2), (1,3), ..., (1,n), (2,3), ...
            auto before = static_cast<std::size_t>(u - 1) * (2 * static_cast<std::size_t>(n) - u) / 2;
            return before + static_cast<std::size_t>(v - u - 1);
        }

        auto fill_constituents(ReducedHypergraphBuilder & b, const Rational & d, Rng & rng) -> void
        {
            const int m = b.index_count();
            for (Index i = 1; i <= m; ++i)
                for (Index j = i + 1; j <= m; ++j)
                    for (Index k = j + 1; k <= m; ++k) {
                        const std::uint64_t pij = b.class_size(i, j), pik = b.class_size(i, k), pjk = b.class_size(j, k);
                        const auto cells = pij * pik * pjk;
                        const auto wanted = static_cast<std::uint64_t>(ceil(d * static_cast<std::int64_t>(cells)));
                        for (auto cell : rng.sample(cells, wanted)) {
                            auto c = static_cast<Vertex>(cell % pjk);
                            auto bb = static_cast<Vertex>((cell / pjk) % pik);
                            auto a = static_cast<Vertex>(cell / (pjk * pik));
                            b.add_edge(i, j, k, a, bb, c);
                        }
                    }
        }

        auto check_density(const Rational & d) -> void
        {
            if (d < 0 || d > 1)
                throw DomainError("density must lie in [0, 1]");
        }
    }

    Tournament::Tournament(int n, std::vector<bool> bits) : _n(n), _bits(std::move(bits)) {}

    auto Tournament::random(int n, std::uint64_t seed) -> Tournament
    {
        if (n < 1)
            throw DomainError("tournament needs at least one vertex");
        Rng rng(seed);
        std::vector<bool> bits(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (std::size_t p = 0; p < bits.size(); ++p)
            bits[p] = rng.coin();
        return Tournament(n, std::move(bits));
    }

    auto Tournament::transitive(int n) -> Tournament
    {
        if (n < 1)
            throw DomainError("tournament needs at least one vertex");
        return Tournament(n, std::vector<bool>(static_cast<std::size_t>(n) * (n - 1) / 2, true));
    }

    auto Tournament::from_bits(int n, std::vector<bool> bits) -> Tournament
    {
        if (n < 1 || bits.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
            throw DomainError("tournament needs one bit per pair");
        return Tournament(n, std::move(bits));
    }

    auto Tournament::low_to_high(int u, int v) const -> bool
    {
        if (! (1 <= u && u < v && v <= _n))
            throw DomainError("pair must satisfy 1 <= u < v <= n");
        return _bits[pair_position(_n, u, v)];
    }

    auto Tournament::beats(int u, int v) const -> bool
    {
        if (u == v)
            throw DomainError("a vertex does not play itself");
        return u < v ? low_to_high(u, v) : ! low_to_high(v, u);
    }

    auto is_cyclic_orientation(bool ij, bool jk, bool ik) -> bool
    {
        // index = ij*4 + jk*2 + ik
        static constexpr bool table[8] = {
            false, // 000: j->i, k->j, k->i   transitive
            true,  // 001: j->i, k->j, i->k   i->k->j->i
            false, // 010
            false, // 011
            false, // 100
            false, // 101
            true,  // 110: i->j, j->k, k->i
            false, // 111
        };
        return table[(ij ? 4 : 0) + (jk ? 2 : 0) + (ik ? 1 : 0)];
    }

    auto cyclic_triple_3graph(const Tournament & t) -> Plain3Graph
    {
        const int n = t.vertex_count();
        if (n < 3)
            throw DomainError("cyclic triple graph needs n >= 3");
        std::vector<std::array<int, 3>> edges;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                for (int k = j + 1; k <= n; ++k)
                    if (is_cyclic_orientation(t.low_to_high(i, j), t.low_to_high(j, k), t.low_to_high(i, k)))
                        edges.push_back({i, j, k});
        return Plain3Graph(n, std::move(edges));
    }

    auto orientation_reduced(int m) -> ReducedHypergraph
    {
        if (m < 3)
            throw DomainError("orientation host needs M >= 3");
        ReducedHypergraphBuilder b(m);
        b.set_all_class_sizes(2);
        for (Index i = 1; i <= m; ++i)
            for (Index j = i + 1; j <= m; ++j)
                for (Index k = j + 1; k <= m; ++k)
                    for (Vertex a = 0; a < 2; ++a)
                        for (Vertex bb = 0; bb < 2; ++bb)
                            for (Vertex c = 0; c < 2; ++c)
                                if (is_cyclic_orientation(a == 0, c == 0, bb == 0))
                                    b.add_edge(i, j, k, a, bb, c);
        return b.build();
    }

    auto random_box_dense(int m, int class_size, const Rational & d, std::uint64_t seed) -> ReducedHypergraph
    {
        check_density(d);
        if (m < 1 || class_size < 1)
            throw DomainError("random host needs M >= 1 and class size >= 1");
        ReducedHypergraphBuilder b(m);
        b.set_all_class_sizes(class_size);
        Rng rng(seed);
        fill_constituents(b, d, rng);
        return b.build();
    }

    auto random_box_dense_mixed(int m, int max_class_size, const Rational & d, std::uint64_t seed)
        -> ReducedHypergraph
    {
        check_density(d);
        if (m < 1 || max_class_size < 1)
            throw DomainError("random host needs M >= 1 and class size >= 1");
        ReducedHypergraphBuilder b(m);
        Rng rng(seed);
        for (Index i = 1; i <= m; ++i)
            for (Index j = i + 1; j <= m; ++j)
                b.set_class_size(i, j, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_class_size))));
        fill_constituents(b, d, rng);
        return b.build();
    }

    auto reduced_blow_up(const ReducedHypergraph & h, int t) -> ReducedHypergraph
    {
        if (t < 1)
            throw DomainError("blow-up factor must be at least 1");
        const int m = h.index_count();
        ReducedHypergraphBuilder b(m);
        for (const auto & p : h.pairs())
            b.set_class_size(p.lo, p.hi, h.class_size(p) * t);
        for (const auto & tr : h.triples())
            for (auto [a, bb, c] : h.constituent(tr).edges())
                for (int x = 0; x < t; ++x)
                    for (int y = 0; y < t; ++y)
                        for (int z = 0; z < t; ++z)
                            b.add_edge(tr.i, tr.j, tr.k, a * t + x, bb * t + y, c * t + z);
        return b.build();
    }
}

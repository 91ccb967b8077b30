#include <redhyper/errors.hpp>
#include <redhyper/glue.hpp>

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace redhyper
{
    namespace
    {
        auto join(const std::vector<Index> & xs) -> std::string
        {
            std::string out;
            for (std::size_t n = 0; n < xs.size(); ++n) {
                if (n)
                    out += ',';
                out += std::to_string(xs[n]);
            }
            return out.empty() ? "-" : out;
        }

        auto note(Trace * trace, const std::string & line) -> void
        {
            if (trace)
                trace->add(line);
        }

        auto least_bit(const Bitset & b) -> int
        {
            auto pos = b.find_first();
            return pos == Bitset::npos ? -1 : static_cast<int>(pos);
        }

        auto check_vertex(const ReducedHypergraph & h, Index a, Index b, Vertex v) -> void
        {
            if (v < 0 || v >= h.class_size(a, b))
                throw DomainError("vertex " + std::to_string(v) + " outside P^{" + std::to_string(a) + "," +
                    std::to_string(b) + "}");
        }
    }

    auto validate_glued(const ReducedHypergraph & h, const GluedConfiguration & g) -> GlueValidation
    {
        auto [i1, i2, i3, i4] = g.indices;
        for (auto i : g.indices)
            if (! h.valid_index(i))
                throw DomainError("unknown index " + std::to_string(i));
        auto sorted = g.indices;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DomainError("glued configuration repeats an index");
        check_vertex(h, i1, i2, g.a12);
        check_vertex(h, i1, i3, g.a13);
        check_vertex(h, i1, i4, g.a14);
        check_vertex(h, i2, i3, g.a23);
        check_vertex(h, i2, i4, g.a24);
        check_vertex(h, i3, i4, g.a34);
        check_vertex(h, i2, i3, g.a23p);
        check_vertex(h, i2, i4, g.a24p);

        const std::array<bool, 4> present{
            h.contains_edge(i1, i3, i4, g.a13, g.a14, g.a34),
            h.contains_edge(i1, i2, i3, g.a12, g.a13, g.a23),
            h.contains_edge(i1, i2, i4, g.a12, g.a14, g.a24),
            h.contains_edge(i2, i3, i4, g.a23p, g.a24p, g.a34),
        };
        for (int e = 0; e < 4; ++e)
            if (! present[e])
                return GlueValidation{false, e};
        return {};
    }

    auto prepare_row_glue(const ReducedHypergraph & h, const QGraphSystem & q, const std::vector<Index> & indices,
        Index m, int m2_target) -> GlueRowResult
    {
        if (indices.empty() || ! std::is_sorted(indices.begin(), indices.end()) ||
            std::adjacent_find(indices.begin(), indices.end()) != indices.end())
            throw DomainError("row index set must be non-empty and strictly increasing");
        if (indices.front() < 1 || indices.back() > q.index_count)
            throw DomainError("row index set names an unknown index");
        if (indices.back() != m)
            throw DomainError("m must be the largest element of I");
        if (m2_target < 2)
            throw DomainError("row target must be at least 2");

        GlueRowRecord row;
        row.input = indices;
        row.r = indices.front();
        row.m = m;
        row.target = m2_target;
        {
            Rational bound{m2_target + 1};
            for (int n = 0; n < m2_target && bound <= Rational{static_cast<std::int64_t>(indices.size())}; ++n)
                bound /= q.delta;
            row.hypothesis_met = Rational{static_cast<std::int64_t>(indices.size())} >= bound;
        }
        const Index r = row.r;
        if (r == m)
            return {std::nullopt, StageFailure{"choice of x", "I has a single index"}};

        std::vector<std::pair<Index, Bitset>> s_sets;
        for (auto j : indices)
            if (j != r && j != m)
                s_sets.emplace_back(j, s_set(h, q, IndexTriple{r, j, m}, q.r_star));
        Vertex best_x = -1;
        std::vector<Index> best_members;
        for (Vertex x = 0; x < h.class_size(r, m); ++x) {
            std::vector<Index> members;
            for (const auto & [j, s] : s_sets)
                if (s.test(static_cast<std::size_t>(x)))
                    members.push_back(j);
            if (best_x < 0 || members.size() > best_members.size()) {
                best_x = x;
                best_members = std::move(members);
            }
        }
        row.x = best_x;
        row.first_candidates = best_members;
        if (best_members.empty())
            return {std::nullopt, StageFailure{"choice of x", "no x in P^{rm} lies in any S-set"}};

        std::map<Index, Bitset> a_sets;
        for (auto j : best_members)
            a_sets[j] = q.q_neighbours(r, m, row.x, j);

        // live: indices still eligible below the last chosen k
        std::vector<Index> live = best_members;
        while (static_cast<int>(row.ks.size()) + 1 < m2_target && ! live.empty()) {
            const Index k = live.back();
            live.pop_back();
            const auto & a_k = a_sets[k];
            Vertex best_z = -1;
            std::vector<Index> followers;
            for (auto z = a_k.find_first(); z != Bitset::npos; z = a_k.find_next(z)) {
                std::vector<Index> members;
                for (auto j : live)
                    if (q.q_neighbours(r, k, static_cast<Vertex>(z), j).intersects(a_sets[j]))
                        members.push_back(j);
                if (best_z < 0 || members.size() > followers.size()) {
                    best_z = static_cast<Vertex>(z);
                    followers = std::move(members);
                }
            }
            if (followers.empty()) {
                best_z = 0;
                row.degenerate = true;
            }
            row.ks.push_back(k);
            row.z[k] = best_z;
            live = std::move(followers);
        }

        row.next = row.ks;
        row.next.push_back(m);
        std::sort(row.next.begin(), row.next.end());
        row.r_next = row.next.front();
        if (static_cast<int>(row.next.size()) < m2_target)
            return {std::nullopt, StageFailure{"k selection round " + std::to_string(row.ks.size() + 1),
                                      "reached |J| = " + std::to_string(row.next.size()) + " < target " +
                                          std::to_string(m2_target)}};
        return {std::move(row), std::nullopt};
    }

    auto glue_row_is_sound(const ReducedHypergraph & h, const QGraphSystem & q, const GlueRowRecord & row) -> bool
    {
        std::vector<Index> rest;
        for (auto j : row.next)
            if (j != row.m)
                rest.push_back(j);
        for (std::size_t a = 0; a < rest.size(); ++a)
            for (std::size_t b = a + 1; b < rest.size(); ++b) {
                const Index j = rest[a], k = rest[b];
                const Vertex z = row.z.at(k);
                if (! q.q_adjacent(row.r, k, z, row.m, row.x))
                    return false;
                bool witnessed = false;
                for (Vertex y = 0; y < h.class_size(row.r, j) && ! witnessed; ++y)
                    witnessed = q.q_adjacent(row.r, j, y, row.m, row.x) && q.q_adjacent(row.r, j, y, k, z);
                if (! witnessed)
                    return false;
            }
        return true;
    }

    auto default_ladder(int initial, const Rational & eps, int min_final_indices) -> std::vector<int>
    {
        const int rows = static_cast<int>(ceil(Rational{1} / (eps * eps))) + 1;
        std::vector<int> ladder{initial};
        for (int t = 1; t <= rows && initial - t >= min_final_indices; ++t)
            ladder.push_back(initial - t);
        return ladder;
    }

    auto find_glued(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace) -> GlueResult
    {
        GlueResult result;
        auto fail = [&](std::string stage, std::string reason) {
            note(trace, "failure stage=" + stage + " reason=" + reason);
            result.failure = StageFailure{std::move(stage), std::move(reason)};
            return std::move(result);
        };

        result.cleaning = clean(h, config, trace);
        if (! result.cleaning.ok()) {
            const auto & f = *result.cleaning.failure;
            result.failure = StageFailure{"clean", f.stage + ": " + f.reason};
            return result;
        }
        const auto & host = *result.cleaning.host;
        const auto & q = result.cleaning.q;
        const Index m = host.index_count();

        result.ladder = config.ladder.empty() ? default_ladder(m, config.eps, config.min_final_indices) : config.ladder;
        note(trace, "glue.ladder values=" + join(result.ladder));
        if (m < result.ladder.front())
            return fail("ladder", "cleaning left " + std::to_string(m) + " indices, ladder starts at " +
                    std::to_string(result.ladder.front()));
        if (result.ladder.size() < 3)
            return fail("ladder", "ladder needs at least two rows");

        std::vector<Index> current;
        for (Index t = 1; t <= m; ++t)
            current.push_back(t);
        for (std::size_t t = 1; t < result.ladder.size(); ++t) {
            auto row = prepare_row_glue(host, q, current, m, result.ladder[t]);
            if (! row.row)
                return fail("row " + std::to_string(t), row.failure->stage + ": " + row.failure->reason);
            row.row->round = static_cast<int>(t);
            if (! glue_row_is_sound(host, q, *row.row))
                throw std::logic_error("glue row " + std::to_string(t) + " breaks the all-pairs property");
            std::ostringstream line;
            line << "glue.row t=" << t << " I=" << join(current) << " r=" << row.row->r << " x=" << row.row->x
                 << " ks=" << join(row.row->ks) << " J=" << join(row.row->next) << " z=";
            bool first = true;
            for (const auto & [k, z] : row.row->z) {
                line << (first ? "" : ",") << k << ':' << z;
                first = false;
            }
            line << " degenerate=" << (row.row->degenerate ? 1 : 0)
                 << " hypothesis_met=" << (row.row->hypothesis_met ? 1 : 0);
            note(trace, line.str());
            current = row.row->next;
            result.rows.push_back(std::move(*row.row));
        }

        if (static_cast<int>(current.size()) < config.min_final_indices)
            return fail("m' selection", "last index set has " + std::to_string(current.size()) + " < " +
                    std::to_string(config.min_final_indices) + " elements");
        const Index m_prime = current[current.size() - 2];
        result.m_prime = m_prime;
        note(trace, "m_prime value=" + std::to_string(m_prime));

        std::vector<Bitset> sets;
        for (const auto & row : result.rows) {
            auto members = host.constituent(IndexTriple{row.r, m_prime, m}).completions_jk(row.z.at(m_prime), row.x);
            note(trace, "projection t=" + std::to_string(row.round) + " x=" + std::to_string(row.x) + " z=" +
                    std::to_string(row.z.at(m_prime)) + " size=" + std::to_string(members.count()));
            sets.push_back(std::move(members));
        }
        const auto ground = static_cast<std::size_t>(host.class_size(m_prime, m));
        result.choice = pigeonhole(sets, ground);
        note(trace, "pigeonhole v=" + std::to_string(result.choice.element) +
                " count=" + std::to_string(result.choice.multiplicity) + " ground=" + std::to_string(ground));
        if (result.choice.multiplicity < 2)
            return fail("pigeonhole", "no vertex of P^{m' m} lies in two projection sets (best " +
                    std::to_string(result.choice.multiplicity) + ")");

        const auto & ri = result.rows[result.choice.containing[0]];
        const auto & rj = result.rows[result.choice.containing[1]];
        const Index a = ri.r, b = rj.r;
        const Vertex zi = ri.z.at(m_prime);

        Vertex y = -1;
        for (Vertex c = 0; c < host.class_size(a, b) && y < 0; ++c)
            if (q.q_adjacent(a, b, c, m, ri.x) && q.q_adjacent(a, b, c, m_prime, zi))
                y = c;
        if (y < 0)
            return fail("triangle recovery", "no y in P^{r_i r_j} joins x_i and z_{i,m'}");
        const Vertex u1 = least_bit(host.constituent(IndexTriple{a, b, m}).completions_jk(y, ri.x));
        const Vertex u2 = least_bit(host.constituent(IndexTriple{a, b, m_prime}).completions_jk(y, zi));
        note(trace, "completion rows=" + std::to_string(ri.round) + "," + std::to_string(rj.round) +
                " y=" + std::to_string(y) + " u1=" + std::to_string(u1) + " u2=" + std::to_string(u2));
        if (u1 < 0 || u2 < 0)
            return fail("completion recovery", "a Q-edge of the selected row has no completion");

        auto orig = [&](Index w) { return q.original_index[w - 1]; };
        GluedConfiguration g;
        g.indices = {orig(a), orig(b), orig(m), orig(m_prime)};
        g.a12 = y;
        g.a13 = ri.x;
        g.a14 = zi;
        g.a23 = u1;
        g.a24 = u2;
        g.a34 = result.choice.element;
        g.a23p = rj.x;
        g.a24p = rj.z.at(m_prime);
        if (! validate_glued(h, g).valid)
            throw std::logic_error("assembled glued configuration fails validation");
        note(trace, "result indices=" + join({g.indices.begin(), g.indices.end()}));
        result.configuration = g;
        return result;
    }

    auto glued_search_space(const ReducedHypergraph & h) -> std::uint64_t
    {
        const int m = h.index_count();
        unsigned __int128 total = 0;
        const unsigned __int128 limit = std::numeric_limits<std::uint64_t>::max();
        for (Index i1 = 1; i1 <= m; ++i1)
            for (Index i2 = 1; i2 <= m; ++i2)
                for (Index i3 = 1; i3 <= m; ++i3)
                    for (Index i4 = 1; i4 <= m; ++i4) {
                        if (i1 == i2 || i1 == i3 || i1 == i4 || i2 == i3 || i2 == i4 || i3 == i4)
                            continue;
                        unsigned __int128 p = 1;
                        p *= h.class_size(i1, i2);
                        p *= h.class_size(i1, i3);
                        p *= h.class_size(i1, i4);
                        p *= static_cast<unsigned>(h.class_size(i2, i3)) * h.class_size(i2, i3);
                        p *= static_cast<unsigned>(h.class_size(i2, i4)) * h.class_size(i2, i4);
                        p *= h.class_size(i3, i4);
                        total += p;
                        if (total > limit)
                            return std::numeric_limits<std::uint64_t>::max();
                    }
        return static_cast<std::uint64_t>(total);
    }

    auto brute_force_glued(const ReducedHypergraph & h, std::uint64_t cap, bool count_all) -> GlueOracleResult
    {
        GlueOracleResult result;
        result.space = glued_search_space(h);
        if (result.space > cap)
            throw CapExceeded("glued search space " + std::to_string(result.space) + " exceeds cap " +
                std::to_string(cap));

        const int m = h.index_count();
        for (Index i1 = 1; i1 <= m; ++i1)
            for (Index i2 = 1; i2 <= m; ++i2)
                for (Index i3 = 1; i3 <= m; ++i3)
                    for (Index i4 = 1; i4 <= m; ++i4) {
                        if (i1 == i2 || i1 == i3 || i1 == i4 || i2 == i3 || i2 == i4 || i3 == i4)
                            continue;
                        const int s12 = h.class_size(i1, i2), s13 = h.class_size(i1, i3), s14 = h.class_size(i1, i4);
                        const int s23 = h.class_size(i2, i3), s24 = h.class_size(i2, i4), s34 = h.class_size(i3, i4);
                        for (Vertex a13 = 0; a13 < s13; ++a13)
                            for (Vertex a14 = 0; a14 < s14; ++a14)
                                for (Vertex a34 = 0; a34 < s34; ++a34) {
                                    if (! h.contains_edge(i1, i3, i4, a13, a14, a34))
                                        continue;
                                    // the glued edge only involves a23', a24' and a34
                                    std::uint64_t glued = 0;
                                    Vertex g23 = -1, g24 = -1;
                                    for (Vertex p = 0; p < s23; ++p)
                                        for (Vertex s = 0; s < s24; ++s)
                                            if (h.contains_edge(i2, i3, i4, p, s, a34)) {
                                                if (! glued)
                                                    g23 = p, g24 = s;
                                                ++glued;
                                            }
                                    if (! glued)
                                        continue;
                                    for (Vertex a12 = 0; a12 < s12; ++a12)
                                        for (Vertex a23 = 0; a23 < s23; ++a23) {
                                            if (! h.contains_edge(i1, i2, i3, a12, a13, a23))
                                                continue;
                                            for (Vertex a24 = 0; a24 < s24; ++a24) {
                                                if (! h.contains_edge(i1, i2, i4, a12, a14, a24))
                                                    continue;
                                                if (! result.found)
                                                    result.first = GluedConfiguration{
                                                        {i1, i2, i3, i4}, a12, a13, a14, a23, a24, a34, g23, g24};
                                                result.found = true;
                                                result.count += glued;
                                                if (! count_all)
                                                    return result;
                                            }
                                        }
                                }
                    }
        return result;
    }
}

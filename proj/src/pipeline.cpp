#include <redhyper/errors.hpp>
#include <redhyper/pipeline.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <thread>

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

        auto triple_key(const IndexTriple & t) -> std::string
        {
            return std::to_string(t.i) + "," + std::to_string(t.j) + "," + std::to_string(t.k);
        }

        auto note(Trace * trace, const std::string & line) -> void
        {
            if (trace)
                trace->add(line);
        }

        auto quarter_plus_half_eps(const Rational & eps) -> Rational { return Rational{1, 4} + eps / 2; }

        auto least_bit(const Bitset & b) -> int
        {
            auto pos = b.find_first();
            return pos == Bitset::npos ? -1 : static_cast<int>(pos);
        }
    }

    auto PipelineConfig::validate() const -> void
    {
        if (eps <= 0 || eps >= 1)
            throw DomainError("eps must lie strictly between 0 and 1");
        if (delta <= 0 || delta >= eps)
            throw DomainError("delta must satisfy 0 < delta < eps");
        if (rounds < 0)
            throw DomainError("rounds must be non-negative");
        if (min_final_indices < 3)
            throw DomainError("min_final_indices must be at least 3");
        if (ramsey_target_1 < 0 || ramsey_target_2 < 0)
            throw DomainError("extraction targets must be non-negative");
        if ((ramsey_target_1 > 0 && ramsey_target_1 < 3) || (ramsey_target_2 > 0 && ramsey_target_2 < 3))
            throw DomainError("extraction targets must be 0 or at least 3");
        for (std::size_t t = 1; t < ladder.size(); ++t)
            if (ladder[t] >= ladder[t - 1])
                throw DomainError("ladder must be strictly decreasing");
        if (threads < 1)
            throw DomainError("threads must be positive");
    }

    auto PipelineConfig::effective_rounds() const -> int { return rounds > 0 ? rounds : default_rounds(eps); }

    auto default_rounds(const Rational & eps) -> int
    {
        return static_cast<int>(ceil(Rational{2} / (eps * eps))) + 1;
    }

    auto level_count(const Rational & delta) -> int
    {
        if (delta <= 0)
            throw DomainError("delta must be positive");
        return static_cast<int>(ceil(Rational{1} / (delta * 2)));
    }

    BipartiteGraph::BipartiteGraph(int left, int right) :
        _left(static_cast<std::size_t>(left), Bitset(static_cast<std::size_t>(right))),
        _right(static_cast<std::size_t>(right), Bitset(static_cast<std::size_t>(left)))
    {
    }

    auto BipartiteGraph::add_edge(Vertex l, Vertex r) -> void
    {
        _left[l].set(r);
        _right[r].set(l);
    }

    auto BipartiteGraph::edge_count() const -> std::int64_t
    {
        std::int64_t total = 0;
        for (const auto & row : _left)
            total += static_cast<std::int64_t>(row.count());
        return total;
    }

    auto to_string(TripleColour c) -> std::string { return c == TripleColour::blue ? "blue" : "red"; }

    auto QGraphSystem::slot(const IndexTriple & t) const -> std::size_t
    {
        if (! (1 <= t.i && t.i < t.j && t.j < t.k && t.k <= index_count))
            throw DomainError("unknown triple " + to_string(t));
        auto m = static_cast<std::size_t>(index_count);
        return static_cast<std::size_t>(slots[((t.i - 1) * m + (t.j - 1)) * m + (t.k - 1)]);
    }

    auto QGraphSystem::q_adjacent(Index r, Index j, Vertex a, Index k, Vertex b) const -> bool
    {
        if (! (r < j && r < k && j != k))
            throw DomainError("Q adjacency needs r below two distinct indices");
        if (j < k)
            return q_low(IndexTriple{r, j, k}).has_edge(a, b);
        return q_low(IndexTriple{r, k, j}).has_edge(b, a);
    }

    auto QGraphSystem::q_neighbours(Index r, Index j, Vertex a, Index k) const -> Bitset
    {
        if (! (r < j && r < k && j != k))
            throw DomainError("Q adjacency needs r below two distinct indices");
        if (j < k)
            return q_low(IndexTriple{r, j, k}).left_neighbours(a);
        return q_low(IndexTriple{r, k, j}).right_neighbours(a);
    }

    auto build_q_graphs(const ReducedHypergraph & h, const Rational & eps, const Rational & delta, int threads)
        -> QGraphSystem
    {
        QGraphSystem q;
        q.eps = eps;
        q.delta = delta;
        q.index_count = h.index_count();
        const auto m = static_cast<std::size_t>(q.index_count);
        q.slots.assign(m * m * m, -1);

        auto triples = h.triples();
        for (std::size_t n = 0; n < triples.size(); ++n) {
            const auto & t = triples[n];
            q.slots[((t.i - 1) * m + (t.j - 1)) * m + (t.k - 1)] = static_cast<int>(n);
        }
        q.low.resize(triples.size());
        q.high.resize(triples.size());
        for (Index t = 1; t <= q.index_count; ++t) {
            q.original_index.push_back(t);
            q.surviving_indices.push_back(t);
        }

        const auto eps2 = eps * eps;
        auto build_one = [&](std::size_t n) {
            const auto & c = h.constituent(triples[n]);
            const int pij = c.size_ij(), pik = c.size_ik(), pjk = c.size_jk();
            BipartiteGraph low(pij, pik), high(pik, pjk);
            const auto low_bound = eps2 * pjk, high_bound = eps2 * pij;
            for (Vertex w = 0; w < pij; ++w)
                for (Vertex v = 0; v < pik; ++v)
                    if (at_least(static_cast<std::int64_t>(c.completions_jk(w, v).count()), low_bound))
                        low.add_edge(w, v);
            for (Vertex v = 0; v < pik; ++v)
                for (Vertex w = 0; w < pjk; ++w)
                    if (at_least(static_cast<std::int64_t>(c.completions_ij(v, w).count()), high_bound))
                        high.add_edge(v, w);
            q.low[n] = std::move(low);
            q.high[n] = std::move(high);
        };

        if (threads <= 1 || triples.size() < 2) {
            for (std::size_t n = 0; n < triples.size(); ++n)
                build_one(n);
        }
        else {
            std::vector<std::thread> pool;
            const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), triples.size());
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t n = w; n < triples.size(); n += workers)
                        build_one(n);
                });
            for (auto & t : pool)
                t.join();
        }
        return q;
    }

    auto check_sum_of_squares(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t)
        -> SumOfSquares
    {
        const auto & low = q.q_low(t);
        const auto & high = q.q_high(t);
        std::int64_t lhs = 0;
        for (Vertex v = 0; v < low.right_size(); ++v)
            lhs += low.right_degree(v) * high.left_degree(v);
        const std::int64_t pij = h.class_size(t.i, t.j), pik = h.class_size(t.i, t.k), pjk = h.class_size(t.j, t.k);
        SumOfSquares out;
        out.lhs = Rational{lhs};
        out.rhs = quarter_plus_half_eps(q.eps) * (pij * pjk * pik);
        out.holds = out.lhs >= out.rhs;
        return out;
    }

    auto colour_sums(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t) -> ColourSums
    {
        const auto & low = q.q_low(t);
        const auto & high = q.q_high(t);
        std::int64_t blue = 0, red = 0;
        for (Vertex v = 0; v < low.right_size(); ++v) {
            blue += low.right_degree(v) * low.right_degree(v);
            red += high.left_degree(v) * high.left_degree(v);
        }
        const std::int64_t pij = h.class_size(t.i, t.j), pik = h.class_size(t.i, t.k), pjk = h.class_size(t.j, t.k);
        const auto c = quarter_plus_half_eps(q.eps);
        return ColourSums{Rational{blue}, c * (pij * pij * pik), Rational{red}, c * (pjk * pjk * pik)};
    }

    auto color_triples(const ReducedHypergraph & h, QGraphSystem & q) -> std::map<IndexTriple, TripleColour>
    {
        q.colour.clear();
        for (const auto & t : h.triples()) {
            auto sums = colour_sums(h, q, t);
            auto colour = sums.blue_lhs >= sums.blue_rhs ? TripleColour::blue : TripleColour::red;
            if (colour == TripleColour::red && check_sum_of_squares(h, q, t).holds && sums.red_lhs < sums.red_rhs)
                throw std::logic_error("triple " + to_string(t) + " fails both square-sum inequalities");
            q.colour[t] = colour;
        }
        return q.colour;
    }

    auto s_set(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t, int r) -> Bitset
    {
        const auto & low = q.q_low(t);
        const auto bound = (Rational{1, 2} + q.delta * r) * h.class_size(t.i, t.j);
        Bitset out(static_cast<std::size_t>(low.right_size()));
        for (Vertex v = 0; v < low.right_size(); ++v)
            if (at_least(low.right_degree(v), bound))
                out.set(static_cast<std::size_t>(v));
        return out;
    }

    auto s_level(const ReducedHypergraph & h, const QGraphSystem & q, const IndexTriple & t) -> int
    {
        const auto bound = q.delta * h.class_size(t.i, t.k);
        for (int r = level_count(q.delta); r >= 1; --r)
            if (at_least(static_cast<std::int64_t>(s_set(h, q, t, r).count()), bound))
                return r;
        return 0;
    }

    namespace
    {
        /// Exact search for the lexicographically least monochromatic subset of one colour.
        class CliqueSearch
        {
        public:
            CliqueSearch(const std::vector<int> & colours, int n, int target, std::uint64_t cap) :
                _colours(colours), _n(n), _target(target), _cap(cap)
            {
            }

            auto run(int colour) -> std::optional<std::vector<int>>
            {
                _colour = colour;
                _chosen.clear();
                std::vector<int> all(static_cast<std::size_t>(_n));
                for (int a = 0; a < _n; ++a)
                    all[a] = a;
                if (extend(all))
                    return _chosen;
                return std::nullopt;
            }

            auto capped() const -> bool { return _capped; }
            auto nodes() const -> std::uint64_t { return _nodes; }

        private:
            auto colour_of(int a, int b, int c) const -> int
            {
                return _colours[(static_cast<std::size_t>(a) * _n + b) * _n + c];
            }

            auto extend(const std::vector<int> & candidates) -> bool
            {
                if (static_cast<int>(_chosen.size()) == _target)
                    return true;
                for (std::size_t at = 0; at < candidates.size(); ++at) {
                    if (_chosen.size() + (candidates.size() - at) < static_cast<std::size_t>(_target))
                        return false;
                    if (++_nodes > _cap) {
                        _capped = true;
                        return false;
                    }
                    const int c = candidates[at];
                    std::vector<int> next;
                    for (std::size_t later = at + 1; later < candidates.size(); ++later) {
                        const int d = candidates[later];
                        bool ok = true;
                        for (int a : _chosen)
                            if (colour_of(a, c, d) != _colour) {
                                ok = false;
                                break;
                            }
                        if (ok)
                            next.push_back(d);
                    }
                    _chosen.push_back(c);
                    if (extend(next))
                        return true;
                    _chosen.pop_back();
                    if (_capped)
                        return false;
                }
                return false;
            }

            const std::vector<int> & _colours;
            int _n, _target;
            std::uint64_t _cap;
            std::uint64_t _nodes = 0;
            bool _capped = false;
            int _colour = 0;
            std::vector<int> _chosen;
        };

        auto greedy_clique(const std::vector<int> & colours, int n, int target, int colour) -> std::optional<std::vector<int>>
        {
            std::vector<int> chosen;
            for (int c = 0; c < n && static_cast<int>(chosen.size()) < target; ++c) {
                bool ok = true;
                for (std::size_t x = 0; x < chosen.size() && ok; ++x)
                    for (std::size_t y = x + 1; y < chosen.size() && ok; ++y)
                        if (colours[(static_cast<std::size_t>(chosen[x]) * n + chosen[y]) * n + c] != colour)
                            ok = false;
                if (ok)
                    chosen.push_back(c);
            }
            if (static_cast<int>(chosen.size()) == target)
                return chosen;
            return std::nullopt;
        }
    }

    auto ramsey_extract(const std::vector<Index> & items, const TripleColouring & colouring, int target,
        const std::vector<int> & palette, std::uint64_t node_cap) -> RamseyResult
    {
        if (target < 3)
            throw DomainError("monochromatic extraction needs target >= 3");
        const int n = static_cast<int>(items.size());
        if (target > n)
            throw DomainError("target exceeds the number of items");

        auto sorted = items;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> colours(static_cast<std::size_t>(n) * n * n, -1);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = b + 1; c < n; ++c)
                    colours[(static_cast<std::size_t>(a) * n + b) * n + c] =
                        colouring(IndexTriple::of(sorted[a], sorted[b], sorted[c]));

        RamseyResult result;
        std::optional<std::vector<int>> best;
        for (int colour : palette) {
            CliqueSearch search(colours, n, target, node_cap);
            auto found = search.run(colour);
            result.nodes += search.nodes();
            if (search.capped()) {
                result.exhaustive = false;
                found = greedy_clique(colours, n, target, colour);
            }
            if (found && (! best || *found < *best)) {
                best = found;
                result.colour = colour;
            }
        }
        if (best) {
            std::vector<Index> subset;
            for (int a : *best)
                subset.push_back(sorted[a]);
            result.subset = std::move(subset);
        }
        return result;
    }

    auto ramsey_extract_largest(const std::vector<Index> & items, const TripleColouring & colouring,
        const std::vector<int> & palette, std::uint64_t node_cap) -> RamseyResult
    {
        RamseyResult last;
        bool exhaustive = true;
        std::uint64_t nodes = 0;
        for (int target = static_cast<int>(items.size()); target >= 3; --target) {
            last = ramsey_extract(items, colouring, target, palette, node_cap);
            nodes += last.nodes;
            exhaustive = exhaustive && last.exhaustive;
            if (last.subset)
                break;
        }
        last.nodes = nodes;
        last.exhaustive = exhaustive;
        return last;
    }

    auto star_clauses_hold(const ReducedHypergraph & h, const Rational & eps, const Rational & delta,
        const IndexTriple & t, int r_star) -> bool
    {
        const auto & c = h.constituent(t);
        const int pij = c.size_ij(), pik = c.size_ik(), pjk = c.size_jk();
        const auto eps2 = eps * eps;

        std::vector<std::int64_t> degree(static_cast<std::size_t>(pik), 0);
        for (Vertex v = 0; v < pik; ++v)
            for (Vertex w = 0; w < pij; ++w) {
                std::int64_t completions = 0;
                for (Vertex u = 0; u < pjk; ++u)
                    completions += c.contains(w, v, u) ? 1 : 0;
                if (at_least(completions, eps2 * pjk))
                    ++degree[v];
            }

        std::int64_t squares = 0;
        for (auto d : degree)
            squares += d * d;
        if (! at_least(squares, quarter_plus_half_eps(eps) * (std::int64_t{pij} * pij * pik)))
            return false;

        auto level_size = [&](int r) {
            const auto bound = (Rational{1, 2} + delta * r) * pij;
            return std::count_if(degree.begin(), degree.end(), [&](auto d) { return at_least(d, bound); });
        };
        const auto bound = delta * pik;
        return at_least(level_size(r_star), bound) && ! at_least(level_size(r_star + 1), bound);
    }

    auto clean(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace) -> CleanResult
    {
        config.validate();
        CleanResult result;
        auto fail = [&](std::string stage, std::string reason) {
            note(trace, "failure stage=" + stage + " reason=" + reason);
            result.failure = StageFailure{std::move(stage), std::move(reason)};
            return result;
        };

        const int m = h.index_count();
        note(trace, "clean.input indices=" + std::to_string(m) + " eps=" + to_string(config.eps) +
                " delta=" + to_string(config.delta));
        if (m < 3)
            return fail("clean", "fewer than 3 indices");

        auto q0 = build_q_graphs(h, config.eps, config.delta, config.threads);
        std::optional<IndexTriple> first_failure;
        for (const auto & t : h.triples()) {
            auto s = check_sum_of_squares(h, q0, t);
            note(trace, "clean.sum_of_squares triple=" + triple_key(t) + " lhs=" + to_string(s.lhs) +
                    " rhs=" + to_string(s.rhs) + " holds=" + (s.holds ? "1" : "0"));
            if (! s.holds && ! first_failure)
                first_failure = t;
            result.sum_of_squares[t] = s;
        }
        if (first_failure && ! config.best_effort) {
            const auto & s = result.sum_of_squares[*first_failure];
            return fail("sum-of-squares", "inequality fails on triple " + triple_key(*first_failure) +
                    " (lhs=" + to_string(s.lhs) + ", rhs=" + to_string(s.rhs) + ")");
        }

        auto colours = color_triples(h, q0);
        for (const auto & [t, c] : colours)
            note(trace, "clean.colour triple=" + triple_key(t) + " colour=" + to_string(c));

        std::vector<Index> all;
        for (Index t = 1; t <= m; ++t)
            all.push_back(t);
        auto by_colour = [&](const IndexTriple & t) { return static_cast<int>(colours.at(t)); };
        const std::vector<int> two_colours{static_cast<int>(TripleColour::blue), static_cast<int>(TripleColour::red)};
        if (config.ramsey_target_1 > m)
            return fail("ramsey-1", "target " + std::to_string(config.ramsey_target_1) + " exceeds " +
                    std::to_string(m) + " indices");
        auto first = config.ramsey_target_1 > 0
            ? ramsey_extract(all, by_colour, config.ramsey_target_1, two_colours, config.ramsey_node_cap)
            : ramsey_extract_largest(all, by_colour, two_colours, config.ramsey_node_cap);
        result.ramsey_exhaustive = first.exhaustive;
        if (! first.subset)
            return fail("ramsey-1", "no monochromatic subset of size " +
                    std::to_string(config.ramsey_target_1 > 0 ? config.ramsey_target_1 : 3));
        auto first_colour = static_cast<TripleColour>(first.colour);
        note(trace, "clean.ramsey1 colour=" + to_string(first_colour) + " subset=" + join(*first.subset) +
                " exhaustive=" + (first.exhaustive ? "1" : "0"));

        // A red set read backwards is blue: reversing the index order swaps the roles of the
        // low and high Q-graphs of every triple.
        auto order = *first.subset;
        if (first_colour == TripleColour::red)
            std::reverse(order.begin(), order.end());
        note(trace, "clean.relabel order=" + join(order));
        auto h1 = relabel(h, order);
        auto q1 = build_q_graphs(h1, config.eps, config.delta, config.threads);
        for (const auto & t : h1.triples()) {
            auto sums = colour_sums(h1, q1, t);
            if (sums.blue_lhs < sums.blue_rhs)
                return fail("ramsey-1", "triple " + triple_key(t) + " is not blue after reorientation");
        }

        const int levels = level_count(config.delta);
        std::map<IndexTriple, int> level;
        for (const auto & t : h1.triples()) {
            level[t] = s_level(h1, q1, t);
            note(trace, "clean.level triple=" + triple_key(t) + " level=" + std::to_string(level[t]));
        }
        std::vector<int> palette;
        for (int r = 1; r <= levels; ++r)
            palette.push_back(r);
        std::vector<Index> working;
        for (Index t = 1; t <= h1.index_count(); ++t)
            working.push_back(t);
        auto by_level = [&](const IndexTriple & t) { return level.at(t); };
        if (config.ramsey_target_2 > h1.index_count())
            return fail("ramsey-2", "target " + std::to_string(config.ramsey_target_2) + " exceeds " +
                    std::to_string(h1.index_count()) + " surviving indices");
        if (h1.index_count() < 3)
            return fail("ramsey-2", "fewer than 3 indices survive the first extraction");
        auto second = config.ramsey_target_2 > 0
            ? ramsey_extract(working, by_level, config.ramsey_target_2, palette, config.ramsey_node_cap)
            : ramsey_extract_largest(working, by_level, palette, config.ramsey_node_cap);
        result.ramsey_exhaustive = result.ramsey_exhaustive && second.exhaustive;
        if (! second.subset)
            return fail("ramsey-2", "no single-level subset of size " +
                    std::to_string(config.ramsey_target_2 > 0 ? config.ramsey_target_2 : 3));
        note(trace, "clean.ramsey2 level=" + std::to_string(second.colour) + " subset=" + join(*second.subset) +
                " exhaustive=" + (second.exhaustive ? "1" : "0"));

        auto h2 = relabel(h1, *second.subset);
        auto q2 = build_q_graphs(h2, config.eps, config.delta, config.threads);
        q2.r_star = second.colour;
        q2.original_index.clear();
        for (auto w : *second.subset)
            q2.original_index.push_back(order[w - 1]);
        color_triples(h2, q2);
        for (const auto & t : h2.triples())
            q2.level[t] = s_level(h2, q2, t);
        note(trace, "clean.surviving original=" + join(q2.original_index) + " r_star=" + std::to_string(q2.r_star));

        for (const auto & t : h2.triples())
            if (! star_clauses_hold(h2, config.eps, config.delta, t, q2.r_star))
                return fail("star-verification", "triple " + triple_key(t) + " fails the cleaning conclusion");

        result.host = std::move(h2);
        result.q = std::move(q2);
        return result;
    }

    auto find_many_triangles(const ReducedHypergraph & h, const QGraphSystem & q, Index i, Index j1, Index j2, Index k,
        Vertex x) -> std::vector<QTriangle>
    {
        if (! (1 <= i && i < j1 && j1 < j2 && j2 < k && k <= q.index_count))
            throw DomainError("triangles need 1 <= i < j1 < j2 < k <= M");
        if (x < 0 || x >= h.class_size(i, k))
            throw DomainError("x lies outside P^{ik}");
        if (! s_set(h, q, IndexTriple{i, j1, k}, q.r_star).test(x) ||
            ! s_set(h, q, IndexTriple{i, j2, k}, q.r_star).test(x))
            throw DomainError("x is not in both S-sets at level r_star");

        std::vector<QTriangle> out;
        auto ys = q.q_neighbours(i, k, x, j2);
        auto zs = q.q_neighbours(i, k, x, j1);
        for (auto y = ys.find_first(); y != Bitset::npos; y = ys.find_next(y)) {
            auto common = q.q_neighbours(i, j2, static_cast<Vertex>(y), j1) & zs;
            for (auto z = common.find_first(); z != Bitset::npos; z = common.find_next(z))
                out.push_back(QTriangle{static_cast<Vertex>(y), static_cast<Vertex>(z)});
        }
        return out;
    }

    auto triangle_bound_applies(const Rational & eps, const Rational & delta, int r_star) -> bool
    {
        const Rational half{1, 2};
        const auto lo = half - delta * r_star;
        const auto hi = half + delta * (r_star + 1);
        const auto mid = half + delta * r_star;
        return quarter_plus_half_eps(eps) > lo * hi * hi + mid * lo * lo + delta * 3;
    }

    namespace
    {
        struct Apex
        {
            Vertex x = -1;
            std::vector<Index> members;
        };

        /// x in P^{rm} lying in the most S-sets S^r_{jm}(r_star), j in I \ {r, m}; least x on ties.
        auto choose_apex(const ReducedHypergraph & h, const QGraphSystem & q, const std::vector<Index> & indices,
            Index r, Index m) -> Apex
        {
            std::vector<std::pair<Index, Bitset>> sets;
            for (auto j : indices)
                if (j != r && j != m)
                    sets.emplace_back(j, s_set(h, q, IndexTriple{r, j, m}, q.r_star));
            Apex best;
            for (Vertex x = 0; x < h.class_size(r, m); ++x) {
                std::vector<Index> members;
                for (const auto & [j, s] : sets)
                    if (s.test(static_cast<std::size_t>(x)))
                        members.push_back(j);
                if (best.x < 0 || members.size() > best.members.size())
                    best = Apex{x, std::move(members)};
            }
            return best;
        }

        auto check_row_input(const QGraphSystem & q, const std::vector<Index> & indices, Index m) -> void
        {
            if (indices.empty())
                throw DomainError("row needs a non-empty index set");
            if (! std::is_sorted(indices.begin(), indices.end()) ||
                std::adjacent_find(indices.begin(), indices.end()) != indices.end())
                throw DomainError("row index set must be strictly increasing");
            if (indices.front() < 1 || indices.back() > q.index_count)
                throw DomainError("row index set names an unknown index");
            if (indices.back() != m)
                throw DomainError("m must be the largest element of I");
        }
    }

    auto prepare_row(const ReducedHypergraph & h, const QGraphSystem & q, const std::vector<Index> & indices, Index m,
        bool strict) -> RowResult
    {
        check_row_input(q, indices, m);
        const auto size = static_cast<std::int64_t>(indices.size());
        if (strict && ! (Rational{size} > Rational{2} / (q.delta * q.delta)))
            throw DomainError("row preparation needs |I| > 2/delta^2");

        RowResult result;
        RowRecord row;
        row.input = indices;
        row.r = indices.front();
        row.m = m;
        if (row.r == m)
            return RowResult{std::nullopt, StageFailure{"choice of x", "I has a single index"}};

        auto apex = choose_apex(h, q, indices, row.r, m);
        row.x = apex.x;
        row.first_candidates = apex.members;
        if (apex.members.empty())
            return RowResult{std::nullopt, StageFailure{"choice of x", "no x in P^{rm} lies in any S-set"}};

        const Index r = row.r;
        row.r_next = apex.members.front();
        std::map<Index, Bitset> a_sets;
        for (auto j : apex.members)
            a_sets[j] = q.q_neighbours(r, m, row.x, j);

        const auto & a_next = a_sets[row.r_next];
        if (a_next.none())
            return RowResult{std::nullopt, StageFailure{"choice of y", "x has no Q-neighbour in P^{r r'}"}};

        std::vector<Index> best_members;
        Vertex best_y = -1;
        for (auto y = a_next.find_first(); y != Bitset::npos; y = a_next.find_next(y)) {
            std::vector<Index> members;
            for (auto j : apex.members)
                if (j != row.r_next && q.q_neighbours(r, row.r_next, static_cast<Vertex>(y), j).intersects(a_sets[j]))
                    members.push_back(j);
            if (best_y < 0 || members.size() > best_members.size()) {
                best_y = static_cast<Vertex>(y);
                best_members = std::move(members);
            }
        }
        row.y = best_y;

        for (auto j : best_members) {
            auto common = q.q_neighbours(r, row.r_next, row.y, j) & a_sets[j];
            row.z[j] = least_bit(common);
        }
        row.next = best_members;
        row.next.push_back(m);
        row.next.push_back(row.r_next);
        std::sort(row.next.begin(), row.next.end());
        row.next.erase(std::unique(row.next.begin(), row.next.end()), row.next.end());
        row.bound_met = Rational{static_cast<std::int64_t>(row.next.size())} >= q.delta * q.delta * size;

        result.row = std::move(row);
        return result;
    }

    auto row_is_sound(const QGraphSystem & q, const RowRecord & row) -> bool
    {
        if (! q.q_adjacent(row.r, row.r_next, row.y, row.m, row.x))
            return false;
        for (const auto & [j, z] : row.z) {
            if (z < 0)
                return false;
            if (! q.q_adjacent(row.r, j, z, row.m, row.x) || ! q.q_adjacent(row.r, row.r_next, row.y, j, z))
                return false;
        }
        return true;
    }

    auto pigeonhole(const std::vector<Bitset> & sets, std::size_t ground) -> PigeonholeChoice
    {
        std::vector<int> counts(ground, 0);
        for (const auto & s : sets)
            for (auto v = s.find_first(); v != Bitset::npos && v < ground; v = s.find_next(v))
                ++counts[v];
        PigeonholeChoice choice;
        for (std::size_t v = 0; v < ground; ++v)
            if (counts[v] > choice.multiplicity) {
                choice.multiplicity = counts[v];
                choice.element = static_cast<int>(v);
            }
        if (choice.element >= 0)
            for (std::size_t s = 0; s < sets.size(); ++s)
                if (sets[s].size() > static_cast<std::size_t>(choice.element) && sets[s].test(choice.element))
                    choice.containing.push_back(static_cast<int>(s));
        return choice;
    }

    namespace
    {
        auto row_line(const RowRecord & row) -> std::string
        {
            std::ostringstream out;
            out << "row t=" << row.round << " I=" << join(row.input) << " r=" << row.r << " m=" << row.m
                << " x=" << row.x << " candidates=" << join(row.first_candidates) << " r_next=" << row.r_next
                << " y=" << row.y << " J=" << join(row.next) << " z=";
            bool first = true;
            for (const auto & [j, z] : row.z) {
                out << (first ? "" : ",") << j << ':' << z;
                first = false;
            }
            if (first)
                out << '-';
            out << " bound_met=" << (row.bound_met ? 1 : 0);
            return out.str();
        }
    }

    auto find_fstar(const ReducedHypergraph & h, const PipelineConfig & config, Trace * trace) -> FstarResult
    {
        FstarResult result;
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

        std::vector<Index> current;
        for (Index t = 1; t <= m; ++t)
            current.push_back(t);
        const int rounds = config.effective_rounds();
        for (int t = 1; t <= rounds; ++t) {
            auto row = prepare_row(host, q, current, m, false);
            if (! row.row)
                return fail("row " + std::to_string(t), row.failure->stage + ": " + row.failure->reason);
            row.row->round = t;
            if (! row_is_sound(q, *row.row))
                throw std::logic_error("row " + std::to_string(t) + " reports a triangle missing from Q");
            note(trace, row_line(*row.row));
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
            ProjectionSet p;
            p.round = row.round;
            p.x = row.x;
            p.z = row.z.at(m_prime);
            p.members = host.constituent(IndexTriple{row.r, m_prime, m}).completions_jk(p.z, p.x);
            note(trace, "projection t=" + std::to_string(p.round) + " x=" + std::to_string(p.x) + " z=" +
                    std::to_string(p.z) + " size=" + std::to_string(p.members.count()));
            sets.push_back(p.members);
            result.projections.push_back(std::move(p));
        }
        const auto ground = static_cast<std::size_t>(host.class_size(m_prime, m));
        result.choice = pigeonhole(sets, ground);
        note(trace, "pigeonhole v=" + std::to_string(result.choice.element) +
                " count=" + std::to_string(result.choice.multiplicity) + " ground=" + std::to_string(ground));
        if (result.choice.multiplicity < 3)
            return fail("pigeonhole", "no vertex of P^{m' m} lies in three projection sets (best " +
                    std::to_string(result.choice.multiplicity) + ")");
        for (int s : result.choice.containing)
            if (! sets[s].test(result.choice.element))
                throw std::logic_error("pigeonhole element outside a selected set");

        const auto & ri = result.rows[result.choice.containing[0]];
        const auto & rk = result.rows[result.choice.containing[2]];
        const Vertex v = result.choice.element;
        const Index a = ri.r, b = ri.r_next, d = rk.r;

        auto least_completion = [&](Index i, Index j, Index k, Vertex p, Vertex s) {
            return least_bit(host.constituent(IndexTriple{i, j, k}).completions_jk(p, s));
        };
        const Vertex u1 = least_completion(a, b, m, ri.y, ri.x);
        const Vertex u2 = least_completion(a, b, m_prime, ri.y, ri.z.at(m_prime));
        const Vertex u3 = least_completion(a, b, d, ri.y, ri.z.at(d));
        note(trace, "completion rows=" + std::to_string(ri.round) + "," +
                std::to_string(result.rows[result.choice.containing[1]].round) + "," + std::to_string(rk.round) +
                " u1=" + std::to_string(u1) + " u2=" + std::to_string(u2) + " u3=" + std::to_string(u3));
        if (u1 < 0 || u2 < 0 || u3 < 0)
            return fail("completion recovery", "a Q-edge of the selected row has no completion");

        const std::array<Index, 5> working{a, b, m, m_prime, d};
        auto orig = [&](Index w) { return q.original_index[w - 1]; };
        ReducedMap map;
        for (auto w : working)
            map.lambda.push_back(orig(w));
        auto put = [&](PatternVertex s, PatternVertex t, Vertex vertex) {
            map.phi[VertexPair{s, t}] =
                ClassVertex{IndexPair::of(orig(working[s - 1]), orig(working[t - 1])), vertex};
        };
        put(1, 2, ri.y);
        put(1, 3, ri.x);
        put(1, 4, ri.z.at(m_prime));
        put(1, 5, ri.z.at(d));
        put(2, 3, u1);
        put(2, 4, u2);
        put(2, 5, u3);
        put(3, 4, v);
        put(3, 5, rk.x);
        put(4, 5, rk.z.at(m_prime));

        auto fstar = pattern_catalog(CatalogPattern::Fstar);
        if (! validate_reduced_map(h, fstar, map).valid)
            throw std::logic_error("assembled Fstar map fails validation");
        note(trace, "result lambda=" + join(map.lambda));
        result.certificate = EmbedCertificate{std::move(map), fstar.name(), {}};
        return result;
    }
}

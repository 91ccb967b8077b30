#include <redhyper/embed.hpp>
#include <redhyper/errors.hpp>
#include <redhyper/rng.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace redhyper
{
    auto to_string(ViolationKind kind) -> std::string
    {
        switch (kind) {
        case ViolationKind::distinctness: return "distinctness";
        case ViolationKind::class_membership: return "class_membership";
        case ViolationKind::missing_edge: return "missing_edge";
        }
        return "unknown";
    }

    auto to_string(SearchOutcome outcome) -> std::string
    {
        switch (outcome) {
        case SearchOutcome::found: return "found";
        case SearchOutcome::not_found: return "not-found";
        case SearchOutcome::budget_exhausted: return "budget-exhausted";
        }
        return "unknown";
    }

    auto validate_reduced_map(const ReducedHypergraph & h, const Pattern & p, const ReducedMap & m) -> ValidationResult
    {
        const int n = p.vertex_count();
        if (static_cast<int>(m.lambda.size()) != n)
            throw DomainError("lambda has " + std::to_string(m.lambda.size()) + " entries for a pattern on " +
                std::to_string(n) + " vertices");
        for (auto idx : m.lambda)
            if (! h.valid_index(idx))
                throw DomainError("lambda refers to unknown index " + std::to_string(idx));

        for (const auto & [pair, cv] : m.phi) {
            if (! p.in_shadow(pair.u, pair.v))
                throw DomainError("phi assigns pair " + std::to_string(pair.u) + std::to_string(pair.v) +
                    " which is not in the shadow");
            if (! h.valid_index(cv.cls.lo) || ! h.valid_index(cv.cls.hi) || cv.cls.lo >= cv.cls.hi)
                throw DomainError("phi refers to an unknown vertex class");
            if (cv.vertex < 0 || cv.vertex >= h.class_size(cv.cls))
                throw DomainError("phi vertex outside its class");
        }
        for (const auto & pair : p.shadow())
            if (! m.phi.count(pair))
                throw DomainError("phi is missing shadow pair " + std::to_string(pair.u) + std::to_string(pair.v));

        auto lam = [&](PatternVertex u) { return m.lambda[u - 1]; };

        for (const auto & pair : p.shadow()) {
            if (lam(pair.u) == lam(pair.v))
                return {false, Violation{ViolationKind::distinctness, pair, {}}};
            if (m.phi.at(pair).cls != IndexPair::of(lam(pair.u), lam(pair.v)))
                return {false, Violation{ViolationKind::class_membership, pair, {}}};
        }

        for (const auto & e : p.edges()) {
            auto [u, v, w] = e;
            auto a = m.phi.at({u, v}).vertex, b = m.phi.at({u, w}).vertex, c = m.phi.at({v, w}).vertex;
            if (! h.contains_edge(lam(u), lam(v), lam(w), a, b, c))
                return {false, Violation{ViolationKind::missing_edge, {}, e}};
        }
        return {true, std::nullopt};
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        struct Shared
        {
            std::uint64_t budget;
            std::atomic<std::uint64_t> nodes{0};
            std::atomic<bool> stop{false};
            std::atomic<bool> exhausted{false};
            std::atomic<int> best_branch{std::numeric_limits<int>::max()};
        };

        struct BranchResult
        {
            std::uint64_t count = 0;
            std::optional<ReducedMap> first;
        };

        class Engine
        {
        public:
            Engine(const ReducedHypergraph & h, const Pattern & p, const SearchOptions & options, Shared & shared) :
                _h(h),
                _p(p),
                _options(options),
                _shared(shared),
                _n(p.vertex_count()),
                _m(h.index_count())
            {
                const auto & shadow = p.shadow();
                _pairs = shadow;
                _pairs_at.assign(static_cast<std::size_t>(_n + 1), {});
                for (int id = 0; id < static_cast<int>(_pairs.size()); ++id) {
                    _pairs_at[_pairs[id].u].push_back(id);
                    _pairs_at[_pairs[id].v].push_back(id);
                }

                for (const auto & e : p.edges()) {
                    EdgeInfo info;
                    info.vertices = e;
                    info.pair_ids = {pair_id(e[0], e[1]), pair_id(e[0], e[2]), pair_id(e[1], e[2])};
                    _edges.push_back(info);
                }
                _edges_at_pair.assign(_pairs.size(), {});
                _edges_at_vertex.assign(static_cast<std::size_t>(_n + 1), {});
                for (int e = 0; e < static_cast<int>(_edges.size()); ++e) {
                    for (auto pid : _edges[e].pair_ids)
                        _edges_at_pair[pid].push_back(e);
                    for (auto v : _edges[e].vertices)
                        _edges_at_vertex[v].push_back(e);
                }

                _index_order.resize(static_cast<std::size_t>(_m));
                std::iota(_index_order.begin(), _index_order.end(), 1);
                if (options.seed != 0) {
                    Rng rng(options.seed);
                    rng.shuffle(_index_order);
                    int max_class = 0;
                    for (const auto & pr : h.pairs())
                        max_class = std::max(max_class, h.class_size(pr));
                    _value_order.resize(static_cast<std::size_t>(max_class + 1));
                    for (int s = 1; s <= max_class; ++s) {
                        _value_order[s].resize(static_cast<std::size_t>(s));
                        std::iota(_value_order[s].begin(), _value_order[s].end(), 0);
                        rng.shuffle(_value_order[s]);
                    }
                }
            }

            auto branch_count() const -> int { return _m; }

            /// Explores the subtree with lambda(1) = the branch-th host index in value order.
            auto run_branch(int branch) -> BranchResult
            {
                _branch = branch;
                _result = {};
                State s;
                s.lam.assign(static_cast<std::size_t>(_n + 1), 0);
                s.dom.assign(_pairs.size(), Bitset{});
                s.roles.assign(_edges.size(), {-1, -1, -1});
                s.triple.assign(_edges.size(), IndexTriple{});
                try_lambda(s, 1, _index_order[branch]);
                return std::move(_result);
            }

        private:
            struct EdgeInfo
            {
                std::array<PatternVertex, 3> vertices;
                /// shadow pair ids of uv, uw, vw
                std::array<int, 3> pair_ids;
            };

            struct State
            {
                std::vector<Index> lam;
                std::vector<Bitset> dom;
                /// per active edge: pair id sitting on P^ij, P^ik, P^jk of its sorted triple
                std::vector<std::array<int, 3>> roles;
                std::vector<IndexTriple> triple;
            };

            const ReducedHypergraph & _h;
            const Pattern & _p;
            const SearchOptions & _options;
            Shared & _shared;
            int _n, _m;
            int _branch = 0;
            BranchResult _result;

            std::vector<VertexPair> _pairs;
            std::vector<std::vector<int>> _pairs_at;
            std::vector<EdgeInfo> _edges;
            std::vector<std::vector<int>> _edges_at_pair, _edges_at_vertex;
            std::vector<Index> _index_order;
            std::vector<std::vector<Vertex>> _value_order;

            auto pair_id(PatternVertex a, PatternVertex b) const -> int
            {
                auto it = std::lower_bound(_pairs.begin(), _pairs.end(), VertexPair::of(a, b));
                return static_cast<int>(it - _pairs.begin());
            }

            auto other_end(int pid, PatternVertex u) const -> PatternVertex
            {
                return _pairs[pid].u == u ? _pairs[pid].v : _pairs[pid].u;
            }

            auto should_stop() const -> bool
            {
                if (_shared.stop.load(std::memory_order_relaxed))
                    return true;
                return _options.deterministic && ! _options.count_all &&
                    _branch > _shared.best_branch.load(std::memory_order_relaxed);
            }

            /// Counts one node; false once the budget is spent.
            auto tick() -> bool
            {
                auto used = _shared.nodes.fetch_add(1, std::memory_order_relaxed) + 1;
                if (used > _shared.budget) {
                    _shared.exhausted = true;
                    _shared.stop = true;
                    return false;
                }
                return true;
            }

            auto record_solution(const State & s) -> void
            {
                if (_result.first)
                    return;
                ReducedMap map;
                map.lambda.assign(s.lam.begin() + 1, s.lam.end());
                for (int pid = 0; pid < static_cast<int>(_pairs.size()); ++pid) {
                    const auto & pr = _pairs[pid];
                    map.phi[pr] = ClassVertex{
                        IndexPair::of(s.lam[pr.u], s.lam[pr.v]), static_cast<Vertex>(s.dom[pid].find_first())};
                }
                _result.first = std::move(map);
            }

            /// Generalised arc consistency for one ternary constituent constraint.
            auto revise(State & s, int e, std::vector<int> & changed) -> bool
            {
                const auto & roles = s.roles[e];
                const auto & con = _h.constituent(s.triple[e]);
                auto & da = s.dom[roles[0]];
                auto & db = s.dom[roles[1]];
                auto & dc = s.dom[roles[2]];

                Bitset sa(da.size()), sb(db.size()), sc(dc.size());
                for (auto a = da.find_first(); a != Bitset::npos; a = da.find_next(a))
                    for (auto b = db.find_first(); b != Bitset::npos; b = db.find_next(b)) {
                        const auto & comp = con.completions_jk(static_cast<Vertex>(a), static_cast<Vertex>(b));
                        if (comp.intersects(dc)) {
                            sa.set(a);
                            sb.set(b);
                            sc |= comp;
                        }
                    }
                sc &= dc;

                if (sa != da) {
                    da = std::move(sa);
                    changed.push_back(roles[0]);
                }
                if (sb != db) {
                    db = std::move(sb);
                    changed.push_back(roles[1]);
                }
                if (sc != dc) {
                    dc = std::move(sc);
                    changed.push_back(roles[2]);
                }
                return da.any() && db.any() && dc.any();
            }

            auto propagate(State & s, std::deque<int> queue) -> bool
            {
                std::vector<char> queued(_edges.size(), 0);
                for (auto e : queue)
                    queued[e] = 1;
                std::vector<int> changed;
                while (! queue.empty()) {
                    auto e = queue.front();
                    queue.pop_front();
                    queued[e] = 0;
                    changed.clear();
                    if (! revise(s, e, changed))
                        return false;
                    for (auto pid : changed)
                        for (auto f : _edges_at_pair[pid])
                            if (f != e && s.roles[f][0] >= 0 && ! queued[f]) {
                                queued[f] = 1;
                                queue.push_back(f);
                            }
                }
                return true;
            }

            auto activate(State & s, int e) -> void
            {
                const auto & info = _edges[e];
                auto x = s.lam[info.vertices[0]], y = s.lam[info.vertices[1]], z = s.lam[info.vertices[2]];
                auto t = IndexTriple::of(x, y, z);
                s.triple[e] = t;
                std::array<Index, 3> lams{x, y, z};
                const std::array<std::array<int, 2>, 3> ends{{{0, 1}, {0, 2}, {1, 2}}};
                for (int q = 0; q < 3; ++q) {
                    auto pr = IndexPair::of(lams[ends[q][0]], lams[ends[q][1]]);
                    int role = pr == IndexPair{t.i, t.j} ? 0 : (pr == IndexPair{t.i, t.k} ? 1 : 2);
                    s.roles[e][role] = info.pair_ids[q];
                }
            }

            auto try_lambda(const State & parent, PatternVertex u, Index x) -> bool
            {
                for (auto pid : _pairs_at[u]) {
                    auto w = other_end(pid, u);
                    if (parent.lam[w] != 0 && parent.lam[w] == x)
                        return false;
                }
                if (! tick())
                    return false;

                State s = parent;
                s.lam[u] = x;
                for (auto pid : _pairs_at[u]) {
                    auto w = other_end(pid, u);
                    if (s.lam[w] != 0)
                        s.dom[pid] = Bitset(static_cast<std::size_t>(_h.class_size(x, s.lam[w]))).set();
                }
                std::deque<int> fresh;
                for (auto e : _edges_at_vertex[u]) {
                    const auto & vs = _edges[e].vertices;
                    if (s.lam[vs[0]] && s.lam[vs[1]] && s.lam[vs[2]]) {
                        activate(s, e);
                        fresh.push_back(e);
                    }
                }
                if (! propagate(s, std::move(fresh)))
                    return false;
                return search_lambda(s, u + 1);
            }

            auto search_lambda(const State & s, PatternVertex u) -> bool
            {
                if (u > _n)
                    return search_phi(s);
                for (auto x : _index_order) {
                    if (should_stop())
                        return false;
                    if (try_lambda(s, u, x) && ! _options.count_all)
                        return true;
                }
                return false;
            }

            auto search_phi(const State & s) -> bool
            {
                int best = -1;
                std::size_t best_size = 0;
                int open = 0;
                for (int pid = 0; pid < static_cast<int>(_pairs.size()); ++pid) {
                    auto size = s.dom[pid].count();
                    if (size > 1) {
                        ++open;
                        if (best < 0 || size < best_size) {
                            best = pid;
                            best_size = size;
                        }
                    }
                }

                if (best < 0) {
                    ++_result.count;
                    record_solution(s);
                    return true;
                }

                if (_options.count_all && open == 1) {
                    // every other pair is fixed and arc-consistent: each remaining value completes a map
                    _result.count += best_size;
                    if (! _result.first) {
                        State t = s;
                        auto v = first_in_order(t.dom[best]);
                        t.dom[best].reset();
                        t.dom[best].set(v);
                        record_solution(t);
                    }
                    return true;
                }

                bool any = false;
                for (auto v : values_in_order(s.dom[best])) {
                    if (should_stop() || ! tick())
                        return any;
                    State t = s;
                    t.dom[best].reset();
                    t.dom[best].set(v);
                    std::deque<int> touched;
                    for (auto e : _edges_at_pair[best])
                        touched.push_back(e);
                    if (! propagate(t, std::move(touched)))
                        continue;
                    if (search_phi(t)) {
                        any = true;
                        if (! _options.count_all)
                            return true;
                    }
                }
                return any;
            }

            auto values_in_order(const Bitset & dom) const -> std::vector<std::size_t>
            {
                std::vector<std::size_t> result;
                if (_value_order.empty()) {
                    for (auto v = dom.find_first(); v != Bitset::npos; v = dom.find_next(v))
                        result.push_back(v);
                }
                else
                    for (auto v : _value_order[dom.size()])
                        if (dom.test(static_cast<std::size_t>(v)))
                            result.push_back(static_cast<std::size_t>(v));
                return result;
            }

            auto first_in_order(const Bitset & dom) const -> std::size_t
            {
                return values_in_order(dom).front();
            }
        };
    }

    auto find_reduced_image(const ReducedHypergraph & h, const Pattern & p, const SearchOptions & options) -> SearchResult
    {
        if (options.budget < 1)
            throw DomainError("search budget must be at least 1");
        if (options.threads < 1)
            throw DomainError("thread count must be at least 1");

        auto start = Clock::now();
        Shared shared;
        shared.budget = options.budget;

        std::vector<BranchResult> results(static_cast<std::size_t>(h.index_count()));
        std::atomic<int> next_branch{0};

        auto worker = [&]() {
            Engine engine(h, p, options, shared);
            for (;;) {
                int b = next_branch.fetch_add(1);
                if (b >= engine.branch_count() || shared.stop)
                    return;
                if (options.deterministic && ! options.count_all && b > shared.best_branch)
                    continue;
                auto r = engine.run_branch(b);
                if (r.first && ! options.count_all) {
                    if (options.deterministic) {
                        int cur = shared.best_branch;
                        while (b < cur && ! shared.best_branch.compare_exchange_weak(cur, b)) {
                        }
                    }
                    else
                        shared.stop = true;
                }
                results[b] = std::move(r);
            }
        };

        if (options.threads == 1)
            worker();
        else {
            std::vector<std::thread> pool;
            for (int t = 0; t < options.threads; ++t)
                pool.emplace_back(worker);
            for (auto & t : pool)
                t.join();
        }

        SearchResult result;
        for (auto & r : results) {
            result.count += r.count;
            if (r.first && ! result.certificate)
                result.certificate = EmbedCertificate{std::move(*r.first), p.name(), {}};
        }
        result.stats.nodes = std::min(shared.nodes.load(), options.budget);
        result.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();

        if (result.certificate) {
            result.certificate->stats = result.stats;
            if (! validate_reduced_map(h, p, result.certificate->map).valid)
                throw std::logic_error("search produced a map that fails validation");
        }

        if (options.count_all)
            result.outcome = shared.exhausted ? SearchOutcome::budget_exhausted
                                              : (result.count > 0 ? SearchOutcome::found : SearchOutcome::not_found);
        else if (result.certificate)
            result.outcome = SearchOutcome::found;
        else
            result.outcome = shared.exhausted ? SearchOutcome::budget_exhausted : SearchOutcome::not_found;
        return result;
    }

    namespace
    {
        auto saturating_mul(std::uint64_t a, std::uint64_t b) -> std::uint64_t
        {
            unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
            return r > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(r);
        }

        auto saturating_add(std::uint64_t a, std::uint64_t b) -> std::uint64_t
        {
            return a > UINT64_MAX - b ? UINT64_MAX : a + b;
        }
    }

    auto oracle_search_space(const ReducedHypergraph & h, const Pattern & p) -> std::uint64_t
    {
        const int n = p.vertex_count(), m = h.index_count();
        const auto & shadow = p.shadow();
        std::vector<Index> lam(static_cast<std::size_t>(n + 1), 0);

        // recursion over vertices; each shadow pair contributes once both ends are placed
        auto rec = [&](auto & self, int u, std::uint64_t product) -> std::uint64_t {
            if (u > n)
                return product;
            std::uint64_t total = 0;
            for (Index x = 1; x <= m; ++x) {
                lam[u] = x;
                std::uint64_t prod = product;
                bool ok = true;
                for (const auto & pr : shadow) {
                    auto other = pr.u == u ? pr.v : (pr.v == u ? pr.u : 0);
                    if (other == 0 || other > u)
                        continue;
                    if (lam[other] == x) {
                        ok = false;
                        break;
                    }
                    prod = saturating_mul(prod, static_cast<std::uint64_t>(h.class_size(x, lam[other])));
                }
                if (ok)
                    total = saturating_add(total, self(self, u + 1, prod));
                if (total == UINT64_MAX)
                    break;
            }
            lam[u] = 0;
            return total;
        };
        return rec(rec, 1, 1);
    }

    auto exhaustive_oracle(const ReducedHypergraph & h, const Pattern & p, std::uint64_t cap, bool count_all)
        -> OracleResult
    {
        auto space = oracle_search_space(h, p);
        if (space > cap)
            throw CapExceeded("oracle search space " + std::to_string(space) + " exceeds cap " + std::to_string(cap));

        // private membership table built from the raw edge lists
        std::set<std::array<int, 6>> table;
        for (const auto & t : h.triples())
            for (auto [a, b, c] : h.constituent(t).edges())
                table.insert({t.i, t.j, t.k, a, b, c});

        const int n = p.vertex_count(), m = h.index_count();
        const auto & shadow = p.shadow();
        const int s = static_cast<int>(shadow.size());
        auto position = [&](PatternVertex a, PatternVertex b) {
            auto key = VertexPair::of(a, b);
            for (int q = 0; q < s; ++q)
                if (shadow[q] == key)
                    return q;
            return -1;
        };

        struct EdgeCheck
        {
            std::array<PatternVertex, 3> vertices;
            std::array<int, 3> pos;
        };
        // edges grouped by the shadow position at which they become fully assigned
        std::vector<std::vector<EdgeCheck>> checks_at(static_cast<std::size_t>(s));
        for (const auto & e : p.edges()) {
            EdgeCheck c{e, {position(e[0], e[1]), position(e[0], e[2]), position(e[1], e[2])}};
            checks_at[*std::max_element(c.pos.begin(), c.pos.end())].push_back(c);
        }

        std::vector<Index> lam(static_cast<std::size_t>(n + 1), 1);
        std::vector<int> phi(static_cast<std::size_t>(s), 0);
        OracleResult result;
        result.leaves = space;

        auto edge_ok = [&](const EdgeCheck & c) {
            std::array<std::pair<Index, int>, 3> ends{{{lam[c.vertices[0]], 0}, {lam[c.vertices[1]], 1},
                {lam[c.vertices[2]], 2}}};
            std::sort(ends.begin(), ends.end());
            // vertex on the pattern pair joining the pattern vertices at slots x and y
            auto on = [&](int x, int y) {
                if (x > y)
                    std::swap(x, y);
                int which = (x == 0 && y == 1) ? 0 : ((x == 0 && y == 2) ? 1 : 2);
                return phi[c.pos[which]];
            };
            std::array<int, 6> key{ends[0].first, ends[1].first, ends[2].first, on(ends[0].second, ends[1].second),
                on(ends[0].second, ends[2].second), on(ends[1].second, ends[2].second)};
            return table.count(key) != 0;
        };

        bool done = false;
        auto rec = [&](auto & self, int q) -> void {
            if (done)
                return;
            if (q == s) {
                ++result.count;
                result.found = true;
                if (! count_all)
                    done = true;
                return;
            }
            int size = h.class_size(lam[shadow[q].u], lam[shadow[q].v]);
            for (int v = 0; v < size && ! done; ++v) {
                phi[q] = v;
                bool ok = true;
                for (const auto & c : checks_at[q])
                    if (! edge_ok(c)) {
                        ok = false;
                        break;
                    }
                if (ok)
                    self(self, q + 1);
            }
        };

        // odometer over every lambda in [M]^n
        for (;;) {
            bool distinct = true;
            for (const auto & pr : shadow)
                if (lam[pr.u] == lam[pr.v]) {
                    distinct = false;
                    break;
                }
            if (distinct)
                rec(rec, 0);
            if (done)
                break;

            int u = n;
            while (u >= 1 && lam[u] == m) {
                lam[u] = 1;
                --u;
            }
            if (u < 1)
                break;
            ++lam[u];
        }
        return result;
    }
}

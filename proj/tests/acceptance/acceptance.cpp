// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "../support/oracles.hpp"

#include <redhyper/cli.hpp>
#include <redhyper/constructions.hpp>
#include <redhyper/embed.hpp>
#include <redhyper/glue.hpp>
#include <redhyper/io.hpp>
#include <redhyper/pipeline.hpp>
#include <redhyper/plaingraph.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace redhyper;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass = true;
        std::string detail;
    };

    auto fail_with(Outcome & o, const std::string & why) -> void
    {
        if (o.pass)
            o.detail = why;
        o.pass = false;
    }

    const auto scratch = fs::temp_directory_path() / "redhyper_acceptance";

    auto host_file(const std::string & name, const ReducedHypergraph & h) -> std::string
    {
        auto path = (scratch / name).string();
        save_reduced_hypergraph(path, h);
        return path;
    }

    /// Report bytes of one CLI run, with the exit code appended.
    auto cli_report(const std::vector<std::string> & args) -> std::string
    {
        std::ostringstream out, err;
        int code = cli::dispatch(args, out, err);
        return out.str() + "exit=" + std::to_string(code) + "\n";
    }

    auto deterministic(std::vector<std::string> args) -> std::vector<std::string>
    {
        args.insert(args.begin(), {"--deterministic", "--threads", "1"});
        return args;
    }

    // criterion 3 host family: seed s, M in 4..6, class sizes 1..4, one of four densities
    auto oracle_host(std::uint64_t s) -> ReducedHypergraph
    {
        static const Rational densities[] = {Rational{1, 10}, Rational{13, 50}, Rational{1, 2}, Rational{9, 10}};
        return random_box_dense_mixed(4 + static_cast<int>(s % 3), 4, densities[s % 4], 1000 + s);
    }

    // criteria 4 and 5 host family
    auto square_sum_host(std::uint64_t s) -> ReducedHypergraph
    {
        return random_box_dense_mixed(4 + static_cast<int>(s % 4), 6, Rational{1, 4} + Rational{1, 10}, 5000 + s);
    }

    // criterion 7 host family (criterion 8 re-runs it with M = 6)
    auto dense_host(std::uint64_t s, int m = 12) -> ReducedHypergraph
    {
        return random_box_dense(m, 6, Rational{9, 10}, 7000 + s);
    }

    auto loose() -> PipelineConfig
    {
        PipelineConfig c;
        c.eps = Rational{7, 10};
        c.delta = Rational{1, 4};
        return c;
    }

    auto criterion_1() -> Outcome
    {
        Outcome o;
        for (int m = 4; m <= 6; ++m) {
            auto h = orientation_reduced(m);
            for (const auto & t : h.triples())
                if (constituent_density(h, t) != Rational(1, 4))
                    fail_with(o, "M=" + std::to_string(m) + " " + to_string(t) + " density is not 1/4");
            for (auto which : {CatalogPattern::K4minus, CatalogPattern::Fstar}) {
                auto r = exhaustive_oracle(h, pattern_catalog(which));
                if (r.found)
                    fail_with(o, "M=" + std::to_string(m) + " oracle found " + pattern_catalog(which).name());
            }
        }
        if (o.pass)
            o.detail = "M=4..6 exactly 1/4-dense, K4minus and Fstar not found";
        return o;
    }

    auto criterion_2() -> Outcome
    {
        Outcome o;
        auto k4m = pattern_catalog(CatalogPattern::K4minus);
        double density_sum = 0;
        const int seeds = 100;
        for (int n = 4; n <= 12; ++n)
            for (std::uint64_t s = 1; s <= seeds; ++s) {
                auto g = cyclic_triple_3graph(Tournament::random(n, s));
                if (count_copies(g, k4m).labelled != 0)
                    fail_with(o, "K4minus copy at n=" + std::to_string(n) + " seed=" + std::to_string(s));
                if (n == 12)
                    density_sum += static_cast<double>(g.edge_count()) / 220.0;
            }
        const double mean = density_sum / seeds;
        if (mean < 0.15 || mean > 0.35)
            fail_with(o, "mean density " + std::to_string(mean));
        if (o.pass)
            o.detail = "n=4..12 x 100 seeds K4minus-free, mean density at n=12 " + std::to_string(mean);
        return o;
    }

    auto criterion_3() -> Outcome
    {
        Outcome o;
        const std::vector<CatalogPattern> patterns{
            CatalogPattern::single_edge, CatalogPattern::K4minus, CatalogPattern::K4, CatalogPattern::Fstar};
        std::uint64_t found = 0, total = 0;
        for (std::uint64_t s = 1; s <= 200; ++s) {
            auto h = oracle_host(s);
            for (auto which : patterns) {
                auto p = pattern_catalog(which);
                SearchOptions options;
                options.count_all = true;
                auto fast = find_reduced_image(h, p, options);
                auto slow = exhaustive_oracle(h, p);
                ++total;
                found += slow.found;
                if ((fast.outcome == SearchOutcome::found) != slow.found || fast.count != slow.count)
                    fail_with(o, "seed " + std::to_string(s) + " " + p.name() + ": search " + std::to_string(fast.count) +
                            " vs oracle " + std::to_string(slow.count));
            }
        }
        if (o.pass)
            o.detail = std::to_string(total) + " host/pattern pairs agree (" + std::to_string(found) + " found)";
        return o;
    }

    auto criterion_4() -> Outcome
    {
        Outcome o;
        const Rational eps{1, 10};
        std::uint64_t triples = 0;
        for (std::uint64_t s = 1; s <= 100; ++s) {
            auto h = square_sum_host(s);
            if (! is_box_dense(h, Rational{1, 4} + eps).dense)
                fail_with(o, "seed " + std::to_string(s) + " host below 1/4 + eps");
            oracle::EdgeTable e(h);
            auto q = build_q_graphs(h, eps);
            for (const auto & t : h.triples()) {
                auto sos = check_sum_of_squares(h, q, t);
                auto d = oracle::naive_degrees(e, t, 1, 10);
                std::int64_t lhs = 0;
                for (std::size_t v = 0; v < d.low.size(); ++v)
                    lhs += d.low[v] * d.high[v];
                ++triples;
                if (! sos.holds)
                    fail_with(o, "seed " + std::to_string(s) + " " + to_string(t) + " inequality fails");
                if (sos.lhs != Rational(lhs))
                    fail_with(o, "seed " + std::to_string(s) + " " + to_string(t) + " lhs differs from recount");
            }
        }
        if (o.pass)
            o.detail = std::to_string(triples) + " triples on 100 hosts";
        return o;
    }

    /// Both clauses recomputed from the raw edge table.
    auto naive_star(const oracle::EdgeTable & e, const IndexTriple & t, int r_star, const Rational & delta) -> bool
    {
        auto d = oracle::naive_degrees(e, t, 1, 10);
        const std::int64_t pij = e.size(t.i, t.j), pik = e.size(t.i, t.k);
        std::int64_t squares = 0;
        for (auto x : d.low)
            squares += x * x;
        // 1/4 + eps/2 = 3/10
        if (squares * 10 < 3 * pij * pij * pik)
            return false;
        auto level = [&](int r) {
            std::int64_t n = 0;
            for (auto x : d.low)
                n += Rational{x} >= (Rational{1, 2} + delta * r) * pij;
            return Rational{n} >= delta * pik;
        };
        return level(r_star) && ! level(r_star + 1);
    }

    auto criterion_5() -> Outcome
    {
        Outcome o;
        PipelineConfig config;
        int cleaned = 0;
        std::uint64_t triples = 0;
        std::map<std::string, int> stages;
        for (std::uint64_t s = 1; s <= 100; ++s) {
            auto h = square_sum_host(s);
            auto c = clean(h, config);
            if (! c.ok()) {
                ++stages[c.failure->stage];
                continue;
            }
            ++cleaned;
            const auto & host = *c.host;
            oracle::EdgeTable e(host);
            for (const auto & t : host.triples()) {
                ++triples;
                if (! naive_star(e, t, c.q.r_star, config.delta))
                    fail_with(o, "seed " + std::to_string(s) + " " + to_string(t) + " fails the recount");
                for (int r = 1; r <= level_count(config.delta); ++r)
                    if (! s_set(host, c.q, t, r + 1).is_subset_of(s_set(host, c.q, t, r)))
                        fail_with(o, "seed " + std::to_string(s) + " S-sets not nested at level " + std::to_string(r));
            }
        }
        if (o.pass) {
            o.detail = std::to_string(cleaned) + "/100 cleaned, " + std::to_string(triples) + " surviving triples recounted";
            for (const auto & [stage, n] : stages)
                o.detail += ", " + std::to_string(n) + " stopped at " + stage;
        }
        return o;
    }

    auto criterion_6() -> Outcome
    {
        Outcome o;
        auto h = random_box_dense(30, 2, Rational{1}, 0);
        auto f = find_fstar(h, loose());
        if (! f.ok())
            fail_with(o, "find_fstar failed at " + f.failure->stage);
        else if (! validate_reduced_map(h, pattern_catalog(CatalogPattern::Fstar), f.certificate->map).valid)
            fail_with(o, "Fstar certificate invalid");
        auto g = find_glued(h, loose());
        if (! g.ok())
            fail_with(o, "find_glued failed at " + g.failure->stage);
        else if (! validate_glued(h, *g.configuration).valid)
            fail_with(o, "glued configuration invalid");
        if (o.pass)
            o.detail = "Fstar certificate and glued configuration validated";
        return o;
    }

    const std::vector<std::pair<std::string, PipelineConfig>> & randomness_configs()
    {
        static const std::vector<std::pair<std::string, PipelineConfig>> configs = [] {
            std::vector<std::pair<std::string, PipelineConfig>> c;
            c.emplace_back("1/10,1/20", PipelineConfig{});
            c.emplace_back("7/10,1/4", loose());
            return c;
        }();
        return configs;
    }

    auto criterion_7() -> Outcome
    {
        Outcome o;
        std::map<std::string, int> tally;
        auto fstar = pattern_catalog(CatalogPattern::Fstar);
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto h = dense_host(s);
            if (! is_box_dense(h, Rational{9, 10}).dense)
                fail_with(o, "seed " + std::to_string(s) + " host below 0.9");
            for (const auto & [name, config] : randomness_configs()) {
                try {
                    auto f = find_fstar(h, config);
                    if (f.ok()) {
                        ++tally[name + " fstar found"];
                        if (! validate_reduced_map(h, fstar, f.certificate->map).valid)
                            fail_with(o, "seed " + std::to_string(s) + " invalid Fstar certificate");
                    }
                    else if (f.failure->stage.empty())
                        fail_with(o, "seed " + std::to_string(s) + " unnamed failure");
                    else
                        ++tally[name + " fstar " + f.failure->stage];

                    auto g = find_glued(h, config);
                    if (g.ok()) {
                        ++tally[name + " glued found"];
                        if (! validate_glued(h, *g.configuration).valid)
                            fail_with(o, "seed " + std::to_string(s) + " invalid glued configuration");
                    }
                    else if (g.failure->stage.empty())
                        fail_with(o, "seed " + std::to_string(s) + " unnamed failure");
                    else
                        ++tally[name + " glued " + g.failure->stage];
                }
                catch (const std::exception & e) {
                    fail_with(o, "seed " + std::to_string(s) + " threw: " + e.what());
                }
            }
        }
        if (o.pass) {
            o.detail = "50 hosts x 2 configs:";
            for (const auto & [k, n] : tally)
                o.detail += " [" + k + ": " + std::to_string(n) + "]";
        }
        return o;
    }

    auto criterion_8() -> Outcome
    {
        Outcome o;
        int successes = 0;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto h = dense_host(s, 6);
            for (const auto & [name, config] : randomness_configs()) {
                auto g = find_glued(h, config);
                if (! g.ok())
                    continue;
                ++successes;
                if (! brute_force_glued(h, default_glue_oracle_cap, false).found)
                    fail_with(o, "seed " + std::to_string(s) + " (" + name + ") oracle disagrees");
            }
        }
        if (o.pass)
            o.detail = std::to_string(successes) + " glued successes on M=6 re-runs, all confirmed by the oracle";
        return o;
    }

    auto criterion_9() -> Outcome
    {
        Outcome o;
        std::vector<std::array<int, 3>> all;
        for (int a = 1; a <= 6; ++a)
            for (int b = a + 1; b <= 6; ++b)
                for (int c = b + 1; c <= 6; ++c)
                    all.push_back({a, b, c});
        if (uniform_density_audit(Plain3Graph(6, all), Rational{1}, Rational{0}).outcome != AuditOutcome::pass)
            fail_with(o, "K6 did not pass");
        auto r = uniform_density_audit(Plain3Graph(6, {}), Rational{1, 2}, Rational{0});
        if (r.outcome != AuditOutcome::fail || r.witness != std::vector<int>{1, 2, 3, 4, 5, 6})
            fail_with(o, "empty graph did not fail with U = V");
        if (o.pass)
            o.detail = "K6 passes, empty graph fails with U = {1..6}";
        return o;
    }

    auto criterion_10() -> Outcome
    {
        Outcome o;
        std::vector<std::vector<std::string>> runs;
        for (std::uint64_t s = 1; s <= 200; ++s) {
            auto path = host_file("c3_" + std::to_string(s) + ".rh", oracle_host(s));
            for (auto p : {"single_edge", "K4minus", "K4", "Fstar"}) {
                runs.push_back(deterministic({"find", "--host", path, "--pattern", p, "--count-all"}));
                runs.push_back(deterministic({"oracle", "--host", path, "--pattern", p, "--count-all"}));
            }
        }
        auto c6 = host_file("c6.rh", random_box_dense(30, 2, Rational{1}, 0));
        runs.push_back(deterministic({"pipeline", "--host", c6, "--eps", "7/10", "--delta", "1/4"}));
        runs.push_back(deterministic({"glue", "--host", c6, "--eps", "7/10", "--delta", "1/4"}));
        for (std::uint64_t s = 1; s <= 50; ++s) {
            auto path = host_file("c7_" + std::to_string(s) + ".rh", dense_host(s));
            for (const auto & [eps, delta] : {std::pair{"1/10", "1/20"}, std::pair{"7/10", "1/4"}}) {
                runs.push_back(deterministic({"pipeline", "--host", path, "--eps", eps, "--delta", delta}));
                runs.push_back(deterministic({"glue", "--host", path, "--eps", eps, "--delta", delta}));
            }
        }
        std::size_t bytes = 0;
        for (const auto & args : runs) {
            auto first = cli_report(args), second = cli_report(args);
            bytes += first.size();
            if (first != second)
                fail_with(o, "reports differ for: " + args[3] + " " + args[5]);
            if (first.find("timing.seconds") != std::string::npos)
                fail_with(o, "deterministic report carries a timing");
        }
        if (o.pass)
            o.detail = std::to_string(runs.size()) + " reports (" + std::to_string(bytes) + " bytes) identical across two runs";
        return o;
    }
}

int main()
{
    fs::create_directories(scratch);
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
        {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
    int failures = 0;
    for (const auto & [n, run] : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        }
        catch (const std::exception & e) {
            o = {false, std::string{"exception: "} + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += ! o.pass;
        std::printf("criterion %2d: %s  %s (%.2fs)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    fs::remove_all(scratch);
    return failures == 0 ? 0 : 1;
}

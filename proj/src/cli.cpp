#include <redhyper/cli.hpp>
#include <redhyper/constructions.hpp>
#include <redhyper/embed.hpp>
#include <redhyper/errors.hpp>
#include <redhyper/glue.hpp>
#include <redhyper/io.hpp>
#include <redhyper/pipeline.hpp>
#include <redhyper/plaingraph.hpp>
#include <redhyper/rng.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace redhyper::cli
{
    auto fnv1a64(std::string_view bytes) -> std::uint64_t
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    auto Report::add(std::string key, std::string value) -> void { _lines.push_back(key + "=" + value); }

    auto Report::raw(std::string line) -> void { _lines.push_back(std::move(line)); }

    auto Report::write(std::ostream & out) const -> void
    {
        for (const auto & line : _lines)
            out << line << '\n';
    }

    auto Report::str() const -> std::string
    {
        std::ostringstream out;
        write(out);
        return out.str();
    }

    namespace
    {
        auto hex(std::uint64_t v) -> std::string
        {
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        auto join(const std::vector<Index> & xs) -> std::string
        {
            std::string out;
            for (std::size_t n = 0; n < xs.size(); ++n)
                out += (n ? "," : "") + std::to_string(xs[n]);
            return out.empty() ? "-" : out;
        }

        struct LoadedHost
        {
            ReducedHypergraph host;
            std::string digest;
        };

        auto load_host(const std::string & path) -> LoadedHost
        {
            auto bytes = read_file_bytes(path);
            std::istringstream in(bytes);
            return LoadedHost{read_reduced_hypergraph(in), hex(fnv1a64(bytes))};
        }

        auto parse_ladder(const std::string & text) -> std::vector<int>
        {
            std::vector<int> out;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t used = 0;
                    out.push_back(std::stoi(item, &used));
                    if (used != item.size())
                        throw DomainError("");
                }
                catch (const std::exception &) {
                    throw DomainError("ladder entries must be integers, got '" + item + "'");
                }
            }
            if (out.empty())
                throw DomainError("ladder must not be empty");
            return out;
        }

        auto certificate_lines(Report & report, const ReducedMap & map) -> void
        {
            for (std::size_t u = 0; u < map.lambda.size(); ++u)
                report.raw("L " + std::to_string(u + 1) + " " + std::to_string(map.lambda[u]));
            for (const auto & [pair, cv] : map.phi)
                report.raw("F " + std::to_string(pair.u) + " " + std::to_string(pair.v) + " " + std::to_string(cv.cls.lo) +
                    " " + std::to_string(cv.cls.hi) + " " + std::to_string(cv.vertex));
        }

        auto trace_out(const std::string & path, const Trace & trace) -> void
        {
            if (path.empty())
                return;
            std::ofstream out(path);
            if (! out)
                throw DomainError("cannot write " + path);
            out << "# redhyper trace v1\n";
            for (const auto & line : trace.lines)
                out << line << '\n';
        }

        struct Globals
        {
            std::string report_path;
            bool deterministic = false;
            int threads = 1;
        };

        class Timer
        {
        public:
            auto seconds() const -> double
            {
                return std::chrono::duration<double>(std::chrono::steady_clock::now() - _start).count();
            }

        private:
            std::chrono::steady_clock::time_point _start = std::chrono::steady_clock::now();
        };
    }

    auto dispatch(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int
    {
        CLI::App app{"Reduced hypergraph density, embedding and construction tools", "redhyper"};
        app.require_subcommand(1);
        app.fallthrough();
        Globals globals;
        app.add_option("--report", globals.report_path, "Write the report to this file instead of stdout");
        app.add_flag("--deterministic", globals.deterministic, "Omit timings; lowest-branch results under threads");
        app.add_option("--threads", globals.threads, "Worker threads")->check(CLI::PositiveNumber);

        Report report;
        std::function<int()> run;

        // density
        auto * density = app.add_subcommand("density", "Check (d, box)-density of a host");
        std::string host_path, d_text;
        density->add_option("--host", host_path)->required();
        density->add_option("--d", d_text)->required();
        density->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                auto d = parse_rational(d_text);
                report.add("command", "density");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                report.add("config.d", to_string(d));
                std::optional<Rational> least;
                for (const auto & t : h.triples()) {
                    auto value = constituent_density(h, t);
                    if (! least || value < *least)
                        least = value;
                }
                auto result = is_box_dense(h, d);
                report.add("min_density", least ? to_string(*least) : "-");
                report.add("outcome", result.dense ? "dense" : "not-dense");
                if (result.witness)
                    report.add("witness", to_string(*result.witness) + " density=" +
                            to_string(constituent_density(h, *result.witness)));
                return result.dense ? exit_success : exit_negative;
            };
        });

        // find
        auto * find = app.add_subcommand("find", "Search for a reduced image of a pattern");
        std::string pattern_name;
        std::uint64_t budget = std::numeric_limits<std::uint64_t>::max(), seed = 0;
        bool count_all = false;
        find->add_option("--host", host_path)->required();
        find->add_option("--pattern", pattern_name)->required();
        find->add_option("--budget", budget);
        find->add_flag("--count-all", count_all);
        find->add_option("--seed", seed);
        find->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                auto p = resolve_pattern(pattern_name);
                SearchOptions options;
                options.budget = budget;
                options.count_all = count_all;
                options.seed = seed;
                options.threads = globals.threads;
                options.deterministic = globals.deterministic || globals.threads == 1;
                Timer timer;
                auto result = find_reduced_image(h, p, options);
                report.add("command", "find");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                report.add("config.pattern", p.name());
                report.add("config.budget", budget == std::numeric_limits<std::uint64_t>::max() ? "unbounded" : std::to_string(budget));
                report.add("config.count_all", count_all ? "1" : "0");
                report.add("config.seed", std::to_string(seed));
                report.add("config.threads", std::to_string(globals.threads));
                report.add("outcome", to_string(result.outcome));
                if (count_all && result.outcome != SearchOutcome::budget_exhausted)
                    report.add("count", std::to_string(result.count));
                if (globals.threads == 1)
                    report.add("counter.nodes", std::to_string(result.stats.nodes));
                if (result.certificate) {
                    auto check = validate_reduced_map(h, p, result.certificate->map);
                    report.add("certificate.valid", check.valid ? "1" : "0");
                    certificate_lines(report, result.certificate->map);
                }
                if (! globals.deterministic)
                    report.add("timing.seconds", std::to_string(timer.seconds()));
                switch (result.outcome) {
                case SearchOutcome::found:
                    return int{exit_success};
                case SearchOutcome::not_found:
                    return int{exit_negative};
                default:
                    return int{exit_exhausted};
                }
            };
        });

        // oracle
        auto * oracle = app.add_subcommand("oracle", "Exhaustive brute-force reduced-image search");
        std::uint64_t cap = default_oracle_cap;
        oracle->add_option("--host", host_path)->required();
        oracle->add_option("--pattern", pattern_name)->required();
        oracle->add_option("--cap", cap);
        oracle->add_flag("--count-all", count_all);
        oracle->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                auto p = resolve_pattern(pattern_name);
                report.add("command", "oracle");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                report.add("config.pattern", p.name());
                report.add("config.cap", std::to_string(cap));
                report.add("search_space", std::to_string(oracle_search_space(h, p)));
                Timer timer;
                auto result = exhaustive_oracle(h, p, cap, count_all);
                report.add("outcome", result.found ? "found" : "not-found");
                if (count_all)
                    report.add("count", std::to_string(result.count));
                if (! globals.deterministic)
                    report.add("timing.seconds", std::to_string(timer.seconds()));
                return result.found ? exit_success : exit_negative;
            };
        });

        // pipeline / glue share most of their configuration
        std::string eps_text, delta_text, trace_path, ladder_text;
        int rounds = 0, m_star = 0, m_target = 0;
        bool best_effort = false;
        auto make_config = [&] {
            PipelineConfig config;
            config.eps = parse_rational(eps_text);
            config.delta = parse_rational(delta_text);
            config.rounds = rounds;
            config.ramsey_target_1 = m_star;
            config.ramsey_target_2 = m_target;
            config.best_effort = best_effort;
            config.threads = globals.threads;
            if (! ladder_text.empty())
                config.ladder = parse_ladder(ladder_text);
            config.validate();
            return config;
        };
        auto echo_config = [&](const PipelineConfig & config) {
            report.add("config.eps", to_string(config.eps));
            report.add("config.delta", to_string(config.delta));
            report.add("config.rounds", std::to_string(config.effective_rounds()));
            report.add("config.m_star", config.ramsey_target_1 ? std::to_string(config.ramsey_target_1) : "largest");
            report.add("config.m", config.ramsey_target_2 ? std::to_string(config.ramsey_target_2) : "largest");
            report.add("config.min_final_indices", std::to_string(config.min_final_indices));
            report.add("config.best_effort", config.best_effort ? "1" : "0");
        };
        auto echo_cleaning = [&](const CleanResult & c) {
            if (! c.ok())
                return;
            report.add("clean.surviving", join(c.q.original_index));
            report.add("clean.r_star", std::to_string(c.q.r_star));
            report.add("clean.exhaustive", c.ramsey_exhaustive ? "1" : "0");
        };

        auto * pipeline = app.add_subcommand("pipeline", "Clean the host and assemble a reduced image of Fstar");
        pipeline->add_option("--host", host_path)->required();
        pipeline->add_option("--eps", eps_text)->required();
        pipeline->add_option("--delta", delta_text)->required();
        pipeline->add_option("--rounds", rounds);
        pipeline->add_option("--m-star", m_star);
        pipeline->add_option("--m", m_target);
        pipeline->add_option("--trace", trace_path);
        pipeline->add_flag("--best-effort", best_effort);
        pipeline->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                auto config = make_config();
                report.add("command", "pipeline");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                echo_config(config);
                Trace trace;
                Timer timer;
                auto result = find_fstar(h, config, &trace);
                trace_out(trace_path, trace);
                echo_cleaning(result.cleaning);
                for (const auto & row : result.rows)
                    report.add("row." + std::to_string(row.round), "r=" + std::to_string(row.r) + " x=" +
                            std::to_string(row.x) + " y=" + std::to_string(row.y) + " J=" + join(row.next));
                if (result.m_prime)
                    report.add("m_prime", std::to_string(result.m_prime));
                if (result.choice.element >= 0)
                    report.add("pigeonhole", "v=" + std::to_string(result.choice.element) +
                            " count=" + std::to_string(result.choice.multiplicity));
                report.add("outcome", result.ok() ? "found" : "failure");
                int code = exit_success;
                if (result.ok()) {
                    auto p = pattern_catalog(CatalogPattern::Fstar);
                    auto check = validate_reduced_map(h, p, result.certificate->map);
                    report.add("certificate.pattern", p.name());
                    report.add("certificate.valid", check.valid ? "1" : "0");
                    certificate_lines(report, result.certificate->map);
                }
                else {
                    report.add("failure.stage", result.failure->stage);
                    report.add("failure.reason", result.failure->reason);
                    code = exit_negative;
                }
                if (! globals.deterministic)
                    report.add("timing.seconds", std::to_string(timer.seconds()));
                return code;
            };
        });

        auto * glue = app.add_subcommand("glue", "Clean the host and assemble a glued configuration");
        glue->add_option("--host", host_path)->required();
        glue->add_option("--eps", eps_text)->required();
        glue->add_option("--delta", delta_text)->required();
        glue->add_option("--ladder", ladder_text);
        glue->add_option("--m-star", m_star);
        glue->add_option("--m", m_target);
        glue->add_option("--trace", trace_path);
        glue->add_flag("--best-effort", best_effort);
        glue->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                auto config = make_config();
                report.add("command", "glue");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                echo_config(config);
                Trace trace;
                Timer timer;
                auto result = find_glued(h, config, &trace);
                trace_out(trace_path, trace);
                echo_cleaning(result.cleaning);
                if (! result.ladder.empty()) {
                    std::vector<Index> ladder(result.ladder.begin(), result.ladder.end());
                    report.add("ladder", join(ladder));
                }
                for (const auto & row : result.rows)
                    report.add("row." + std::to_string(row.round), "r=" + std::to_string(row.r) + " x=" +
                            std::to_string(row.x) + " J=" + join(row.next) +
                            " degenerate=" + (row.degenerate ? "1" : "0") +
                            " hypothesis_met=" + (row.hypothesis_met ? "1" : "0"));
                report.add("outcome", result.ok() ? "found" : "failure");
                int code = exit_success;
                if (result.ok()) {
                    const auto & g = *result.configuration;
                    report.add("glued.indices", join({g.indices.begin(), g.indices.end()}));
                    report.add("glued.vertices", "a12=" + std::to_string(g.a12) + " a13=" + std::to_string(g.a13) +
                            " a14=" + std::to_string(g.a14) + " a23=" + std::to_string(g.a23) +
                            " a24=" + std::to_string(g.a24) + " a34=" + std::to_string(g.a34) +
                            " a23p=" + std::to_string(g.a23p) + " a24p=" + std::to_string(g.a24p));
                    report.add("glued.valid", validate_glued(h, g).valid ? "1" : "0");
                }
                else {
                    report.add("failure.stage", result.failure->stage);
                    report.add("failure.reason", result.failure->reason);
                    code = exit_negative;
                }
                if (! globals.deterministic)
                    report.add("timing.seconds", std::to_string(timer.seconds()));
                return code;
            };
        });

        auto * glue_oracle = app.add_subcommand("glue-oracle", "Brute-force search for a glued configuration");
        std::uint64_t glue_cap = default_glue_oracle_cap;
        glue_oracle->add_option("--host", host_path)->required();
        glue_oracle->add_option("--cap", glue_cap);
        glue_oracle->add_flag("--count-all", count_all);
        glue_oracle->callback([&] {
            run = [&] {
                auto [h, digest] = load_host(host_path);
                report.add("command", "glue-oracle");
                report.add("input.host", host_path);
                report.add("input.host.fnv1a64", digest);
                report.add("config.cap", std::to_string(glue_cap));
                report.add("search_space", std::to_string(glued_search_space(h)));
                Timer timer;
                auto result = brute_force_glued(h, glue_cap, count_all);
                report.add("outcome", result.found ? "found" : "not-found");
                if (count_all)
                    report.add("count", std::to_string(result.count));
                if (result.first)
                    report.add("first.indices",
                        join({result.first->indices.begin(), result.first->indices.end()}));
                if (! globals.deterministic)
                    report.add("timing.seconds", std::to_string(timer.seconds()));
                return result.found ? exit_success : exit_negative;
            };
        });

        // gen
        auto * gen = app.add_subcommand("gen", "Generate hosts and plain 3-graphs");
        std::string kind, out_path;
        int m_indices = 0, class_size = 0, max_class_size = 0, blow = 0, n_vertices = 0;
        bool transitive = false;
        gen->add_option("--kind", kind)->required()->check(
            CLI::IsMember({"random", "orientation", "blowup", "tournament3"}));
        gen->add_option("--M", m_indices);
        gen->add_option("--class-size", class_size);
        gen->add_option("--max-class-size", max_class_size);
        gen->add_option("--d", d_text);
        gen->add_option("--seed", seed);
        gen->add_option("--host", host_path);
        gen->add_option("--t", blow);
        gen->add_option("--n", n_vertices);
        gen->add_flag("--transitive", transitive);
        gen->add_option("--out", out_path);
        gen->callback([&] {
            run = [&] {
                std::ostringstream data;
                report.add("command", "gen");
                report.add("config.kind", kind);
                if (kind == "random") {
                    if (d_text.empty())
                        throw DomainError("gen random needs --d");
                    auto d = parse_rational(d_text);
                    report.add("config.M", std::to_string(m_indices));
                    report.add("config.d", to_string(d));
                    report.add("config.seed", std::to_string(seed));
                    report.add("rng", std::string{Rng::algorithm_id});
                    if (max_class_size > 0) {
                        report.add("config.max_class_size", std::to_string(max_class_size));
                        write_reduced_hypergraph(data, random_box_dense_mixed(m_indices, max_class_size, d, seed));
                    }
                    else {
                        report.add("config.class_size", std::to_string(class_size));
                        write_reduced_hypergraph(data, random_box_dense(m_indices, class_size, d, seed));
                    }
                }
                else if (kind == "orientation") {
                    report.add("config.M", std::to_string(m_indices));
                    write_reduced_hypergraph(data, orientation_reduced(m_indices));
                }
                else if (kind == "blowup") {
                    auto [h, digest] = load_host(host_path);
                    report.add("input.host", host_path);
                    report.add("input.host.fnv1a64", digest);
                    report.add("config.t", std::to_string(blow));
                    write_reduced_hypergraph(data, reduced_blow_up(h, blow));
                }
                else {
                    if (n_vertices < 3)
                        throw DomainError("gen tournament3 needs --n >= 3");
                    report.add("config.n", std::to_string(n_vertices));
                    auto t = transitive ? Tournament::transitive(n_vertices) : Tournament::random(n_vertices, seed);
                    if (! transitive) {
                        report.add("config.seed", std::to_string(seed));
                        report.add("rng", std::string{Rng::algorithm_id});
                    }
                    write_triple_system(data, cyclic_triple_3graph(t).to_triple_system());
                }
                auto bytes = data.str();
                report.add("output.fnv1a64", hex(fnv1a64(bytes)));
                if (out_path.empty())
                    out << bytes;
                else {
                    std::ofstream file(out_path);
                    if (! file)
                        throw DomainError("cannot write " + out_path);
                    file << bytes;
                    report.add("output", out_path);
                }
                report.add("outcome", "written");
                // without --out the data owns stdout, so the report needs --report
                if (out_path.empty() && globals.report_path.empty())
                    report = Report{};
                return int{exit_success};
            };
        });

        // audit
        auto * audit = app.add_subcommand("audit", "Uniform (d, eta)-density audit of a plain 3-graph");
        std::string graph_path, eta_text, sizes_text;
        bool exhaustive = false;
        std::uint64_t samples = 0;
        int audit_cap = 20;
        audit->add_option("--graph", graph_path)->required();
        audit->add_option("--d", d_text)->required();
        audit->add_option("--eta", eta_text)->required();
        auto * exhaustive_flag = audit->add_flag("--exhaustive", exhaustive);
        auto * samples_option = audit->add_option("--samples", samples);
        exhaustive_flag->excludes(samples_option);
        audit->add_option("--seed", seed);
        audit->add_option("--cap", audit_cap);
        audit->add_option("--sizes", sizes_text);
        audit->callback([&] {
            run = [&] {
                auto bytes = read_file_bytes(graph_path);
                std::istringstream in(bytes);
                Plain3Graph g(read_triple_system(in));
                auto d = parse_rational(d_text);
                auto eta = parse_rational(eta_text);
                AuditOptions options;
                options.exhaustive = samples == 0;
                options.exhaustive_cap = audit_cap;
                options.samples = samples;
                options.seed = seed;
                if (! sizes_text.empty())
                    options.sizes = parse_ladder(sizes_text);
                report.add("command", "audit");
                report.add("input.graph", graph_path);
                report.add("input.graph.fnv1a64", hex(fnv1a64(bytes)));
                report.add("config.d", to_string(d));
                report.add("config.eta", to_string(eta));
                report.add("config.mode", options.exhaustive ? "exhaustive" : "sampled");
                if (! options.exhaustive) {
                    report.add("config.samples", std::to_string(samples));
                    report.add("config.seed", std::to_string(seed));
                    report.add("rng", std::string{Rng::algorithm_id});
                }
                auto result = uniform_density_audit(g, d, eta, options);
                report.add("subsets_checked", std::to_string(result.subsets_checked));
                report.add("outcome", to_string(result.outcome));
                if (result.outcome == AuditOutcome::fail) {
                    report.add("witness", join(result.witness));
                    report.add("witness.edges", std::to_string(result.witness_edges));
                    report.add("witness.deficit", to_string(result.witness_deficit));
                }
                return result.outcome == AuditOutcome::fail ? exit_negative : exit_success;
            };
        });

        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp &) {
            out << app.help();
            return exit_success;
        }
        catch (const CLI::CallForAllHelp &) {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_success;
        }
        catch (const CLI::ParseError & e) {
            err << "error: " << e.what() << "\n\n" << app.help();
            return exit_input_error;
        }

        int code = exit_success;
        try {
            code = run();
        }
        catch (const ParseError & e) {
            err << "input error: " << e.what() << '\n';
            return exit_input_error;
        }
        catch (const DomainError & e) {
            err << "input error: " << e.what() << '\n';
            return exit_input_error;
        }
        catch (const CapExceeded & e) {
            report.add("outcome", "cap-exceeded");
            report.add("reason", e.what());
            code = exit_exhausted;
        }
        catch (const std::exception & e) {
            err << "internal error: " << e.what() << '\n';
            return exit_internal_error;
        }

        if (! globals.report_path.empty()) {
            std::ofstream file(globals.report_path);
            if (! file) {
                err << "input error: cannot write " << globals.report_path << '\n';
                return exit_input_error;
            }
            report.write(file);
        }
        else
            report.write(out);
        return code;
    }
}

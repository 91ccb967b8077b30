#include <redhyper/constructions.hpp>
#include <redhyper/embed.hpp>
#include <redhyper/errors.hpp>
#include <redhyper/glue.hpp>
#include <redhyper/io.hpp>
#include <redhyper/pipeline.hpp>
#include <redhyper/plaingraph.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace redhyper;

namespace
{
    auto map_to_dict(const ReducedMap & m) -> py::dict
    {
        py::dict out;
        out["lambda"] = m.lambda;
        py::dict phi;
        for (const auto & [pair, cv] : m.phi)
            phi[py::make_tuple(pair.u, pair.v)] = py::make_tuple(cv.cls.lo, cv.cls.hi, cv.vertex);
        out["phi"] = phi;
        return out;
    }

    auto pipeline_config(const std::string & eps, const std::string & delta, int rounds, int m_star, int m,
        std::vector<int> ladder) -> PipelineConfig
    {
        PipelineConfig c;
        c.eps = parse_rational(eps);
        c.delta = parse_rational(delta);
        c.rounds = rounds;
        c.ramsey_target_1 = m_star;
        c.ramsey_target_2 = m;
        c.ladder = std::move(ladder);
        c.validate();
        return c;
    }

    auto failure_fields(py::dict & out, const std::optional<StageFailure> & f) -> void
    {
        out["stage"] = f ? py::cast(f->stage) : py::none();
        out["reason"] = f ? py::cast(f->reason) : py::none();
    }
}

PYBIND11_MODULE(redhyper, mod)
{
    mod.doc() = "Reduced hypergraphs: density checks, reduced-map search, cleaning pipeline and generators";

    py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(mod, "ParseError", PyExc_ValueError);
    py::register_exception<CapExceeded>(mod, "CapExceeded", PyExc_RuntimeError);

    py::class_<ReducedHypergraph>(mod, "ReducedHypergraph")
        .def_static("parse", [](const std::string & text) {
            std::istringstream in(text);
            return read_reduced_hypergraph(in);
        })
        .def_static("load", [](const std::string & path) { return load_reduced_hypergraph(path); })
        .def("to_text", [](const ReducedHypergraph & h) {
            std::ostringstream out;
            write_reduced_hypergraph(out, h);
            return out.str();
        })
        .def_property_readonly("index_count", &ReducedHypergraph::index_count)
        .def("class_size", py::overload_cast<Index, Index>(&ReducedHypergraph::class_size, py::const_))
        .def("total_edges", &ReducedHypergraph::total_edges)
        .def("triples", [](const ReducedHypergraph & h) {
            std::vector<std::tuple<int, int, int>> out;
            for (const auto & t : h.triples())
                out.emplace_back(t.i, t.j, t.k);
            return out;
        })
        .def("density", [](const ReducedHypergraph & h, int i, int j, int k) {
            return to_string(constituent_density(h, IndexTriple::of(i, j, k)));
        })
        .def("__eq__", [](const ReducedHypergraph & a, const ReducedHypergraph & b) { return a == b; });

    mod.def("is_box_dense", [](const ReducedHypergraph & h, const std::string & d) {
        auto r = is_box_dense(h, parse_rational(d));
        py::object witness = py::none();
        if (r.witness)
            witness = py::make_tuple(r.witness->i, r.witness->j, r.witness->k);
        return py::make_tuple(r.dense, witness);
    }, py::arg("host"), py::arg("d"));

    mod.def("find_reduced_image", [](const ReducedHypergraph & h, const std::string & pattern, std::optional<std::uint64_t> budget,
                                      bool count_all, int threads) {
        SearchOptions o;
        if (budget)
            o.budget = *budget;
        o.count_all = count_all;
        o.threads = threads;
        SearchResult r;
        {
            py::gil_scoped_release release;
            r = find_reduced_image(h, resolve_pattern(pattern), o);
        }
        py::dict out;
        out["outcome"] = to_string(r.outcome);
        out["count"] = r.count;
        out["nodes"] = r.stats.nodes;
        out["map"] = r.certificate ? py::object(map_to_dict(r.certificate->map)) : py::none();
        return out;
    }, py::arg("host"), py::arg("pattern"), py::arg("budget") = py::none(), py::arg("count_all") = false,
        py::arg("threads") = 1);

    mod.def("exhaustive_oracle", [](const ReducedHypergraph & h, const std::string & pattern, std::uint64_t cap,
                                     bool count_all) {
        auto r = exhaustive_oracle(h, resolve_pattern(pattern), cap, count_all);
        return py::make_tuple(r.found, r.count);
    }, py::arg("host"), py::arg("pattern"), py::arg("cap") = default_oracle_cap, py::arg("count_all") = true);

    mod.def("find_fstar", [](const ReducedHypergraph & h, const std::string & eps, const std::string & delta, int rounds,
                              int m_star, int m) {
        auto r = find_fstar(h, pipeline_config(eps, delta, rounds, m_star, m, {}));
        py::dict out;
        out["ok"] = r.ok();
        failure_fields(out, r.failure);
        out["map"] = r.certificate ? py::object(map_to_dict(r.certificate->map)) : py::none();
        return out;
    }, py::arg("host"), py::arg("eps"), py::arg("delta"), py::arg("rounds") = 0, py::arg("m_star") = 0,
        py::arg("m") = 0);

    mod.def("find_glued", [](const ReducedHypergraph & h, const std::string & eps, const std::string & delta,
                              std::vector<int> ladder) {
        auto r = find_glued(h, pipeline_config(eps, delta, 0, 0, 0, std::move(ladder)));
        py::dict out;
        out["ok"] = r.ok();
        failure_fields(out, r.failure);
        if (r.configuration) {
            const auto & g = *r.configuration;
            out["indices"] = py::make_tuple(g.indices[0], g.indices[1], g.indices[2], g.indices[3]);
            py::dict v;
            v["a12"] = g.a12, v["a13"] = g.a13, v["a14"] = g.a14, v["a23"] = g.a23;
            v["a24"] = g.a24, v["a34"] = g.a34, v["a23p"] = g.a23p, v["a24p"] = g.a24p;
            out["vertices"] = v;
        }
        return out;
    }, py::arg("host"), py::arg("eps"), py::arg("delta"), py::arg("ladder") = std::vector<int>{});

    mod.def("brute_force_glued", [](const ReducedHypergraph & h, std::uint64_t cap, bool count_all) {
        auto r = brute_force_glued(h, cap, count_all);
        return py::make_tuple(r.found, r.count);
    }, py::arg("host"), py::arg("cap") = default_glue_oracle_cap, py::arg("count_all") = true);

    mod.def("random_box_dense", [](int m, int p, const std::string & d, std::uint64_t seed) {
        return random_box_dense(m, p, parse_rational(d), seed);
    }, py::arg("M"), py::arg("class_size"), py::arg("d"), py::arg("seed"));
    mod.def("orientation_reduced", &orientation_reduced, py::arg("M"));
    mod.def("reduced_blow_up", &reduced_blow_up, py::arg("host"), py::arg("t"));

    mod.def("cyclic_triple_3graph", [](int n, std::uint64_t seed) {
        return cyclic_triple_3graph(Tournament::random(n, seed)).edges();
    }, py::arg("n"), py::arg("seed"));

    mod.def("uniform_density_audit", [](int n, std::vector<std::array<int, 3>> edges, const std::string & d,
                                         const std::string & eta) {
        auto r = uniform_density_audit(Plain3Graph(n, std::move(edges)), parse_rational(d), parse_rational(eta));
        return py::make_tuple(to_string(r.outcome), r.witness);
    }, py::arg("n"), py::arg("edges"), py::arg("d"), py::arg("eta"));

    mod.def("count_copies", [](int n, std::vector<std::array<int, 3>> edges, const std::string & pattern) {
        auto c = count_copies(Plain3Graph(n, std::move(edges)), resolve_pattern(pattern));
        return py::make_tuple(c.labelled, c.unlabelled);
    }, py::arg("n"), py::arg("edges"), py::arg("pattern"));
}

#pragma once

#include <redhyper/hypercore.hpp>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace redhyper
{
    // Reduced hypergraph text format:
    //
    //   M <index_count>
    //   P <i> <j> <size>            one per pair, i < j
    //   E <i> <j> <k> <a> <b> <c>   one per edge, i < j < k, a in P^ij, b in P^ik, c in P^jk
    //
    // Triple-system text format (patterns and plain 3-graphs):
    //
    //   V <n>
    //   T <u> <v> <w>               vertices 1..n
    //
    // Blank lines and lines starting with '#' are ignored. Every other malformed or
    // out-of-range line raises ParseError with its line number.

    auto read_reduced_hypergraph(std::istream & in) -> ReducedHypergraph;
    auto load_reduced_hypergraph(const std::filesystem::path & path) -> ReducedHypergraph;

    /// Canonical form: M line, P lines sorted, E lines sorted.
    auto write_reduced_hypergraph(std::ostream & out, const ReducedHypergraph & h) -> void;
    auto save_reduced_hypergraph(const std::filesystem::path & path, const ReducedHypergraph & h) -> void;

    struct TripleSystem
    {
        int vertex_count = 0;
        std::vector<std::array<int, 3>> triples;
    };

    auto read_triple_system(std::istream & in) -> TripleSystem;
    auto write_triple_system(std::ostream & out, const TripleSystem & t) -> void;

    auto read_pattern(std::istream & in, std::string name = "") -> Pattern;
    auto load_pattern(const std::filesystem::path & path) -> Pattern;
    auto write_pattern(std::ostream & out, const Pattern & p) -> void;

    /// Catalog name, or else a pattern file path.
    auto resolve_pattern(const std::string & name_or_path) -> Pattern;

    auto read_file_bytes(const std::filesystem::path & path) -> std::string;
}

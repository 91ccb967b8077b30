#include <redhyper/errors.hpp>
#include <redhyper/io.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace redhyper
{
    namespace
    {
        struct Line
        {
            std::size_t number;
            std::string tag;
            std::vector<long long> fields;
        };

        /// Reads the next non-blank, non-comment line. Returns false at end of input.
        auto next_line(std::istream & in, std::size_t & line_no, Line & out) -> bool
        {
            std::string raw;
            while (std::getline(in, raw)) {
                ++line_no;
                auto first = raw.find_first_not_of(" \t\r");
                if (first == std::string::npos || raw[first] == '#')
                    continue;

                std::istringstream ss(raw);
                out = Line{line_no, {}, {}};
                ss >> out.tag;
                std::string token;
                while (ss >> token) {
                    long long value = 0;
                    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
                    if (ec != std::errc{} || ptr != token.data() + token.size())
                        throw ParseError(line_no, "expected an integer, got '" + token + "'");
                    out.fields.push_back(value);
                }
                return true;
            }
            return false;
        }

        auto expect_arity(const Line & line, std::size_t arity) -> void
        {
            if (line.fields.size() != arity)
                throw ParseError(line.number, "'" + line.tag + "' line takes " + std::to_string(arity) + " fields, got " +
                        std::to_string(line.fields.size()));
        }

        auto as_int(const Line & line, std::size_t which) -> int
        {
            auto v = line.fields[which];
            if (v < INT32_MIN || v > INT32_MAX)
                throw ParseError(line.number, "value out of range");
            return static_cast<int>(v);
        }
    }

    auto read_reduced_hypergraph(std::istream & in) -> ReducedHypergraph
    {
        std::size_t line_no = 0;
        Line line;
        if (! next_line(in, line_no, line))
            throw ParseError(line_no + 1, "empty input, expected 'M <index_count>'");
        if (line.tag != "M")
            throw ParseError(line.number, "first line must be 'M <index_count>'");
        expect_arity(line, 1);
        auto m = as_int(line, 0);
        if (m < 1)
            throw ParseError(line.number, "index count must be positive");

        ReducedHypergraphBuilder builder(m);
        std::vector<bool> seen_pair(static_cast<std::size_t>(m) * m, false);
        bool in_edges = false;

        while (next_line(in, line_no, line)) {
            try {
                if (line.tag == "P") {
                    expect_arity(line, 3);
                    if (in_edges)
                        throw ParseError(line.number, "P lines must precede E lines");
                    auto i = as_int(line, 0), j = as_int(line, 1), size = as_int(line, 2);
                    if (! (1 <= i && i < j && j <= m))
                        throw ParseError(line.number, "pair must satisfy 1 <= i < j <= M");
                    if (size < 1)
                        throw ParseError(line.number, "class size must be at least 1");
                    auto slot = static_cast<std::size_t>(i - 1) * m + (j - 1);
                    if (seen_pair[slot])
                        throw ParseError(line.number, "duplicate P line for pair");
                    seen_pair[slot] = true;
                    builder.set_class_size(i, j, size);
                }
                else if (line.tag == "E") {
                    expect_arity(line, 6);
                    in_edges = true;
                    auto i = as_int(line, 0), j = as_int(line, 1), k = as_int(line, 2);
                    if (! (1 <= i && i < j && j < k && k <= m))
                        throw ParseError(line.number, "triple must satisfy 1 <= i < j < k <= M");
                    if (builder.class_size(i, j) == 0 || builder.class_size(i, k) == 0 || builder.class_size(j, k) == 0)
                        throw ParseError(line.number, "edge refers to a pair without a P line");
                    builder.add_edge(i, j, k, as_int(line, 3), as_int(line, 4), as_int(line, 5));
                }
                else if (line.tag == "M")
                    throw ParseError(line.number, "repeated M line");
                else
                    throw ParseError(line.number, "unknown line tag '" + line.tag + "'");
            }
            catch (const DomainError & e) {
                throw ParseError(line.number, e.what());
            }
        }

        for (Index i = 1; i <= m; ++i)
            for (Index j = i + 1; j <= m; ++j)
                if (! seen_pair[static_cast<std::size_t>(i - 1) * m + (j - 1)])
                    throw ParseError(line_no + 1,
                        "missing P line for pair " + std::to_string(i) + " " + std::to_string(j));

        return builder.build();
    }

    auto load_reduced_hypergraph(const std::filesystem::path & path) -> ReducedHypergraph
    {
        std::ifstream in(path);
        if (! in)
            throw DomainError("cannot open " + path.string());
        return read_reduced_hypergraph(in);
    }

    auto write_reduced_hypergraph(std::ostream & out, const ReducedHypergraph & h) -> void
    {
        out << "M " << h.index_count() << '\n';
        for (const auto & p : h.pairs())
            out << "P " << p.lo << ' ' << p.hi << ' ' << h.class_size(p) << '\n';
        for (const auto & t : h.triples())
            for (auto [a, b, c] : h.constituent(t).edges())
                out << "E " << t.i << ' ' << t.j << ' ' << t.k << ' ' << a << ' ' << b << ' ' << c << '\n';
    }

    auto save_reduced_hypergraph(const std::filesystem::path & path, const ReducedHypergraph & h) -> void
    {
        std::ofstream out(path);
        if (! out)
            throw DomainError("cannot write " + path.string());
        write_reduced_hypergraph(out, h);
    }

    auto read_triple_system(std::istream & in) -> TripleSystem
    {
        std::size_t line_no = 0;
        Line line;
        if (! next_line(in, line_no, line))
            throw ParseError(line_no + 1, "empty input, expected 'V <n>'");
        if (line.tag != "V")
            throw ParseError(line.number, "first line must be 'V <n>'");
        expect_arity(line, 1);

        TripleSystem result;
        result.vertex_count = as_int(line, 0);
        if (result.vertex_count < 1)
            throw ParseError(line.number, "vertex count must be positive");

        std::set<std::array<int, 3>> seen;
        while (next_line(in, line_no, line)) {
            if (line.tag != "T")
                throw ParseError(line.number, "unknown line tag '" + line.tag + "'");
            expect_arity(line, 3);
            std::array<int, 3> t{as_int(line, 0), as_int(line, 1), as_int(line, 2)};
            for (auto v : t)
                if (v < 1 || v > result.vertex_count)
                    throw ParseError(line.number, "vertex out of range 1.." + std::to_string(result.vertex_count));
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2])
                throw ParseError(line.number, "triple needs three distinct vertices");
            if (! seen.insert(t).second)
                throw ParseError(line.number, "duplicate triple");
            result.triples.push_back(t);
        }
        return result;
    }

    auto write_triple_system(std::ostream & out, const TripleSystem & t) -> void
    {
        auto sorted = t.triples;
        for (auto & e : sorted)
            std::sort(e.begin(), e.end());
        std::sort(sorted.begin(), sorted.end());
        out << "V " << t.vertex_count << '\n';
        for (auto [u, v, w] : sorted)
            out << "T " << u << ' ' << v << ' ' << w << '\n';
    }

    auto read_pattern(std::istream & in, std::string name) -> Pattern
    {
        auto ts = read_triple_system(in);
        return Pattern{ts.vertex_count, std::move(ts.triples), std::move(name)};
    }

    auto load_pattern(const std::filesystem::path & path) -> Pattern
    {
        std::ifstream in(path);
        if (! in)
            throw DomainError("cannot open " + path.string());
        return read_pattern(in, path.stem().string());
    }

    auto write_pattern(std::ostream & out, const Pattern & p) -> void
    {
        write_triple_system(out, TripleSystem{p.vertex_count(), p.edges()});
    }

    auto resolve_pattern(const std::string & name_or_path) -> Pattern
    {
        if (is_catalog_name(name_or_path))
            return pattern_catalog(name_or_path);
        return load_pattern(name_or_path);
    }

    auto read_file_bytes(const std::filesystem::path & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        if (! in)
            throw DomainError("cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace redhyper::cli
{
    enum ExitCode : int
    {
        exit_success = 0,
        exit_negative = 1,
        exit_exhausted = 2,
        exit_input_error = 3,
        exit_internal_error = 4
    };

    /// 64-bit FNV-1a.
    auto fnv1a64(std::string_view bytes) -> std::uint64_t;

    /// Ordered `key=value` lines, plus verbatim certificate lines.
    class Report
    {
    public:
        auto add(std::string key, std::string value) -> void;
        auto raw(std::string line) -> void;
        auto write(std::ostream & out) const -> void;
        auto str() const -> std::string;

    private:
        std::vector<std::string> _lines;
    };

    /// Runs one subcommand. args excludes the program name. The report goes to `out` unless
    /// --report names a file; diagnostics go to `err`.
    auto dispatch(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int;
}

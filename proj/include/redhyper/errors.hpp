#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace redhyper
{
    /// Invalid argument or precondition (unknown triple, t = 0, bad config, ...).
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    /// Malformed input file. Carries the 1-based line number of the offending line.
    class ParseError : public std::runtime_error
    {
    public:
        ParseError(std::size_t line, const std::string & message) :
            std::runtime_error("line " + std::to_string(line) + ": " + message),
            _line(line)
        {
        }

        auto line() const -> std::size_t { return _line; }

    private:
        std::size_t _line;
    };

    /// An exhaustive enumerator refused to run because its search space exceeds the cap.
    class CapExceeded : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

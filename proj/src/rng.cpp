#include <redhyper/rng.hpp>

#include <numeric>
#include <unordered_map>

namespace redhyper
{
    auto Rng::sample(std::uint64_t universe, std::uint64_t count) -> std::vector<std::uint64_t>
    {
        // sparse Fisher-Yates: only displaced positions are materialised
        std::unordered_map<std::uint64_t, std::uint64_t> displaced;
        auto at = [&](std::uint64_t i) {
            auto it = displaced.find(i);
            return it == displaced.end() ? i : it->second;
        };

        std::vector<std::uint64_t> result;
        result.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            auto j = i + below(universe - i);
            auto vi = at(i), vj = at(j);
            displaced[j] = vi;
            displaced[i] = vj;
            result.push_back(vj);
        }
        return result;
    }
}

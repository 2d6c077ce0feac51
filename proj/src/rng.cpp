#include "frtcd/rng.hpp"

#include "frtcd/special_functions.hpp"

namespace frtcd {

std::uint64_t counter_rng::uniform_below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double counter_rng::normal() noexcept { return normal_quantile(uniform01()); }

}  // namespace frtcd

#include "progdet/rng.hpp"

#include <cmath>

namespace progdet {

double Rng::normal(double mean, double sigma) {
    // 1 - next_double() lies in (0, 1], so the log is finite
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    return mean + sigma * r * std::cos(two_pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    if (index == 0) return master;
    Rng mixer(master + index * 0x9e3779b97f4a7c15ull);
    return mixer.next_u64();
}

}  // namespace progdet

#ifndef LOOPFORMS_UTIL_HPP
#define LOOPFORMS_UTIL_HPP

#include <cstdint>
#include <cstdlib>
#include <string>

namespace loopforms {

/* splitmix64: tiny deterministic prng for seeded property subcommands. */
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next()
    {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /* uniform in [lo, hi] inclusive */
    int64_t range(int64_t lo, int64_t hi)
    {
        return lo + int64_t(next() % uint64_t(hi - lo + 1));
    }
};

/* LOOPFORMS_MAX_BASIS caps any single slot dimension (default 20000). */
inline long max_basis_cap()
{
    if (const char* s = std::getenv("LOOPFORMS_MAX_BASIS")) {
        long v = std::atol(s);
        if (v > 0)
            return v;
    }
    return 20000;
}

}  // namespace loopforms

#endif

// Deterministic randomness with counter-based stream splitting.
//
// Per-seed reproducibility is a hard contract (byte-identical CSVs), so all
// sampling goes through these helpers instead of implementation-defined
// std::*_distribution adapters. Streams are derived from a master seed and a
// path of tags, so independent purposes (codebook outer layer, inner layer,
// verification samples, ...) never share state.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace qbclab::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Hash a (seed, path...) tuple into a fresh stream seed.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = seed ^ 0xd1b54a32d192ed03ull;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t p : path) {
        s ^= p + 0x9e3779b97f4a7c15ull + (out << 6) + (out >> 2);
        out = splitmix64(s);
    }
    return out;
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform double in [0,1) with 53 random bits; fixed algorithm
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index in [0, n)
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal via Box-Muller (deterministic across platforms)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // sample an index from a cumulative-probability table (last entry ~ 1)
    std::size_t discrete(const std::vector<double>& cumulative) {
        double u = uniform();
        std::size_t lo = 0, hi = cumulative.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cumulative[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo < cumulative.size() ? lo : cumulative.size() - 1;
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline Stream stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Stream(derive(seed, path));
}

}  // namespace qbclab::rng

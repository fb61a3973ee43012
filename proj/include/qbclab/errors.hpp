// Exception taxonomy and the global composite-dimension cap.
//
// Every guarded failure in the library throws one of these types so callers
// (CLI, tests) can distinguish "your input is wrong" from "this computation
// would not fit".
#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qbclab {

// composite Hilbert-space dimension would exceed the configured cap
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// value violates a declared invariant (state, POVM, distribution, file)
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// incompatible operator or register dimensions
struct dimension_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// parameter outside its mathematical domain
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a guarded enumeration would exceed its size guard
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// decoder / code / net assembly failure
struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// net builder exhausted its budget; carries what was achieved
struct partial_net_error : construction_error {
    partial_net_error(const std::string& msg, double radius, std::size_t size)
        : construction_error(msg), achieved_radius(radius), net_size(size) {}
    double achieved_radius;
    std::size_t net_size;
};

// Composite-dimension cap. Default 4096; the environment variable
// QBCLAB_DIM_CAP overrides the default, set_dim_cap overrides both.
inline std::size_t& dim_cap_storage() {
    static std::size_t cap = [] {
        if (const char* env = std::getenv("QBCLAB_DIM_CAP")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        }
        return static_cast<std::size_t>(4096);
    }();
    return cap;
}

inline std::size_t dim_cap() { return dim_cap_storage(); }
inline void set_dim_cap(std::size_t cap) { dim_cap_storage() = cap; }

inline void check_dim(std::size_t requested, const char* where) {
    if (requested > dim_cap())
        throw capacity_error(std::string(where) + ": composite dimension " +
                             std::to_string(requested) + " exceeds cap " +
                             std::to_string(dim_cap()));
}

}  // namespace qbclab

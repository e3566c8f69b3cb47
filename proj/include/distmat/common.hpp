#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace distmat {

// Error taxonomy mirrored by the CLI exit codes:
// InvalidInput -> 2, CapExceeded -> 3, CheckFailed -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidInput : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct CheckFailed : Error {
    using Error::Error;
};

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stable seed derivation for independent sub-streams (bench cells, repeats).
inline uint64_t derive_seed(std::initializer_list<uint64_t> parts) {
    uint64_t state = 0x243f6a8885a308d3ull;
    for (uint64_t p : parts) {
        state ^= splitmix64(state) + p;
        (void)splitmix64(state);
    }
    return splitmix64(state);
}

// Deterministic random stream. The engine is the standardized mt19937_64;
// all value mappings are hand-rolled so draws are bit-identical across
// standard libraries (std::*_distribution is implementation-defined).
class RngStream {
public:
    explicit RngStream(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform on [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., n-1} via masked rejection (exactly uniform).
    size_t uniform_index(size_t n) {
        if (n == 0) throw InvalidInput("uniform_index: empty range");
        if (n == 1) return 0;
        uint64_t mask = ~0ull >> __builtin_clzll(n - 1);
        for (;;) {
            uint64_t v = next_u64() & mask;
            if (v < n) return static_cast<size_t>(v);
        }
    }

    // Standard normal via Box-Muller; the spare keeps consumption even.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Fisher-Yates; order of draws is part of the determinism contract.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Runs fn over [0,n) split into contiguous blocks, one per worker.
// Workers must write disjoint state; results are then independent of
// the thread count, which keeps parallel paths bit-reproducible.
inline void parallel_for(size_t n, int threads,
                         const std::function<void(size_t, size_t)>& fn) {
    if (n == 0) return;
    size_t nt = threads <= 1 ? 1 : std::min<size_t>(static_cast<size_t>(threads), n);
    if (nt == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    size_t chunk = (n + nt - 1) / nt;
    for (size_t t = 0; t < nt; ++t) {
        size_t lo = t * chunk;
        size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

inline int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace distmat

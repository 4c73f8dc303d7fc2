#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stor {

/// Raised on malformed configuration input; carries the path of the
/// offending key when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a numerical procedure cannot complete (singular system,
/// Cholesky failure after nugget escalation, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// FNV-1a over bytes; used to tie artifacts (scenario databases, policies)
/// to the configuration that produced them.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(s.data(), s.size(), h);
}

/// Hash scalars field by field; struct padding bytes are indeterminate and
/// must never reach the hash.
inline std::uint64_t fnv1a_values(std::initializer_list<double> vals,
                                  std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (const double v : vals) h = fnv1a(&v, sizeof(v), h);
    return h;
}

/// Fixed-partition deterministic parallel map: fn(i) for i in [0, n).
/// Results never depend on the thread count; fn must write only to slot i
/// of any shared output.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace stor

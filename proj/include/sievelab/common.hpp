#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace sievelab {

using cd = std::complex<double>;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact arithmetic left the supported integer range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain (pole, ramified modulus, zero divisor).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configured size budget (matrix columns, eigenvalue cache) would be exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Malformed input; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// splitmix64 finalizer; used to derive independent streams from one root seed.
constexpr u64 splitmix64(u64 x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr u64 hash_combine(u64 seed, u64 value) noexcept {
    return splitmix64(seed ^ splitmix64(value));
}

inline u64 derive_seed(u64 root, std::string_view stream) noexcept {
    u64 h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hash_combine(root, h);
}

/// Uniform double in [0,1) from a hashed key.
constexpr double unit_interval(u64 key) noexcept {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

/// Worker count: SIEVELAB_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SIEVELAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, n) over a static partition. Exceptions from workers
/// are rethrown on the calling thread (first one wins).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned workers = 0) {
    if (workers == 0) workers = worker_count();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace sievelab

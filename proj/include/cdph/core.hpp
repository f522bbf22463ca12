#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdph {

using Point = std::vector<double>;

// Error taxonomy. Every error carries a process exit class so the CLI can
// map failures to distinct exit codes (2 config, 3 degenerate, 4 resource,
// 5 io).
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_class) : std::runtime_error(std::move(msg)), exit_class_(exit_class) {}
    int exit_class() const { return exit_class_; }

private:
    int exit_class_;
};

struct InvalidShape : Error {
    explicit InvalidShape(const std::string& m) : Error("invalid shape: " + m, 2) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& m) : Error("dimension mismatch: " + m, 2) {}
};
struct BasisMismatch : Error {
    explicit BasisMismatch(const std::string& m) : Error("basis mismatch: " + m, 2) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config error: " + m, 2) {}
};
struct DegenerateSampleSet : Error {
    explicit DegenerateSampleSet(const std::string& m) : Error("degenerate sample set: " + m, 3) {}
};
struct ResourceLimit : Error {
    explicit ResourceLimit(const std::string& m) : Error("resource limit: " + m, 4) {}
};
struct Overflow : Error {
    explicit Overflow(const std::string& m) : Error("overflow: " + m, 4) {}
};
struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& m) : Error("out of domain: " + m, 2) {}
};
struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& m) : Error("non-finite value: " + m, 2) {}
};
struct InvalidFiltration : Error {
    explicit InvalidFiltration(const std::string& m) : Error("invalid filtration: " + m, 2) {}
};
struct InsufficientIntervals : Error {
    explicit InsufficientIntervals(const std::string& m) : Error("insufficient intervals: " + m, 2) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error("parse error: " + m, 5) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io error: " + m, 5) {}
};

/**
 * Seedable 64-bit PRNG (mt19937_64) with hand-rolled double distributions.
 *
 * std::uniform_real_distribution and friends are implementation-defined, so
 * reproducible experiments generate doubles directly from the raw 64-bit
 * stream: identical seed => bit-identical samples.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): top 53 bits of the stream.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::size_t uniform_index(std::size_t n) {
        // Rejection-free modulo is fine here: n is tiny relative to 2^64.
        return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
    }

    // Standard normal via the Marsaglia polar method (sqrt/log only, no
    // trigonometry; keeps the stream deterministic per platform libm).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double normal(double sigma) { return sigma * normal(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline bool inside_box(const Point& p) {
    for (double c : p)
        if (c < -1.0 || c > 1.0) return false;
    return true;
}

}  // namespace cdph

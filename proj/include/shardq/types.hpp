#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace shardq {

using cxd = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Bit order convention used everywhere: qubit 0 is the LEFTMOST character of a
// bitstring, and amplitude index i carries qubit 0 as its most significant bit.
inline std::size_t index_of_bits(const std::string& bits) {
    std::size_t idx = 0;
    for (char c : bits) idx = (idx << 1) | static_cast<std::size_t>(c - '0');
    return idx;
}

inline std::string bits_of_index(std::size_t idx, int num_bits) {
    std::string s(static_cast<std::size_t>(num_bits), '0');
    for (int b = 0; b < num_bits; ++b)
        if (idx >> (num_bits - 1 - b) & 1u) s[static_cast<std::size_t>(b)] = '1';
    return s;
}

// Deterministic 64-bit generator; all randomness in the library flows through
// this so results are identical across platforms and thread schedules.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        // splitmix64
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t bound = (~0ULL / n) * n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= bound);
        return x % n;
    }

    double next_gaussian() {
        double u1 = next_double(), u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    std::uint64_t state_;
};

// Stable per-job seed derivation from a root seed and a label.
inline std::uint64_t derive_seed(std::uint64_t root, const std::string& label) {
    std::uint64_t h = 1469598103934665603ULL ^ root;
    for (char c : label) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace shardq

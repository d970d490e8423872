// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstdint>
#include <vector>

#include "linktheory/matrix.hpp"
#include "linktheory/rational.hpp"

namespace lks {

// Deterministic splitmix64 stream. Verification suites derive one stream per
// trial via trial_seed(base, index), so any failing trial can be replayed in
// isolation from just (base seed, trial index).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Desk-scale n, so modulo bias is irrelevant here; what
    // matters is cross-platform determinism, which std distributions lack.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    long range(long lo, long hi) {  // inclusive ends
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    // Signed rational with small numerator/denominator, canonical form.
    Rational rational(long num_max = 6, long den_max = 6) {
        return rat(range(-num_max, num_max), range(1, den_max));
    }

    Rational nonneg_rational(long num_max = 6, long den_max = 6) {
        return rat(range(0, num_max), range(1, den_max));
    }

    Rational positive_rational(long num_max = 6, long den_max = 6) {
        return rat(range(1, num_max), range(1, den_max));
    }

    // Nonnegative vector summing to 1.
    Vec distribution(std::size_t n) {
        Vec v(n);
        Rational t = 0;
        for (auto& x : v) {
            x = nonneg_rational(5, 4);
            t += x;
        }
        if (is_zero(t)) {
            v[below(n)] = 1;
            return v;
        }
        for (auto& x : v) x /= t;
        return v;
    }

    // Strictly inside (-1, 1), suitable as a boost velocity.
    Rational velocity(long den_max = 9) {
        long den = range(2, den_max);
        return rat(range(-(den - 1), den - 1), den);
    }

    Vec signed_vector(std::size_t n, long num_max = 5, long den_max = 4) {
        Vec v(n);
        for (auto& x : v) x = rational(num_max, den_max);
        return v;
    }

    // Column-stochastic matrix: entries >= 0, every column sums to 1.
    Mat stochastic(std::size_t n) {
        Mat m(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            Vec col = distribution(n);
            for (std::size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
        }
        return m;
    }

    // Causal transformation: signed entries, all column sums equal.
    Mat causal(std::size_t n) {
        Mat m(n, n);
        Rational s = rational(3, 2);
        for (std::size_t j = 0; j < n; ++j) {
            Rational acc = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                m.at(i, j) = rational(4, 3);
                acc += m.at(i, j);
            }
            m.at(n - 1, j) = s - acc;
        }
        return m;
    }

    // Rational point on the unit circle from a Pythagorean triple:
    // (m^2-k^2, 2mk, m^2+k^2) gives a^2 + b^2 = 1 exactly.
    std::pair<Rational, Rational> unit_pair() {
        long m = range(2, 9);
        long k = range(1, m - 1);
        Rational h = rat(m * m + k * k);
        Rational a = rat(m * m - k * k) / h;
        Rational b = rat(2 * m * k) / h;
        if (coin()) a = -a;
        if (coin()) b = -b;
        return {a, b};
    }

    // Real-orthogonal matrix built from plane rotations with rational unit
    // pairs, signed flips, and index swaps; every factor is orthogonal, so
    // the product is too, and all entries stay rational.
    Mat orthogonal(std::size_t n) {
        Mat m = Mat::identity(n);
        std::size_t moves = 2 + below(4);
        for (std::size_t step = 0; step < moves; ++step) {
            switch (below(3)) {
                case 0: {
                    if (n < 2) break;
                    std::size_t i = below(n), j = below(n);
                    if (i == j) j = (j + 1) % n;
                    auto [a, b] = unit_pair();
                    Mat g = Mat::identity(n);
                    g.at(i, i) = a;
                    g.at(j, j) = a;
                    g.at(i, j) = -b;
                    g.at(j, i) = b;
                    m = g * m;
                    break;
                }
                case 1: {
                    std::size_t i = below(n);
                    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = -m.at(i, j);
                    break;
                }
                default: {
                    if (n < 2) break;
                    std::size_t i = below(n), j = below(n);
                    if (i == j) break;
                    for (std::size_t c = 0; c < n; ++c) std::swap(m.at(i, c), m.at(j, c));
                    break;
                }
            }
        }
        return m;
    }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Per-trial seed so suites are deterministic and trials replayable.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial_index) {
    return mix64(base ^ mix64(trial_index + 0x9E3779B97F4A7C15ull));
}

}  // namespace lks

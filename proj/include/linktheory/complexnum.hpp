// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

#include "linktheory/link.hpp"
#include "linktheory/matrix.hpp"
#include "linktheory/process.hpp"

namespace lks {

// Complex weight a+bi held as a pair of rationals, with the 2x2 real matrix
// view [[a, b], [-b, a]]. The view makes complex arithmetic a special case of
// real matrix arithmetic.
struct ComplexWeight {
    Rational a = 0;  // real part
    Rational b = 0;  // imaginary part

    Mat matrix() const { return Mat::from_rows({{a, b}, {-b, a}}); }

    bool operator==(const ComplexWeight& o) const { return a == o.a && b == o.b; }
};

inline bool is_unit(const ComplexWeight& c) { return c.a * c.a + c.b * c.b == Rational(1); }

inline ComplexWeight complex_from_matrix(const Mat& m) {
    if (m.rows() != 2 || m.cols() != 2 || m.at(0, 0) != m.at(1, 1) || m.at(0, 1) != -m.at(1, 0))
        fail(ErrorKind::NotComplexShaped, "matrix does not satisfy the complex skew constraints");
    return {m.at(0, 0), m.at(0, 1)};
}

// Joint two-variable encoding of a complex weight: indices run over {1,2} in
// the matrix view and are stored zero-based, so w(j=0,k=0) = w(j=1,k=1) = a
// and w(j=0,k=1) = -w(j=1,k=0) = b.
inline Process complex_to_joint(const ComplexWeight& c, const std::string& j_id = "j",
                                const std::string& k_id = "k") {
    return make_process({{j_id, 2}, {k_id, 2}}, {c.a, c.b, -c.b, c.a});
}

inline ComplexWeight joint_to_complex(const Process& w) {
    if (w.vars().size() != 2 || w.vars()[0].range != 2 || w.vars()[1].range != 2)
        fail(ErrorKind::NotComplexShaped, "joint must hold two binary variables");
    if (w.weight(0) != w.weight(3) || w.weight(2) != -w.weight(1))
        fail(ErrorKind::NotComplexShaped, "joint violates the complex skew constraints");
    return {w.weight(0), w.weight(1)};
}

// Product route (i): multiply the 2x2 matrix views.
inline ComplexWeight complex_product_via_matrix(const ComplexWeight& c, const ComplexWeight& c2) {
    return complex_from_matrix(c.matrix() * c2.matrix());
}

// Product route (ii): encode both factors as joint processes, link the first
// factor's second index to the second factor's first index, and sum the
// contracted index away.
inline ComplexWeight complex_product_via_link(const ComplexWeight& c, const ComplexWeight& c2) {
    Process joined = link(product(complex_to_joint(c, "j", "k"), complex_to_joint(c2, "j2", "k2")),
                          "k", "j2");
    return joint_to_complex(marginal(joined, {"j", "k2"}));
}

inline ComplexWeight complex_product(const ComplexWeight& c, const ComplexWeight& c2) {
    ComplexWeight by_link = complex_product_via_link(c, c2);
    assert(by_link == complex_product_via_matrix(c, c2));
    return by_link;
}

// A coin toss with signed weights: p on HEADS (value 0), q on TAILS (value 1).
struct CoinProcess {
    Rational p = 0;
    Rational q = 0;

    Rational velocity() const {
        if (is_zero(p + q)) fail(ErrorKind::SingularBoost, "coin has zero total weight");
        return (p - q) / (p + q);
    }

    Process process(const std::string& id) const { return scalar_process(id, {p, q}); }
};

inline CoinProcess coin_from_velocity(const Rational& v) {
    return {(Rational(1) + v) / 2, (Rational(1) - v) / 2};
}

// Relativistic velocity addition u = (v + v2) / (1 + v v2).
inline Rational boost_compose(const Rational& v, const Rational& v2) {
    Rational den = Rational(1) + v * v2;
    if (is_zero(den)) fail(ErrorKind::SingularBoost, "opposite light-speed velocities");
    return (v + v2) / den;
}

// The same sum obtained by linking the outcome variables of two coins with
// the given velocities and reading the velocity of the merged coin.
inline Rational boost_via_coins(const Rational& v, const Rational& v2) {
    Process merged = link(product(coin_from_velocity(v).process("x"),
                                  coin_from_velocity(v2).process("y")),
                          "x", "y");
    return CoinProcess{merged.weight(0), merged.weight(1)}.velocity();
}

// A matrix of complex weights, held as the pair of real and imaginary parts.
struct ComplexMat {
    Mat re;
    Mat im;

    ComplexMat() = default;
    ComplexMat(Mat real_part, Mat imag_part) : re(std::move(real_part)), im(std::move(imag_part)) {
        if (re.rows() != im.rows() || re.cols() != im.cols())
            fail(ErrorKind::DimMismatch, "real and imaginary parts differ in shape");
    }
    explicit ComplexMat(Mat real_part)
        : re(std::move(real_part)), im(Mat(re.rows(), re.cols())) {}
};

inline ComplexMat complex_scale(const ComplexWeight& s, const ComplexMat& m) {
    return {m.re * s.a - m.im * s.b, m.im * s.a + m.re * s.b};
}

// Doubles every dimension, replacing each complex entry by its 2x2 view. The
// map is a ring homomorphism, so embeddings of unitary complex matrices are
// orthogonal and can drive real quantum chains directly.
inline Mat embed_complex_matrix(const ComplexMat& m) {
    const std::size_t r = m.re.rows(), c = m.re.cols();
    Mat out(2 * r, 2 * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            out.at(2 * i, 2 * j) = m.re.at(i, j);
            out.at(2 * i, 2 * j + 1) = m.im.at(i, j);
            out.at(2 * i + 1, 2 * j) = -m.im.at(i, j);
            out.at(2 * i + 1, 2 * j + 1) = m.re.at(i, j);
        }
    return out;
}

// Complex vector as interleaved (real, imaginary) coordinates; the Euclidean
// square of the embedding equals the complex modulus-square sum.
inline Vec embed_complex_vector(const Vec& re, const Vec& im) {
    if (re.size() != im.size()) fail(ErrorKind::DimMismatch, "vector parts differ in length");
    Vec out(2 * re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        out[2 * i] = re[i];
        out[2 * i + 1] = im[i];
    }
    return out;
}

// Value map collapsing each embedded complex dimension to one class: the
// partial probe that reads which complex basis state without resolving the
// internal phase plane.
inline std::vector<long> embedded_block_map(std::size_t complex_dim) {
    std::vector<long> f(2 * complex_dim);
    for (std::size_t i = 0; i < complex_dim; ++i) f[2 * i] = f[2 * i + 1] = static_cast<long>(i);
    return f;
}

}  // namespace lks

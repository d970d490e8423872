// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "linktheory/error.hpp"
#include "linktheory/matrix.hpp"
#include "linktheory/process.hpp"

namespace lks {

// Joint weight matrix of a linked (or linkable) pair. Convention: the first
// variable x of the link indexes columns, the second variable y rows, so
// entries.at(y_value, x_value) = weight(x = x_value & y = y_value) and the
// trace is weight(x = y). Kept unnormalized; with signed weights the trace
// can legitimately be 0.
struct LinkState {
    Mat entries;

    explicit LinkState(Mat m) : entries(std::move(m)) {
        if (!entries.square()) fail(ErrorKind::DimMismatch, "link state must be square");
    }

    std::size_t dim() const { return entries.rows(); }
    Rational trace() const { return entries.trace(); }

    const Rational& at(std::size_t y, std::size_t x) const { return entries.at(y, x); }

    bool operator==(const LinkState& o) const { return entries == o.entries; }
    bool operator!=(const LinkState& o) const { return !(*this == o); }
};

// The state with column factor x_factor and row factor y_factor:
// entries(y, x) = x_factor[x] * y_factor[y]. This is exactly the link state
// of a product of independent variables with those weight vectors.
inline LinkState pure_state(const Vec& x_factor, const Vec& y_factor) {
    if (x_factor.size() != y_factor.size())
        fail(ErrorKind::DimMismatch, "pure state factors must have equal length");
    Mat m(y_factor.size(), x_factor.size());
    for (std::size_t y = 0; y < y_factor.size(); ++y)
        for (std::size_t x = 0; x < x_factor.size(); ++x) m.at(y, x) = x_factor[x] * y_factor[y];
    return LinkState(m);
}

inline LinkState diagonal_state(const Vec& diag) {
    Mat m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m.at(i, i) = diag[i];
    return LinkState(m);
}

// Diagonal projection: a 0/1 bit per value.
struct Projection {
    std::vector<int> bits;

    static Projection identity(std::size_t n) { return {std::vector<int>(n, 1)}; }
    static Projection null(std::size_t n) { return {std::vector<int>(n, 0)}; }
    static Projection single(std::size_t n, std::size_t k) {
        Projection p{std::vector<int>(n, 0)};
        p.bits[k] = 1;
        return p;
    }

    std::size_t dim() const { return bits.size(); }

    Mat matrix() const {
        Mat m(bits.size(), bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) m.at(i, i) = bits[i];
        return m;
    }

    // The event "x lands in the projected subset".
    Event event_on(const std::string& var) const {
        Event e = Event::never();
        for (std::size_t k = 0; k < bits.size(); ++k)
            if (bits[k]) e = e || Event::atom(var, static_cast<long>(k));
        return e;
    }
};

// Generalized Born rule: p = tr(PS)/tr(S).
inline Rational born(const Projection& p, const LinkState& s) {
    if (p.dim() != s.dim()) fail(ErrorKind::DimMismatch, "projection/state dimension mismatch");
    Rational tr = s.trace();
    if (is_zero(tr)) fail(ErrorKind::NullNormalizer, "born rule on trace-0 state");
    Rational num = 0;
    for (std::size_t i = 0; i < p.dim(); ++i)
        if (p.bits[i]) num += s.at(i, i);
    return num / tr;
}

struct StateClass {
    bool pure = false;
    bool causal = false;
    bool quantum = false;
    bool white = false;
    bool sharp = false;
    Rational white_scale = 0;  // the c in S = c * identity, when white
};

// pure: rank <= 1, decided by exact vanishing of every 2x2 minor.
// causal: pure with uniform row factor, i.e. all rows equal (the state of a
//   link whose second variable is white).
// quantum: symmetric. white: positive multiple of the identity.
// sharp: exactly one nonzero entry.
inline StateClass classify_state(const LinkState& s) {
    const Mat& m = s.entries;
    std::size_t n = s.dim();
    StateClass c;

    c.pure = true;
    for (std::size_t i = 0; i + 1 < n && c.pure; ++i)
        for (std::size_t j = i + 1; j < n && c.pure; ++j)
            for (std::size_t a = 0; a + 1 < n && c.pure; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (m.at(i, a) * m.at(j, b) != m.at(i, b) * m.at(j, a)) {
                        c.pure = false;
                        break;
                    }

    bool rows_equal = true;
    for (std::size_t i = 1; i < n && rows_equal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m.at(i, j) != m.at(0, j)) {
                rows_equal = false;
                break;
            }
    c.causal = c.pure && rows_equal;

    c.quantum = is_symmetric(m);

    c.white = n > 0;
    for (std::size_t i = 0; i < n && c.white; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j ? !is_zero(m.at(i, j)) : m.at(i, i) != m.at(0, 0)) {
                c.white = false;
                break;
            }
    if (c.white && sgn(m.at(0, 0)) > 0)
        c.white_scale = m.at(0, 0);
    else
        c.white = false;

    int nonzero = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!is_zero(m.at(i, j))) ++nonzero;
    c.sharp = nonzero == 1;

    return c;
}

}  // namespace lks

// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linktheory/link.hpp"
#include "linktheory/matrix.hpp"
#include "linktheory/process.hpp"
#include "linktheory/state.hpp"

namespace lks {

// A transformation is the matrix view of a two-variable component: rows index
// the after-variable, columns the before-variable. The normalizer is a scalar
// kept to the side so that compositions stay exact without eager division; the
// acting table is normalizer * matrix.
struct Transformation {
    Mat matrix;
    Rational normalizer = 1;

    Mat effective() const { return matrix * normalizer; }
    bool operator==(const Transformation& o) const {
        return matrix == o.matrix && normalizer == o.normalizer;
    }
    bool operator!=(const Transformation& o) const { return !(*this == o); }
};

using StateVector = Vec;

inline bool is_causal_matrix(const Mat& m) {
    if (!m.square() || m.rows() == 0) return false;
    Vec sums = m.column_sums();
    for (std::size_t j = 1; j < sums.size(); ++j)
        if (sums[j] != sums[0]) return false;
    return true;
}

inline bool is_markov_matrix(const Mat& m) {
    if (!m.square() || m.rows() == 0) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (is_negative(m.at(i, j))) return false;
    Vec sums = m.column_sums();
    for (const Rational& s : sums)
        if (s != Rational(1)) return false;
    return true;
}

inline bool is_causal(const Transformation& t) { return is_causal_matrix(t.matrix); }
inline bool is_markov_transition(const Transformation& t) { return is_markov_matrix(t.matrix); }
inline bool is_unitary_transformation(const Transformation& t) { return is_unitary(t.matrix); }

// Joint chain table on variables prefix0..prefixL with weight
// v[i0] * prod_t gens[t][i_{t+1}, i_t]. No stochasticity is assumed; callers
// validate. Generators may differ per stage.
inline Process chain_table(const std::vector<Mat>& gens, const Vec& v,
                           const std::string& prefix = "x") {
    const std::size_t n = v.size();
    if (n == 0) fail(ErrorKind::InvalidInitial, "empty initial vector");
    for (const Mat& g : gens)
        if (!g.square() || g.rows() != n)
            fail(ErrorKind::DimMismatch, "generator shape does not match initial vector");
    const std::size_t len = gens.size() + 1;
    std::vector<VariableDescriptor> vars;
    vars.reserve(len);
    for (std::size_t t = 0; t < len; ++t)
        vars.push_back({prefix + std::to_string(t), static_cast<long>(n)});

    std::size_t cases = 1;
    for (std::size_t t = 0; t < len; ++t) {
        if (cases > kMaxJointCases / n) fail(ErrorKind::DimensionCap, "chain table too large");
        cases *= n;
    }
    std::vector<Rational> weights(cases);
    std::vector<std::size_t> idx(len, 0);
    for (std::size_t c = 0; c < cases; ++c) {
        Rational w = v[idx[0]];
        for (std::size_t t = 0; t + 1 < len; ++t) w *= gens[t].at(idx[t + 1], idx[t]);
        weights[c] = w;
        for (std::size_t t = len; t-- > 0;) {
            if (++idx[t] < n) break;
            idx[t] = 0;
        }
    }
    return make_process(vars, weights);
}

namespace detail {

inline void validate_markov_inputs(const Mat& g, const Vec& v) {
    if (!g.square() || g.rows() == 0)
        fail(ErrorKind::InvalidGenerator, "generator must be square and nonempty");
    if (!is_markov_matrix(g))
        fail(ErrorKind::InvalidGenerator, "generator columns must be nonnegative and sum to 1");
    if (v.size() != g.rows()) fail(ErrorKind::InvalidInitial, "initial vector length mismatch");
    Rational s = 0;
    for (const Rational& e : v) {
        if (is_negative(e)) fail(ErrorKind::InvalidInitial, "initial vector has negative entries");
        s += e;
    }
    if (s != Rational(1)) fail(ErrorKind::InvalidInitial, "initial vector must sum to 1");
}

// Two-variable component process on (in_id, out_id) whose matrix view is
// scale * g: weight(in = j, out = i) = scale * g[i][j].
inline Process transition_component(const Mat& g, const Rational& scale,
                                    const std::string& in_id, const std::string& out_id) {
    const std::size_t n = g.rows();
    std::vector<Rational> w(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) w[j * n + i] = scale * g.at(i, j);
    return make_process({{in_id, static_cast<long>(n)}, {out_id, static_cast<long>(n)}}, w);
}

}  // namespace detail

inline Process markov_chain(const Mat& g, const Vec& v, std::size_t steps) {
    detail::validate_markov_inputs(g, v);
    return chain_table(std::vector<Mat>(steps, g), v, "x");
}

// The same chain as a proper link system: an initial component V followed by
// one two-variable component per step, each carrying the joint table (1/n)G,
// output linked to the next input. Folding it reproduces the markov_chain
// table up to the accumulated 1/n^steps scale.
inline LinkSystem causal_link_chain(const Mat& g, const Vec& v, std::size_t steps) {
    detail::validate_markov_inputs(g, v);
    const std::size_t n = g.rows();
    Rational scale = Rational(1) / Rational(static_cast<long>(n));
    LinkSystem sys;
    sys.components.push_back({"V", scalar_process("x0", v)});
    for (std::size_t t = 1; t <= steps; ++t) {
        std::string in_id = "x" + std::to_string(t - 1) + "i";
        std::string out_id = "x" + std::to_string(t);
        sys.components.push_back(
            {"C" + std::to_string(t), detail::transition_component(g, scale, in_id, out_id)});
        sys.links.push_back({LinkEnd("x" + std::to_string(t - 1)), LinkEnd(in_id)});
    }
    return sys;
}

// Composing transformations T then U yields the matrix product U*T with one
// factor of the dimension n deferred into the normalizer.
inline Transformation transformation_product(const Transformation& t, const Transformation& u) {
    if (!t.matrix.square() || !u.matrix.square() || t.matrix.rows() != u.matrix.rows())
        fail(ErrorKind::DimMismatch, "transformation product shape");
    Rational n(static_cast<long>(t.matrix.rows()));
    return {u.matrix * t.matrix, t.normalizer * u.normalizer * n};
}

// Strong form of the dynamical rule: S' = T S T^-1. The normalizer cancels in
// the conjugation, so only the matrix is used.
inline LinkState evolve_state(const LinkState& s, const Transformation& t) {
    if (!t.matrix.square() || t.matrix.rows() != s.dim())
        fail(ErrorKind::DimMismatch, "transformation does not match state dimension");
    std::optional<Mat> inv = t.matrix.inverse();
    if (!inv) fail(ErrorKind::SingularT, "transformation matrix is singular");
    return LinkState(t.matrix * s.entries * *inv);
}

// Relation form, valid for singular T as well: S' T = T S.
inline bool satisfies_dynamical_rule(const LinkState& before, const LinkState& after,
                                     const Transformation& t) {
    if (!t.matrix.square() || t.matrix.rows() != before.dim() || after.dim() != before.dim())
        fail(ErrorKind::DimMismatch, "transformation does not match state dimension");
    return after.entries * t.matrix == t.matrix * before.entries;
}

inline Mat differential_column_check(const Mat& h) {
    if (!h.square() || h.rows() == 0) fail(ErrorKind::BadH, "H must be square and nonempty");
    for (const Rational& s : h.column_sums())
        if (!is_zero(s)) fail(ErrorKind::BadH, "H columns must sum to 0");
    return Mat::identity(h.rows());
}

inline Transformation differential_generator(const Mat& h, const Rational& dt) {
    Mat one = differential_column_check(h);
    return {one + h * dt, 1};
}

inline Transformation inverse_generator(const Mat& h, const Rational& dt) {
    Mat one = differential_column_check(h);
    return {one - h * dt, 1};
}

// A parallel pair of identical chains with per-stage orthogonal generators.
// Prepared: both rails start from the same initial vector and the two final
// variables are linked. Unprepared: no initial components; the rails are
// closed into a loop by linking the two head inputs as well. Kept as a link
// system so that the state across any stage boundary can be read off.
struct PreparedChain {
    std::vector<Mat> generators;
    Vec initial;  // empty when unprepared
    bool prepared = true;
    std::size_t steps = 0;
    std::size_t dim = 0;
    LinkSystem system;
    Process folded;

    const Process& process() const { return folded; }

    // State of the link crossing the stage-t boundary, with every other link
    // applied. t ranges over 0..steps; steps names the final fold.
    LinkState stage_state(std::size_t t) const {
        if (t > steps) fail(ErrorKind::StageOutOfRange, "stage exceeds chain length");
        std::string first, second;
        if (t == steps) {
            first = "a" + std::to_string(steps);
            second = "b" + std::to_string(steps);
        } else if (t == 0 && !prepared) {
            first = "a0i";
            second = "b0i";
        } else {
            first = "a" + std::to_string(t);
            second = "a" + std::to_string(t) + "i";
        }
        LinkSystem partial = system;
        std::erase_if(partial.links, [&](const Link& l) {
            return l.first.members == std::vector<std::string>{first} &&
                   l.second.members == std::vector<std::string>{second};
        });
        return link_state(apply_links(partial), first, second);
    }
};

inline PreparedChain make_prepared_chain(std::vector<Mat> gens, Vec v) {
    if (gens.empty()) fail(ErrorKind::InvalidGenerator, "chain needs at least one step");
    const std::size_t n = gens[0].rows();
    for (const Mat& g : gens) {
        if (!g.square() || g.rows() != n) fail(ErrorKind::DimMismatch, "generator shapes differ");
        if (!is_unitary(g)) fail(ErrorKind::NotUnitary, "generator is not orthogonal");
    }
    bool prepared = !v.empty();
    if (prepared) {
        if (v.size() != n) fail(ErrorKind::InvalidInitial, "initial vector length mismatch");
        bool nonzero = false;
        for (const Rational& e : v) nonzero = nonzero || !is_zero(e);
        if (!nonzero) fail(ErrorKind::InvalidInitial, "initial vector is zero");
    }

    PreparedChain chain;
    chain.generators = std::move(gens);
    chain.initial = std::move(v);
    chain.prepared = prepared;
    chain.steps = chain.generators.size();
    chain.dim = n;

    auto add_rail = [&](const std::string& rail) {
        if (prepared)
            chain.system.components.push_back(
                {"V" + rail, scalar_process(rail + "0", chain.initial)});
        for (std::size_t t = 1; t <= chain.steps; ++t) {
            std::string in_id = rail + std::to_string(t - 1) + "i";
            std::string out_id = rail + std::to_string(t);
            chain.system.components.push_back(
                {"C" + rail + std::to_string(t),
                 detail::transition_component(chain.generators[t - 1], 1, in_id, out_id)});
            if (t > 1 || prepared)
                chain.system.links.push_back(
                    {LinkEnd(rail + std::to_string(t - 1)), LinkEnd(in_id)});
        }
    };
    add_rail("a");
    add_rail("b");
    std::string last = std::to_string(chain.steps);
    chain.system.links.push_back({LinkEnd("a" + last), LinkEnd("b" + last)});
    if (!prepared) chain.system.links.push_back({LinkEnd("a0i"), LinkEnd("b0i")});
    chain.folded = apply_links(chain.system);
    return chain;
}

inline Process quantum_prepared_chain(const Mat& g, const Vec& v, std::size_t steps) {
    return make_prepared_chain(std::vector<Mat>(steps, g), v).folded;
}

// Chain with independent boundary vectors at both ends: a forward segment of
// l1 steps of g1 followed by l2 steps of g2, with the final weight w applied
// to the last variable.
inline Process double_boundary_chain(const Mat& g1, const Mat& g2, const Vec& v, const Vec& w,
                                     std::size_t l1, std::size_t l2) {
    const std::size_t n = v.size();
    if (n == 0 || w.size() != n) fail(ErrorKind::DimMismatch, "boundary vector lengths differ");
    if (!g1.square() || g1.rows() != n || (l2 > 0 && (!g2.square() || g2.rows() != n)))
        fail(ErrorKind::DimMismatch, "generator shape does not match boundary vectors");
    std::vector<Mat> gens;
    gens.insert(gens.end(), l1, g1);
    gens.insert(gens.end(), l2, g2);
    Process base = chain_table(gens, v, "x");
    Process out = base;
    const std::size_t len = l1 + l2;
    for (std::size_t c = 0; c < out.case_count(); ++c) {
        long last = out.value_at(c, len);
        out.mutable_weight(c) = base.weight(c) * w[static_cast<std::size_t>(last)];
    }
    return out;
}

enum class ChainKind { markov, inverse, double_boundary, quantum_prepared };

struct ChainSpec {
    Mat generator;
    Vec initial;
    std::optional<Vec> final_vec;       // double_boundary only
    std::optional<Mat> second_generator;  // double_boundary only
    std::size_t steps = 1;
    std::size_t second_steps = 0;  // double_boundary only
    ChainKind kind = ChainKind::markov;
};

inline Process run_chain(const ChainSpec& spec) {
    if (spec.steps == 0) fail(ErrorKind::InvalidGenerator, "chain needs at least one step");
    switch (spec.kind) {
        case ChainKind::markov:
            return markov_chain(spec.generator, spec.initial, spec.steps);
        case ChainKind::inverse: {
            // Runs the time-reversed chain: the supplied generator is
            // inverted exactly; entries may go negative.
            std::optional<Mat> inv = spec.generator.inverse();
            if (!inv) fail(ErrorKind::SingularT, "generator is singular");
            return chain_table(std::vector<Mat>(spec.steps, *inv), spec.initial, "x");
        }
        case ChainKind::quantum_prepared:
            return quantum_prepared_chain(spec.generator, spec.initial, spec.steps);
        case ChainKind::double_boundary: {
            if (!spec.final_vec || !spec.second_generator)
                fail(ErrorKind::DimMismatch, "double boundary chain needs both boundaries");
            return double_boundary_chain(spec.generator, *spec.second_generator, spec.initial,
                                         *spec.final_vec, spec.steps, spec.second_steps);
        }
    }
    fail(ErrorKind::InvalidGenerator, "unknown chain kind");
}

}  // namespace lks

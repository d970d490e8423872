// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktheory/chain.hpp"
#include "linktheory/complexnum.hpp"
#include "linktheory/error.hpp"
#include "linktheory/link.hpp"
#include "linktheory/matrix.hpp"
#include "linktheory/measurement.hpp"
#include "linktheory/process.hpp"
#include "linktheory/rng.hpp"
#include "linktheory/standard.hpp"
#include "linktheory/state.hpp"

namespace lks {

// One failing trial, replayable in isolation from (base seed, trial index).
struct SuiteWitness {
    std::size_t trial = 0;
    std::string detail;

    bool operator==(const SuiteWitness& o) const {
        return trial == o.trial && detail == o.detail;
    }
};

// Outcome of one verification suite. Trials that cannot exercise the law
// under test (e.g. a trace-0 state) are skipped and counted, never passed.
struct SuiteReport {
    std::string suite;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0;
    std::vector<SuiteWitness> witnesses;  // first few failures only

    bool ok() const { return failures == 0; }

    bool operator==(const SuiteReport& o) const {
        return suite == o.suite && trials == o.trials && failures == o.failures &&
               skipped == o.skipped && witnesses == o.witnesses;
    }
};

namespace verify_detail {

struct TrialFail {
    std::string detail;
};
struct TrialSkip {
    std::string reason;
};

inline void check(bool ok, const std::string& detail) {
    if (!ok) throw TrialFail{detail};
}

[[noreturn]] inline void skip(const std::string& reason) { throw TrialSkip{reason}; }

// Per-suite range ceiling. dims_max = 0 keeps the suite default; a positive
// value lowers it (never below 2, never above the suite's safe bound).
inline long cap(long suite_hi, long dims_max) {
    if (dims_max <= 0) return suite_hi;
    return std::min(suite_hi, std::max<long>(2, dims_max));
}

inline std::string rat_str(const Rational& q) { return to_string(q); }

inline Vec nonzero_signed_vector(Rng& rng, std::size_t n) {
    for (;;) {
        Vec v = rng.signed_vector(n);
        for (const Rational& e : v)
            if (!is_zero(e)) return v;
    }
}

template <typename E>
bool throws_kind(ErrorKind kind, E&& expr) {
    try {
        expr();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

// ---------------------------------------------------------------------------
// born: probability in the linked process vs tr(PS)/tr(S) on the link state.
inline void suite_born(Rng& rng, long dims_max, bool) {
    long var_count = rng.range(2, 4);
    long shared = rng.range(2, cap(4, dims_max));
    std::size_t px = rng.below(static_cast<std::uint64_t>(var_count));
    std::size_t py = rng.below(static_cast<std::uint64_t>(var_count - 1));
    if (py >= px) ++py;

    std::vector<VariableDescriptor> vars;
    std::size_t cases = 1;
    for (long i = 0; i < var_count; ++i) {
        long range = (static_cast<std::size_t>(i) == px || static_cast<std::size_t>(i) == py)
                         ? shared
                         : rng.range(2, cap(4, dims_max));
        vars.push_back({"v" + std::to_string(i), range});
        cases *= static_cast<std::size_t>(range);
    }
    std::vector<Rational> weights = rng.signed_vector(cases);
    bool force_null = rng.below(6) == 0;
    Process w = make_process(vars, weights);
    const std::string x_id = vars[px].id;
    const std::string y_id = vars[py].id;

    if (force_null) {
        // Cancel the diagonal exactly so the trace-0 contract is exercised.
        Rational tr = link_state(w, x_id, y_id).trace();
        for (std::size_t c = 0; c < w.case_count(); ++c) {
            std::vector<long> vals = w.unflatten(c);
            if (vals[px] == vals[py]) {
                weights[c] -= tr;
                break;
            }
        }
        w = make_process(vars, std::move(weights));
    }

    LinkState s = link_state(w, x_id, y_id);
    Projection p = Projection::identity(static_cast<std::size_t>(shared));
    for (std::size_t k = 0; k < p.bits.size(); ++k) p.bits[k] = rng.coin() ? 1 : 0;

    if (is_zero(s.trace())) {
        check(throws_kind(ErrorKind::NullNormalizer, [&] { born(p, s); }),
              "born accepted a trace-0 state");
        Process linked = link(w, x_id, y_id);
        check(throws_kind(ErrorKind::NullNormalizer,
                          [&] { probability(linked, p.event_on(x_id)); }),
              "probability accepted a total-0 linked process");
        skip("trace-0 state");
    }

    Process linked = link(w, x_id, y_id);
    Rational via_state = born(p, s);
    Rational via_table = probability(linked, p.event_on(x_id));
    check(via_state == via_table,
          "born " + rat_str(via_state) + " vs probability " + rat_str(via_table));
}

// ---------------------------------------------------------------------------
// disconnect: causal_cut succeeds exactly on separating, zero-free variables,
// and relinking the two factors restores the original table verbatim.
inline void suite_disconnect(Rng& rng, long dims_max, bool) {
    long na = rng.range(2, cap(3, dims_max));
    long nx = rng.range(2, cap(4, dims_max));
    long nb = rng.range(2, cap(3, dims_max));
    std::vector<VariableDescriptor> vars{{"a", na}, {"x", nx}, {"b", nb}};
    std::size_t cases = static_cast<std::size_t>(na * nx * nb);
    std::vector<Rational> weights(cases);

    bool separable = rng.below(8) != 0;
    if (separable) {
        Mat f(static_cast<std::size_t>(na), static_cast<std::size_t>(nx));
        Mat g(static_cast<std::size_t>(nx), static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < f.rows(); ++i)
            for (std::size_t j = 0; j < f.cols(); ++j) f.at(i, j) = rng.rational(4, 3);
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) g.at(i, j) = rng.rational(4, 3);
        if (rng.below(8) == 0) {
            // Dead value of x: the cut must refuse with ZeroMarginal.
            std::size_t dead = rng.below(static_cast<std::uint64_t>(nx));
            for (std::size_t i = 0; i < f.rows(); ++i) f.at(i, dead) = 0;
        }
        std::size_t c = 0;
        for (long a = 0; a < na; ++a)
            for (long x = 0; x < nx; ++x)
                for (long b = 0; b < nb; ++b)
                    weights[c++] = f.at(static_cast<std::size_t>(a), static_cast<std::size_t>(x)) *
                                   g.at(static_cast<std::size_t>(x), static_cast<std::size_t>(b));
    } else {
        weights = rng.signed_vector(cases);
    }
    Process w = make_process(vars, std::move(weights));

    Process xm = marginal(w, {"x"});
    bool zero = false;
    for (std::size_t k = 0; k < xm.case_count(); ++k) zero = zero || is_zero(xm.weight(k));
    bool sep = separates(w, "a", "x", "b");
    if (separable) check(sep, "constructed separable table failed separates");

    if (zero) {
        check(throws_kind(ErrorKind::ZeroMarginal, [&] { causal_cut(w, "x"); }),
              "cut accepted a zero-marginal variable");
        skip("zero x-marginal");
    }
    if (!sep) {
        check(throws_kind(ErrorKind::NotSeparable, [&] { causal_cut(w, "x"); }),
              "cut accepted a non-separating variable");
        return;
    }
    auto [cut, fresh] = causal_cut(w, "x");
    Process relinked = link(cut, "x", fresh);
    check(relinked == w, "cut-then-link did not restore the table");
}

// ---------------------------------------------------------------------------
// white-connection: linking x against an independent unit-white y leaves the
// joint distribution of x's component untouched.
inline void suite_white_connection(Rng& rng, long dims_max, bool) {
    long n = rng.range(2, cap(4, dims_max));
    long ra = rng.range(2, 3);
    Process a = make_process({{"a", ra}, {"x", n}},
                             rng.signed_vector(static_cast<std::size_t>(ra * n)));
    Process y = white_process("y", n);
    bool with_b = rng.coin();
    Process w = product(a, y);
    Process without_y = a;
    if (with_b) {
        long rb = rng.range(2, 3);
        Process b = make_process({{"b", rb}}, rng.signed_vector(static_cast<std::size_t>(rb)));
        w = product(w, b);
        without_y = product(a, b);
    }

    LinkState s = link_state(w, "x", "y");
    check(classify_state(s).causal, "state against an independent white is not causal");

    Process left = marginal(link(w, "x", "y"), {"a", "x"});
    Process right = marginal(without_y, {"a", "x"});
    check(left == right, "white link changed the component marginal");
}

// ---------------------------------------------------------------------------
// chain-equiv: the folded causal link chain reproduces the markov_chain table
// after removing the accumulated 1/n normalizers, and every link is pure
// causal with state trace exactly 1/n.
inline void suite_chain_equiv(Rng& rng, long dims_max, bool) {
    long n = rng.range(2, cap(5, dims_max));
    std::size_t steps = static_cast<std::size_t>(rng.range(1, 6));
    Mat g = rng.stochastic(static_cast<std::size_t>(n));
    Vec v = rng.distribution(static_cast<std::size_t>(n));

    Process table = markov_chain(g, v, steps);
    LinkSystem sys = causal_link_chain(g, v, steps);
    Process folded = apply_links(sys);

    Rational scale = 1;
    for (std::size_t t = 0; t < steps; ++t) scale *= Rational(n);
    std::vector<Rational> scaled = folded.weights();
    for (Rational& e : scaled) e *= scale;
    check(make_process(folded.vars(), std::move(scaled)) == table,
          "folded chain table != markov table");

    Rational inv_n = Rational(1) / Rational(n);
    for (const auto& comp : sys.components)
        check(comp.process.total() == 1, "component " + comp.name + " total != 1");
    for (std::size_t t = 1; t <= steps; ++t) {
        const Link& l = sys.links[t - 1];
        Process pair = product(sys.components[t - 1].process, sys.components[t].process);
        // Column variable of (1/n)G is white at scale 1/n.
        Process in_marg = marginal(sys.components[t].process, l.second.members);
        for (std::size_t k = 0; k < in_marg.case_count(); ++k)
            check(in_marg.weight(k) == inv_n, "component input is not white at 1/n");
        LinkState s = link_state(pair, l.first, l.second);
        check(classify_state(s).causal, "chain link state is not pure causal");
        check(s.trace() == inv_n,
              "link state trace " + rat_str(s.trace()) + " != " + rat_str(inv_n));
    }
}

// ---------------------------------------------------------------------------
// dynamical: states extracted across the input and output links of a causal
// component in a closed loop are UT and TU; they satisfy S'T = TS, and
// S' = TST^-1 whenever T is invertible.
inline void suite_dynamical(Rng& rng, long dims_max, bool) {
    std::size_t n = static_cast<std::size_t>(rng.range(2, cap(4, dims_max)));
    Mat tm = rng.causal(n);
    Mat um(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) um.at(i, j) = rng.rational(4, 3);

    Process tc = detail::transition_component(tm, 1, "xp", "y");
    Process uc = detail::transition_component(um, 1, "yp", "x");
    Process joint = product(tc, uc);
    Transformation t{tm, 1};

    LinkState before = link_state(link(joint, "y", "yp"), "xp", "x");
    LinkState after = link_state(link(joint, "x", "xp"), "yp", "y");
    check(before.entries == um * tm, "before-state != UT");
    check(after.entries == tm * um, "after-state != TU");
    check(satisfies_dynamical_rule(before, after, t), "S'T != TS");

    if (tm.inverse().has_value()) {
        LinkState evolved = evolve_state(before, t);
        check(evolved == after, "TST^-1 != extracted after-state");
        check(evolved.trace() == before.trace(), "conjugation changed the trace");
    } else {
        check(throws_kind(ErrorKind::SingularT, [&] { evolve_state(before, t); }),
              "evolve_state accepted a singular transformation");
    }
}

// ---------------------------------------------------------------------------
// quantum-square: complete-probe record weights on a prepared chain are the
// squared entries of the plainly iterated vector G_{t-1}..G_0 v.
inline void suite_quantum_square(Rng& rng, long dims_max, bool first) {
    if (first) {
        Mat g = Mat::from_rows({{rat(3, 5), rat(-4, 5)}, {rat(4, 5), rat(3, 5)}});
        PreparedChain chain = make_prepared_chain({g}, {rat(1), rat(0)});
        Process rec = probe(chain, {complete_probe(1)});
        check(probability(rec, Event::atom("r1", 0)) == rat(9, 25),
              "fixed example: p(r1=0) != 9/25");
        check(probability(rec, Event::atom("r1", 1)) == rat(16, 25),
              "fixed example: p(r1=1) != 16/25");
    }

    std::size_t n = static_cast<std::size_t>(rng.range(2, cap(3, dims_max)));
    std::size_t steps = static_cast<std::size_t>(rng.range(1, 3));
    std::vector<Mat> gens;
    for (std::size_t t = 0; t < steps; ++t) gens.push_back(rng.orthogonal(n));
    Vec v = nonzero_signed_vector(rng, n);
    PreparedChain chain = make_prepared_chain(gens, v);

    std::size_t stage = static_cast<std::size_t>(rng.range(0, static_cast<long>(steps)));
    Process rec = probe(chain, {complete_probe(stage)});

    // Oracle: iterate the vector by plain matrix application.
    Vec u = v;
    for (std::size_t s = 0; s < stage; ++s) u = gens[s] * u;
    Rational norm = 0;
    for (const Rational& e : u) norm += e * e;
    check(!is_zero(norm), "oracle vector lost its norm");

    std::string rid = "r" + std::to_string(stage);
    for (std::size_t k = 0; k < n; ++k) {
        Rational p = probability(rec, Event::atom(rid, static_cast<long>(k)));
        Rational want = u[k] * u[k] / norm;
        check(p == want, "record " + std::to_string(k) + ": " + rat_str(p) + " != square " +
                             rat_str(want));
    }
}

// ---------------------------------------------------------------------------
// product: totals multiply, blocks stay independent and recoverable, prime
// factorization returns exactly the constructed blocks, and marginal /
// condition / separates behave as measure-theory demands.
inline void suite_product(Rng& rng, long dims_max, bool) {
    long blocks = rng.range(2, 3);
    std::vector<Process> parts;
    std::vector<std::vector<std::string>> part_ids;
    std::vector<std::string> pair_first, pair_second;

    for (long i = 0; i < blocks; ++i) {
        std::string tag = std::to_string(i);
        if (rng.coin()) {
            long r = rng.range(2, cap(4, dims_max));
            Vec w(static_cast<std::size_t>(r));
            for (Rational& e : w) e = rng.positive_rational(5, 4);
            parts.push_back(scalar_process("p" + tag, w));
            part_ids.push_back({"p" + tag});
        } else {
            long r = rng.range(2, cap(4, dims_max));
            std::vector<Rational> w(static_cast<std::size_t>(r * r), Rational(0));
            for (long k = 0; k < r; ++k)
                w[static_cast<std::size_t>(k * r + k)] = rng.positive_rational(5, 4);
            parts.push_back(make_process({{"p" + tag, r}, {"q" + tag, r}}, std::move(w)));
            part_ids.push_back({"p" + tag, "q" + tag});
            if (pair_first.empty()) {
                pair_first = {"p" + tag};
                pair_second = {"q" + tag};
            }
        }
    }

    Process w = parts[0];
    Rational tot = parts[0].total();
    for (long i = 1; i < blocks; ++i) {
        w = product(w, parts[static_cast<std::size_t>(i)]);
        tot *= parts[static_cast<std::size_t>(i)].total();
    }
    check(w.total() == tot, "product total is not the product of totals");
    check(is_independent(w, part_ids), "product blocks are not independent");

    for (long i = 0; i < blocks; ++i) {
        const Process& part = parts[static_cast<std::size_t>(i)];
        Rational others = tot / part.total();
        std::vector<Rational> scaled = part.weights();
        for (Rational& e : scaled) e *= others;
        check(marginal(w, part_ids[static_cast<std::size_t>(i)]) ==
                  make_process(part.vars(), std::move(scaled)),
              "block marginal does not recover the factor");
    }

    auto canon = [](std::vector<std::vector<std::string>> parts_in) {
        for (auto& p : parts_in) std::sort(p.begin(), p.end());
        std::sort(parts_in.begin(), parts_in.end());
        return parts_in;
    };
    check(canon(prime_factorize(w)) == canon(part_ids),
          "prime factorization differs from the constructed blocks");

    // total is marginal-invariant; conditioning commutes with marginals that
    // keep the event's variables.
    std::vector<std::string> subset = part_ids[0];
    Rational c_total = marginal(w, subset).total();
    check(c_total == w.total(), "marginal changed the total");
    Event e = Event::atom(subset[0], rng.range(0, w.range_of(subset[0]) - 1));
    check(marginal(condition(w, e), subset) == condition(marginal(w, subset), e),
          "condition and marginal do not commute");

    // separates is invariant under global rescaling.
    Rational scale = 0;
    while (is_zero(scale)) scale = rng.rational(5, 3);
    std::vector<Rational> scaled_w = w.weights();
    for (Rational& x : scaled_w) x *= scale;
    Process ws = make_process(w.vars(), std::move(scaled_w));

    std::vector<std::string> third =
        blocks == 3 ? part_ids[2] : std::vector<std::string>{};
    check(separates(w, part_ids[0], part_ids[1], third), "blocks fail to separate");
    check(separates(ws, part_ids[0], part_ids[1], third), "separation is not scale-invariant");

    if (!pair_first.empty()) {
        std::vector<std::string> rest;
        for (const auto& v : w.vars())
            if (v.id != pair_first[0] && v.id != pair_second[0]) rest.push_back(v.id);
        bool split = separates(w, pair_first, rest, pair_second);
        check(!split, "perfectly correlated pair reported separable");
        check(separates(ws, pair_first, rest, pair_second) == split,
              "negative separation is not scale-invariant");
    }
}

// ---------------------------------------------------------------------------
// propriety: on a proper three-component system every link application order
// folds to the same table, and matches the naive product-then-link route.
inline void suite_propriety(Rng& rng, long dims_max, bool) {
    long n1 = rng.range(2, cap(3, dims_max));
    long n2 = rng.range(2, cap(3, dims_max));
    long n3 = rng.range(2, cap(3, dims_max));
    auto table = [&](long r0, long r1, const std::string& i0, const std::string& i1) {
        return make_process({{i0, r0}, {i1, r1}},
                            rng.signed_vector(static_cast<std::size_t>(r0 * r1)));
    };
    Process a = table(n3, n1, "a0", "a1");
    Process b = table(n1, n2, "b0", "b1");
    Process c = table(n2, n3, "c0", "c1");

    LinkSystem sys;
    sys.components = {{"A", a}, {"B", b}, {"C", c}};
    sys.links = {{LinkEnd("a1"), LinkEnd("b0")}, {LinkEnd("b1"), LinkEnd("c0")}};
    if (rng.coin()) sys.links.push_back({LinkEnd("c1"), LinkEnd("a0")});
    validate_proper(sys);

    Process base = apply_links(sys);
    std::vector<std::size_t> order(sys.links.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    do {
        LinkSystem permuted = sys;
        permuted.links.clear();
        for (std::size_t i : order) permuted.links.push_back(sys.links[i]);
        check(apply_links(permuted) == base, "link order changed the folded table");
    } while (std::next_permutation(order.begin(), order.end()));

    Process joint = product(product(a, b), c);
    for (const Link& l : sys.links) joint = link(joint, l.first, l.second);
    check(joint == base, "naive product-then-link route differs from the fold");
}

// ---------------------------------------------------------------------------
// boost: the velocity-addition formula agrees with merging the two coin
// processes by a link, and obeys the commutative group laws.
inline void suite_boost(Rng& rng, long, bool first) {
    if (first) {
        check(boost_compose(rat(1, 2), rat(1, 2)) == rat(4, 5), "1/2 (+) 1/2 != 4/5");
        check(boost_via_coins(rat(1, 2), rat(1, 2)) == rat(4, 5), "coin route: != 4/5");
    }
    Rational v1 = rng.velocity();
    Rational v2 = rng.velocity();
    Rational v3 = rng.velocity();

    Rational formula = boost_compose(v1, v2);
    Rational coins = boost_via_coins(v1, v2);
    check(formula == coins,
          "formula " + rat_str(formula) + " vs coin link " + rat_str(coins));
    check(boost_compose(v2, v1) == formula, "composition is not commutative");
    check(boost_compose(boost_compose(v1, v2), v3) == boost_compose(v1, boost_compose(v2, v3)),
          "composition is not associative");
    check(boost_compose(v1, -v1) == 0, "v (+) -v != 0");
    check(boost_compose(v1, Rational(0)) == v1, "0 is not neutral");
    check(coin_from_velocity(v1).velocity() == v1, "coin round trip changed the velocity");
}

// ---------------------------------------------------------------------------
// complex: multiplication via the two-variable link agrees with the 2x2
// matrix product, and the joint encoding round-trips.
inline void suite_complex(Rng& rng, long, bool first) {
    if (first) {
        ComplexWeight i{0, 1};
        ComplexWeight minus_one{-1, 0};
        check(complex_product_via_matrix(i, i) == minus_one, "matrix route: i^2 != -1");
        check(complex_product_via_link(i, i) == minus_one, "link route: i^2 != -1");
    }
    ComplexWeight c1{rng.rational(), rng.rational()};
    ComplexWeight c2{rng.rational(), rng.rational()};
    ComplexWeight c3{rng.rational(), rng.rational()};

    ComplexWeight via_link = complex_product_via_link(c1, c2);
    ComplexWeight via_matrix = complex_product_via_matrix(c1, c2);
    check(via_link == via_matrix, "link and matrix products disagree");
    check(complex_product_via_link(c2, c1) == via_link, "product is not commutative");
    check(complex_product(complex_product(c1, c2), c3) ==
              complex_product(c1, complex_product(c2, c3)),
          "product is not associative");
    check(joint_to_complex(complex_to_joint(c1)) == c1, "joint encoding round trip failed");
}

// ---------------------------------------------------------------------------
// measurement-oracle: record tables from probed prepared chains match the
// textbook collapse simulator exactly. Record sequences are markov whenever
// no partial probe sits between two others; an interior partial probe leaves
// within-class coherence behind, which genuinely carries extra memory.
inline void suite_measurement_oracle(Rng& rng, long dims_max, bool) {
    std::size_t n = static_cast<std::size_t>(rng.range(2, cap(3, dims_max)));
    std::size_t steps = static_cast<std::size_t>(rng.range(2, 3));
    std::vector<Mat> gens;
    for (std::size_t t = 0; t < steps; ++t) gens.push_back(rng.orthogonal(n));
    Vec v = nonzero_signed_vector(rng, n);

    std::size_t count = static_cast<std::size_t>(rng.range(1, 3));
    std::set<std::size_t> stages;
    while (stages.size() < count)
        stages.insert(rng.below(static_cast<std::uint64_t>(steps + 1)));
    bool with_partial = rng.below(3) != 0;
    std::size_t partial_at = with_partial ? rng.below(count) : count;

    std::vector<Probe> probes;
    std::vector<std::string> rids;
    std::size_t j = 0;
    for (std::size_t stage : stages) {
        if (j == partial_at) {
            long classes = rng.range(1, static_cast<long>(n));
            std::vector<long> map(n);
            for (std::size_t i = 0; i < n; ++i) map[i] = static_cast<long>(i) % classes;
            for (std::size_t i = n; i > 1; --i)
                std::swap(map[i - 1], map[rng.below(i)]);
            // The shuffle keeps every class label present.
            probes.push_back(partial_probe(stage, map));
        } else {
            probes.push_back(complete_probe(stage));
        }
        rids.push_back("r" + std::to_string(stage));
        ++j;
    }

    PreparedChain chain = make_prepared_chain(gens, v);
    Process records = marginal(probe(chain, probes), rids);
    Process standard = standard_records(gens, v, probes);

    Rational tot = records.total();
    check(!is_zero(tot), "probed records have zero total");
    std::vector<Rational> normalized = records.weights();
    for (Rational& e : normalized) e /= tot;
    check(make_process(records.vars(), std::move(normalized)) == standard,
          "records differ from the standard collapse simulator");

    bool interior_partial =
        with_partial && count >= 3 && partial_at > 0 && partial_at + 1 < count;
    if (!interior_partial)
        check(markov_check(records, rids), "records are not markov in stage order");
}

// ---------------------------------------------------------------------------
// fig5: the double-measurement table carries negative weights (fixed example:
// -144/625) while the unprobed (x,z) marginal is perfectly correlated and the
// probed record table is nonnegative and diagonal.
inline void suite_fig5(Rng& rng, long dims_max, bool first) {
    if (first) {
        Mat g = Mat::from_rows({{rat(3, 5), rat(-4, 5)}, {rat(4, 5), rat(3, 5)}});
        Vec v{rat(3, 5), rat(4, 5)};
        Fig5Report rep = paradox_fig5(g, v);
        check(rep.negative_case.has_value(), "fixed example lost its negative case");
        check(*rep.negative_case == std::vector<long>{0, 0, 1}, "negative case moved");
        check(rep.negative_weight == rat(-144, 625),
              "negative weight " + rat_str(rep.negative_weight) + " != -144/625");
    }

    std::size_t n = static_cast<std::size_t>(rng.range(2, cap(3, dims_max)));
    Mat g = rng.orthogonal(n);
    Vec v;
    for (;;) {
        v = rng.signed_vector(n);
        bool zero = true;
        for (const Rational& e : v) zero = zero && is_zero(e);
        if (!zero && !is_sharp(v)) break;
    }

    Fig5Report rep = paradox_fig5(g, v);
    check(rep.conditionally_independent, "x and z are not independent given y");

    Process xz = marginal(rep.table, {"x", "z"});
    for (std::size_t c = 0; c < xz.case_count(); ++c) {
        std::vector<long> vals = xz.unflatten(c);
        Rational want = vals[0] == vals[1] ? v[static_cast<std::size_t>(vals[0])] *
                                                 v[static_cast<std::size_t>(vals[0])]
                                           : Rational(0);
        check(xz.weight(c) == want, "unprobed (x,z) marginal is not diag(v^2)");
    }

    // Probed there-and-back version: records are nonnegative and agree.
    PreparedChain chain = make_prepared_chain({g, g.transpose()}, v);
    Process rec = marginal(probe(chain, {complete_probe(0), complete_probe(2)}),
                           {"r0", "r2"});
    for (std::size_t c = 0; c < rec.case_count(); ++c) {
        std::vector<long> vals = rec.unflatten(c);
        Rational want = vals[0] == vals[1] ? v[static_cast<std::size_t>(vals[0])] *
                                                 v[static_cast<std::size_t>(vals[0])]
                                           : Rational(0);
        check(!is_negative(rec.weight(c)), "probed record weight is negative");
        check(rec.weight(c) == want, "probed records are not diag(v^2)");
    }
    check(probability(rec, Event::equal("r0", "r2")) == 1, "records disagree between probes");
}

using SuiteFn = void (*)(Rng&, long, bool);

inline const std::map<std::string, SuiteFn>& suite_registry() {
    static const std::map<std::string, SuiteFn> registry = {
        {"born", suite_born},
        {"disconnect", suite_disconnect},
        {"white-connection", suite_white_connection},
        {"chain-equiv", suite_chain_equiv},
        {"dynamical", suite_dynamical},
        {"quantum-square", suite_quantum_square},
        {"product", suite_product},
        {"propriety", suite_propriety},
        {"boost", suite_boost},
        {"complex", suite_complex},
        {"measurement-oracle", suite_measurement_oracle},
        {"fig5", suite_fig5},
    };
    return registry;
}

}  // namespace verify_detail

inline std::vector<std::string> verify_suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : verify_detail::suite_registry()) names.push_back(name);
    return names;
}

// Runs `trials` independent trials of the named suite. Trial t draws all of
// its randomness from trial_seed(seed, t), so reports are reproducible and a
// failing trial can be replayed alone. Fixed worked examples are checked as
// part of trial 0.
inline SuiteReport run_verify_suite(const std::string& name, std::size_t trials,
                                    std::uint64_t seed, long dims_max = 0) {
    const auto& registry = verify_detail::suite_registry();
    auto it = registry.find(name);
    if (it == registry.end())
        fail(ErrorKind::ParseError, "unknown verification suite: " + name);

    SuiteReport report;
    report.suite = name;
    report.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(trial_seed(seed, t));
        try {
            it->second(rng, dims_max, t == 0);
        } catch (const verify_detail::TrialSkip&) {
            ++report.skipped;
        } catch (const verify_detail::TrialFail& f) {
            ++report.failures;
            if (report.witnesses.size() < 8) report.witnesses.push_back({t, f.detail});
        } catch (const Error& e) {
            ++report.failures;
            if (report.witnesses.size() < 8)
                report.witnesses.push_back({t, std::string("unexpected error: ") + e.what()});
        }
    }
    return report;
}

}  // namespace lks

// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktheory/chain.hpp"
#include "linktheory/link.hpp"
#include "linktheory/process.hpp"
#include "linktheory/state.hpp"

namespace lks {

struct TickedVariable {
    std::string id;
    long tick = 0;
};

// A process viewed as a laboratory object: some variables are inputs the
// experimenter sets, the rest are outputs read off, each placed at a time
// tick.
struct LabObjectView {
    Process process;
    std::vector<TickedVariable> inputs;
    std::vector<TickedVariable> outputs;
};

struct LabReport {
    bool controllable = true;
    bool causal = true;
    bool observable = true;
    std::string notes;

    bool all() const { return controllable && causal && observable; }
};

// Checks the three laboratory-object axioms: the joint input marginal is
// uniform, outputs up to t are independent of inputs from t on given the
// inputs before t, and the joint output marginal is nonnegative.
inline LabReport check_lab_object(const LabObjectView& view) {
    LabReport report;
    auto note = [&](const std::string& s) {
        if (!report.notes.empty()) report.notes += "; ";
        report.notes += s;
    };

    if (!view.inputs.empty()) {
        std::vector<std::string> ids;
        for (const auto& v : view.inputs) ids.push_back(v.id);
        const Vec w = marginal(view.process, ids).weights();
        for (const Rational& x : w)
            if (x != w[0]) {
                report.controllable = false;
                note("input marginal is not uniform");
                break;
            }
    }

    std::set<long> ticks;
    for (const auto& v : view.inputs) ticks.insert(v.tick);
    for (const auto& v : view.outputs) ticks.insert(v.tick);
    for (long t : ticks) {
        std::vector<std::string> before_out, before_in, later_in;
        for (const auto& v : view.outputs)
            if (v.tick <= t) before_out.push_back(v.id);
        for (const auto& v : view.inputs)
            (v.tick < t ? before_in : later_in).push_back(v.id);
        if (before_out.empty() || later_in.empty()) continue;
        if (!separates(view.process, before_out, before_in, later_in)) {
            report.causal = false;
            note("output at tick " + std::to_string(t) + " depends on later input");
            break;
        }
    }

    if (!view.outputs.empty()) {
        std::vector<std::string> ids;
        for (const auto& v : view.outputs) ids.push_back(v.id);
        const Vec w = marginal(view.process, ids).weights();
        for (const Rational& x : w)
            if (is_negative(x)) {
                report.observable = false;
                note("output marginal has a negative weight");
                break;
            }
    }
    return report;
}

enum class ProbeMode { complete, partial };

// A probe at a chain stage. Complete probes measure the stage variable
// itself; partial probes measure value_map(x), which groups values into
// classes.
struct Probe {
    std::size_t stage = 0;
    ProbeMode mode = ProbeMode::complete;
    std::vector<long> value_map;  // partial only: stage value -> class label
};

inline Probe complete_probe(std::size_t stage) { return {stage, ProbeMode::complete, {}}; }
inline Probe partial_probe(std::size_t stage, std::vector<long> value_map) {
    return {stage, ProbeMode::partial, std::move(value_map)};
}

struct ProbePlan {
    PreparedChain chain;
    std::vector<Probe> probes;
};

namespace detail {

inline long probe_classes(const std::vector<long>& value_map) {
    long m = 0;
    for (long v : value_map) m = std::max(m, v + 1);
    return m;
}

inline void validate_probe(const Probe& p, const PreparedChain& chain) {
    if (p.stage > chain.steps) fail(ErrorKind::StageOutOfRange, "probe stage exceeds chain length");
    if (p.mode == ProbeMode::partial) {
        if (p.value_map.size() != chain.dim)
            fail(ErrorKind::RangeMismatch, "value map must cover the stage range");
        for (long v : p.value_map)
            if (v < 0) fail(ErrorKind::RangeMismatch, "value map labels must be nonnegative");
    }
}

// condition keeping only cases where both variables fall in the same class
inline Event same_class_event(const std::string& a, const std::string& b,
                              const std::vector<long>& value_map) {
    Event e = Event::never();
    for (long k = 0; k < probe_classes(value_map); ++k) {
        Event ea = Event::never();
        Event eb = Event::never();
        for (std::size_t v = 0; v < value_map.size(); ++v)
            if (value_map[v] == k) {
                ea = ea || Event::atom(a, static_cast<long>(v));
                eb = eb || Event::atom(b, static_cast<long>(v));
            }
        e = e || (ea && eb);
    }
    return e;
}

// append a fresh variable whose value copies f(src) with weight carried over
inline Process append_record(const Process& w, const std::string& src, const std::string& rid,
                             const std::vector<long>& value_map, long range) {
    std::size_t src_pos = w.index_of(src);
    std::vector<VariableDescriptor> vars = w.vars();
    vars.push_back({rid, range});
    std::vector<Rational> weights;
    weights.reserve(w.case_count() * static_cast<std::size_t>(range));
    for (std::size_t c = 0; c < w.case_count(); ++c) {
        long label = value_map[static_cast<std::size_t>(w.value_at(c, src_pos))];
        for (long k = 0; k < range; ++k)
            weights.push_back(k == label ? w.weight(c) : Rational(0));
    }
    return make_process(vars, weights);
}

inline std::vector<long> identity_map(std::size_t n) {
    std::vector<long> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<long>(i);
    return f;
}

// The stage-0 boundary of an unprepared chain has no output variable; its
// rail head is the input a0i, already identified with b0i by the loop link.
inline std::string stage_variable(const PreparedChain& chain, std::size_t t) {
    if (t == 0 && !chain.prepared) return "a0i";
    return "a" + std::to_string(t);
}

inline std::string stage_partner(const PreparedChain& chain, std::size_t t) {
    if (t == 0 && !chain.prepared) return "b0i";
    return "b" + std::to_string(t);
}

inline bool stage_already_joined(const PreparedChain& chain, std::size_t t) {
    return t == chain.steps || (t == 0 && !chain.prepared);
}

}  // namespace detail

// Runs the probes against the chain: each one links the two rails at its
// stage (complete: the variables themselves; partial: their classes) and
// appends a record variable r<stage> carrying the measured value.
inline Process probe(const ProbePlan& plan) {
    const PreparedChain& chain = plan.chain;
    std::set<std::size_t> seen;
    for (const Probe& p : plan.probes) {
        detail::validate_probe(p, chain);
        if (!seen.insert(p.stage).second)
            fail(ErrorKind::NameClash, "duplicate probe at stage " + std::to_string(p.stage));
    }
    Process w = chain.folded;
    for (const Probe& p : plan.probes) {
        std::string a = detail::stage_variable(chain, p.stage);
        std::string b = detail::stage_partner(chain, p.stage);
        std::string rid = "r" + std::to_string(p.stage);
        bool joined = detail::stage_already_joined(chain, p.stage);
        if (p.mode == ProbeMode::complete) {
            if (!joined) w = link(w, a, b);
            w = detail::append_record(w, a, rid, detail::identity_map(chain.dim),
                                      static_cast<long>(chain.dim));
        } else {
            long classes = detail::probe_classes(p.value_map);
            if (!joined) w = condition(w, detail::same_class_event(a, b, p.value_map));
            w = detail::append_record(w, a, rid, p.value_map, classes);
        }
    }
    return w;
}

inline Process probe(const PreparedChain& chain, const std::vector<Probe>& probes) {
    return probe(ProbePlan{chain, probes});
}

// State of the probed stage boundary after the probe acted: the boundary is
// left open, the probe's same-value (or same-class) condition is applied, and
// the state is read across the open link.
inline LinkState post_probe_state(const PreparedChain& chain, const Probe& p) {
    detail::validate_probe(p, chain);
    std::string out = detail::stage_variable(chain, p.stage);
    std::string in;
    if (detail::stage_already_joined(chain, p.stage))
        in = detail::stage_partner(chain, p.stage);  // the joining link is opened
    else
        in = out + "i";
    LinkSystem partial = chain.system;
    std::erase_if(partial.links, [&](const Link& l) {
        return l.first.members == std::vector<std::string>{out} &&
               l.second.members == std::vector<std::string>{in};
    });
    Process w = apply_links(partial);
    std::string b = detail::stage_already_joined(chain, p.stage)
                        ? in
                        : detail::stage_partner(chain, p.stage);
    Event keep = p.mode == ProbeMode::complete
                     ? Event::equal(out, b)
                     : detail::same_class_event(out, b, p.value_map);
    return link_state(condition(w, keep), out, in);
}

// Disturbance rule: sum of P_k S P_k over a diagonal partition.
inline LinkState projection_update(const LinkState& s, const std::vector<Projection>& parts) {
    const std::size_t n = s.dim();
    if (parts.empty()) fail(ErrorKind::NotAPartition, "empty projection list");
    std::vector<int> owner(n, -1);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].dim() != n)
            fail(ErrorKind::NotAPartition, "projection dimension mismatch");
        for (std::size_t i = 0; i < n; ++i)
            if (parts[k].bits[i] != 0) {
                if (owner[i] != -1)
                    fail(ErrorKind::NotAPartition, "projections overlap at index " +
                                                       std::to_string(i));
                owner[i] = static_cast<int>(k);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (owner[i] == -1)
            fail(ErrorKind::NotAPartition, "projections do not sum to the identity");
    Mat acc(n, n);
    for (const Projection& p : parts) {
        Mat pm = p.matrix();
        acc = acc + pm * s.entries * pm;
    }
    return LinkState(acc);
}

// partition of the state space induced by a value map: one projection per
// class label
inline std::vector<Projection> partition_from_map(const std::vector<long>& value_map) {
    std::vector<Projection> parts;
    for (long k = 0; k < detail::probe_classes(value_map); ++k) {
        Projection p{std::vector<int>(value_map.size(), 0)};
        for (std::size_t i = 0; i < value_map.size(); ++i)
            if (value_map[i] == k) p.bits[i] = 1;
        parts.push_back(std::move(p));
    }
    return parts;
}

// Selection keeps only records satisfying the constraint; an empty selection
// has no normalizer and is rejected.
inline Process selection(const Process& records, const Event& constraint) {
    Process out = condition(records, constraint);
    if (is_zero(out.total())) fail(ErrorKind::NullNormalizer, "selection has zero total weight");
    return out;
}

struct Fig5Report {
    Process table;  // variables x, y, z
    std::optional<std::vector<long>> negative_case;
    Rational negative_weight = 0;
    bool conditionally_independent = true;  // x and z independent given each y
};

// The un-probed double-measurement table w(x,y,z) = v[x] G[y,x] G^T[z,y] v[z]:
// summing over y leaves a perfectly correlated nonnegative (x,z) marginal, yet
// the joint table itself generally carries negative weights.
inline Fig5Report paradox_fig5(const Mat& g, const Vec& v) {
    if (!is_unitary(g)) fail(ErrorKind::NotUnitary, "generator is not orthogonal");
    const std::size_t n = g.rows();
    if (v.size() != n) fail(ErrorKind::DimMismatch, "vector length does not match generator");
    if (is_sharp(v)) fail(ErrorKind::DegenerateInput, "sharp preparation shows no negativity");
    bool zero = true;
    for (const Rational& e : v) zero = zero && is_zero(e);
    if (zero) fail(ErrorKind::DegenerateInput, "zero preparation vector");

    std::vector<Rational> weights;
    weights.reserve(n * n * n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z)
                weights.push_back(v[x] * g.at(y, x) * g.at(y, z) * v[z]);
    Fig5Report report;
    report.table = make_process({{"x", static_cast<long>(n)},
                                 {"y", static_cast<long>(n)},
                                 {"z", static_cast<long>(n)}},
                                weights);
    for (std::size_t c = 0; c < report.table.case_count(); ++c)
        if (is_negative(report.table.weight(c))) {
            report.negative_case = report.table.unflatten(c);
            report.negative_weight = report.table.weight(c);
            break;
        }
    for (std::size_t k = 0; k < n; ++k) {
        Process given = condition(report.table, Event::atom("y", static_cast<long>(k)));
        if (is_zero(given.total())) continue;
        Process xz = marginal(given, {"x", "z"});
        if (!is_independent(xz, {{"x"}, {"z"}})) report.conditionally_independent = false;
    }
    return report;
}

enum class SwitchState { on, off };

// Single-pole switch matrix: identity when ON, all entries 1/n when OFF. Both
// settings have the same total, which is what keeps the switch variable white
// when it dangles unlinked.
inline Transformation switch_matrix(std::size_t n, SwitchState state) {
    if (n == 0) fail(ErrorKind::DimMismatch, "switch needs a positive dimension");
    if (state == SwitchState::on) return {Mat::identity(n), 1};
    return {Mat(n, n, Rational(1) / Rational(static_cast<long>(n))), 1};
}

// The switch as a three-variable component Sw[s, x, y]: s selects the ON or
// OFF matrix.
inline Process switch_component(std::size_t n) {
    std::vector<Rational> weights;
    weights.reserve(2 * n * n);
    for (int s = 0; s < 2; ++s) {
        Mat m = switch_matrix(n, s == 0 ? SwitchState::on : SwitchState::off).matrix;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) weights.push_back(m.at(y, x));
    }
    return make_process(
        {{"s", 2}, {"x", static_cast<long>(n)}, {"y", static_cast<long>(n)}}, weights);
}

}  // namespace lks

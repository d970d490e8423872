// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktheory/error.hpp"
#include "linktheory/process.hpp"
#include "linktheory/state.hpp"

namespace lks {

// One side of a link: a primary variable or a secondary (joint) variable
// given by its ordered member list.
struct LinkEnd {
    std::vector<std::string> members;

    LinkEnd() = default;
    LinkEnd(const char* id) : members{id} {}                       // NOLINT(google-explicit-constructor)
    LinkEnd(const std::string& id) : members{id} {}                // NOLINT(google-explicit-constructor)
    LinkEnd(std::vector<std::string> ids) : members(std::move(ids)) {}  // NOLINT(google-explicit-constructor)
    LinkEnd(std::initializer_list<const char*> ids) {
        for (const char* id : ids) members.emplace_back(id);
    }

    bool operator==(const LinkEnd& o) const { return members == o.members; }
};

namespace detail {

// Marginalize onto `keep` (in W's variable order), allowing the empty set;
// the zero-variable process keeps the total as its single weight.
inline Process drop_to(const Process& w, const std::set<std::string>& keep) {
    std::vector<std::string> ids;
    for (const auto& v : w.vars())
        if (keep.count(v.id)) ids.push_back(v.id);
    if (ids.empty()) return Process::make({}, {w.total()});
    return marginal(w, ids);
}

inline void validate_link_ends(const Process& w, const LinkEnd& x, const LinkEnd& y) {
    if (x.members.empty() || y.members.empty())
        fail(ErrorKind::UnknownVariable, "link end with no members");
    if (x.members.size() != y.members.size())
        fail(ErrorKind::RangeMismatch, "link ends have different arity");
    for (std::size_t i = 0; i < x.members.size(); ++i) {
        if (w.range_of(x.members[i]) != w.range_of(y.members[i]))
            fail(ErrorKind::RangeMismatch,
                 "linked ranges differ: " + x.members[i] + " vs " + y.members[i]);
    }
}

}  // namespace detail

// The link operator: condition on x = y (memberwise for secondary variables),
// then drop y. link(W, x, x) just drops x. The result is intentionally not
// renormalized; when weight(x=y) = 0 it carries total 0 and stays queryable.
inline Process link(const Process& w, const LinkEnd& x, const LinkEnd& y) {
    if (x == y) {
        std::set<std::string> keep;
        for (const auto& v : w.vars()) keep.insert(v.id);
        for (const auto& id : x.members) {
            w.index_of(id);
            keep.erase(id);
        }
        return detail::drop_to(w, keep);
    }
    detail::validate_link_ends(w, x, y);
    std::set<std::string> seen(x.members.begin(), x.members.end());
    for (const auto& id : y.members)
        if (!seen.insert(id).second)
            fail(ErrorKind::OverlappingVariables, "link ends share variable " + id);

    Process conditioned = condition(w, Event::equal(x.members, y.members));
    std::set<std::string> keep;
    for (const auto& v : w.vars()) keep.insert(v.id);
    for (const auto& id : y.members) keep.erase(id);
    return detail::drop_to(conditioned, keep);
}

// Joint weight matrix on (x, y); trace = weight(x = y). Secondary ends use
// their row-major tuple ordering as the value index.
inline LinkState link_state(const Process& w, const LinkEnd& x, const LinkEnd& y) {
    detail::validate_link_ends(w, x, y);
    {
        std::set<std::string> seen(x.members.begin(), x.members.end());
        for (const auto& id : y.members)
            if (!seen.insert(id).second)
                fail(ErrorKind::OverlappingVariables, "state of a self-overlapping pair");
    }
    std::vector<std::string> both = x.members;
    both.insert(both.end(), y.members.begin(), y.members.end());
    detail::GroupTable g = detail::group_table(w, both);
    std::size_t nx = 1;
    for (std::size_t i = 0; i < x.members.size(); ++i) nx *= static_cast<std::size_t>(g.ranges[i]);
    std::size_t ny = g.cases / nx;
    if (nx != ny) fail(ErrorKind::RangeMismatch, "link state must be square");
    Mat m(ny, nx);
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) m.at(iy, ix) = g.weight[ix * ny + iy];
    return LinkState(m);
}

// Diagonal matrix carrying the (unnormalized) weight distribution of x.
inline LinkState variable_state(const Process& w, const std::string& x) {
    std::size_t pos = w.index_of(x);
    detail::GroupTable g = detail::group_table(w, {x});
    Mat m(static_cast<std::size_t>(w.vars()[pos].range), static_cast<std::size_t>(w.vars()[pos].range));
    for (std::size_t i = 0; i < g.cases; ++i) m.at(i, i) = g.weight[i];
    return LinkState(m);
}

// ---------------------------------------------------------------------------
// Disconnection: split W at x into (everything up to x) * (fresh white input
// x' driving everything after x), such that relinking x = x' restores the
// original weight table exactly. Possible iff x separates its past from its
// future and no value of x has marginal weight 0.
inline std::pair<Process, std::string> causal_cut(const Process& w, const std::string& x) {
    std::size_t pos = w.index_of(x);
    std::vector<std::string> before, after;
    for (std::size_t i = 0; i < pos; ++i) before.push_back(w.vars()[i].id);
    for (std::size_t i = pos + 1; i < w.vars().size(); ++i) after.push_back(w.vars()[i].id);

    detail::GroupTable xs = detail::group_table(w, {x});
    for (std::size_t k = 0; k < xs.cases; ++k)
        if (is_zero(xs.weight[k]))
            fail(ErrorKind::ZeroMarginal, "cut variable has a zero-weight value");
    if (!separates(w, before, {x}, after))
        fail(ErrorKind::NotSeparable, x + " does not separate its past from its future");

    // First factor: joint of the past with x.
    std::vector<std::string> first_ids = before;
    first_ids.push_back(x);
    Process first = marginal(w, first_ids);

    // Fresh white input variable named after x.
    std::string fresh = x + "'";
    while (w.has_variable(fresh)) fresh += "'";

    // Second factor: transition table p(after | x'=k), carried as weights
    // w(x=k, after)/w(x=k). Each value of x' has marginal weight exactly 1,
    // so x' is white and relinking leaves the partner table untouched.
    std::vector<std::string> tail_ids{x};
    tail_ids.insert(tail_ids.end(), after.begin(), after.end());
    Process tail = marginal(w, tail_ids);  // vars ordered (x, after...)
    std::vector<VariableDescriptor> second_vars{{fresh, w.vars()[pos].range}};
    for (const auto& id : after) second_vars.push_back({id, w.range_of(id)});
    std::vector<Rational> second_weights(tail.case_count());
    for (std::size_t idx = 0; idx < tail.case_count(); ++idx) {
        long k = tail.value_at(idx, 0);
        second_weights[idx] = tail.weight(idx) / xs.weight[static_cast<std::size_t>(k)];
    }
    Process second = Process::make(std::move(second_vars), std::move(second_weights));
    return {product(first, second), fresh};
}

// Equivalent cut: rescale the x direction by D and the y direction by D^-1.
// The diagonal (x = y) weights are untouched, so relinking gives the same
// process and Born outputs are invariant.
inline Process equivalent_cut(const Process& w, const std::string& x, const std::string& y,
                              const Vec& d) {
    std::size_t px = w.index_of(x), py = w.index_of(y);
    if (w.vars()[px].range != w.vars()[py].range ||
        d.size() != static_cast<std::size_t>(w.vars()[px].range))
        fail(ErrorKind::RangeMismatch, "diagonal size must match the cut pair range");
    for (const auto& e : d)
        if (is_zero(e)) fail(ErrorKind::SingularD, "zero entry on rescaling diagonal");
    std::vector<Rational> weights = w.weights();
    for (std::size_t idx = 0; idx < weights.size(); ++idx) {
        weights[idx] *= d[static_cast<std::size_t>(w.value_at(idx, px))];
        weights[idx] /= d[static_cast<std::size_t>(w.value_at(idx, py))];
    }
    return Process::make(w.vars(), std::move(weights));
}

// ---------------------------------------------------------------------------
// Link systems: named component processes plus links to apply.
struct Link {
    LinkEnd first;   // x: survives
    LinkEnd second;  // y: dropped
};

struct Component {
    std::string name;
    Process process;
};

struct LinkSystem {
    std::vector<Component> components;
    std::vector<Link> links;
};

namespace detail {

inline std::size_t component_of(const LinkSystem& sys, const std::string& var_id) {
    for (std::size_t i = 0; i < sys.components.size(); ++i)
        if (sys.components[i].process.has_variable(var_id)) return i;
    fail(ErrorKind::UnknownVariable, "no component declares " + var_id);
}

}  // namespace detail

// Propriety: every link joins two different components and no variable is
// claimed by two links. Under these rules the links commute.
inline void validate_proper(const LinkSystem& sys) {
    std::set<std::string> names;
    for (const auto& c : sys.components)
        if (!names.insert(c.name).second)
            fail(ErrorKind::NameClash, "duplicate component name " + c.name);
    std::set<std::string> used;
    for (const auto& l : sys.links) {
        std::set<std::size_t> comp_first, comp_second;
        for (const auto& id : l.first.members) comp_first.insert(detail::component_of(sys, id));
        for (const auto& id : l.second.members) comp_second.insert(detail::component_of(sys, id));
        if (comp_first.size() != 1 || comp_second.size() != 1)
            fail(ErrorKind::ImproperSystem, "link end spans multiple components");
        if (*comp_first.begin() == *comp_second.begin())
            fail(ErrorKind::ImproperSystem,
                 "intra-component link within " + sys.components[*comp_first.begin()].name);
        for (const auto* end : {&l.first, &l.second})
            for (const auto& id : end->members)
                if (!used.insert(id).second)
                    fail(ErrorKind::ImproperSystem, "variable in two links: " + id);
    }
}

// Fold the product of all components, then apply every link. For a proper
// system the outcome is independent of link order.
inline Process apply_links(const LinkSystem& sys) {
    validate_proper(sys);
    // Links on a proper system commute, so each one may be applied as soon as
    // both of its ends are present. Doing so keeps intermediate tables small;
    // folding everything first could overflow the joint-case cap.
    Process w = Process::make({}, {Rational(1)});
    std::vector<bool> done(sys.links.size(), false);
    auto ready = [&](const Link& l) {
        for (const auto* end : {&l.first, &l.second})
            for (const auto& id : end->members)
                if (!w.has_variable(id)) return false;
        return true;
    };
    auto sweep = [&] {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < sys.links.size(); ++i) {
                if (done[i] || !ready(sys.links[i])) continue;
                w = link(w, sys.links[i].first, sys.links[i].second);
                done[i] = true;
                progress = true;
            }
        }
    };
    for (const auto& c : sys.components) {
        w = product(w, c.process);
        sweep();
    }
    return w;
}

}  // namespace lks

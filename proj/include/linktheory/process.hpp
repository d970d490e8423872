// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "linktheory/error.hpp"
#include "linktheory/matrix.hpp"
#include "linktheory/rational.hpp"

namespace lks {

struct VariableDescriptor {
    std::string id;
    long range = 1;  // number of values, >= 1; values are 0-based indices

    bool operator==(const VariableDescriptor& o) const {
        return id == o.id && range == o.range;
    }
};

// A joint variable built from primary variables of one process. Members keep
// the process's own variable order; the secondary value is the ordered tuple.
struct SecondaryVariable {
    std::vector<std::string> members;
};

constexpr std::size_t kMaxJointCases = std::size_t(1) << 20;

// Finite stochastic process: an ordered variable list plus a dense table of
// signed rational weights, one per joint case. Weights are never normalized
// in place; `total()` carries the normalizer and queries divide on demand.
class Process {
  public:
    Process() : weights_(1, Rational(0)) {}  // zero-variable process, one case

    static Process make(std::vector<VariableDescriptor> vars, std::vector<Rational> weights) {
        std::size_t cases = 1;
        std::set<std::string> seen;
        for (const auto& v : vars) {
            if (v.range < 1) fail(ErrorKind::SizeMismatch, "variable range must be >= 1: " + v.id);
            if (!seen.insert(v.id).second) fail(ErrorKind::NameClash, "duplicate variable id: " + v.id);
            if (cases > kMaxJointCases / static_cast<std::size_t>(v.range))
                fail(ErrorKind::DimensionCap, "joint case count exceeds 2^20");
            cases *= static_cast<std::size_t>(v.range);
        }
        if (weights.size() != cases)
            fail(ErrorKind::SizeMismatch, "weight table size " + std::to_string(weights.size()) +
                                              ", expected " + std::to_string(cases));
        Process p;
        p.vars_ = std::move(vars);
        p.weights_ = std::move(weights);
        return p;
    }

    const std::vector<VariableDescriptor>& vars() const { return vars_; }
    std::size_t case_count() const { return weights_.size(); }
    const std::vector<Rational>& weights() const { return weights_; }
    const Rational& weight(std::size_t case_index) const { return weights_[case_index]; }

    Rational total() const { return sum(weights_); }

    // All weights nonnegative: the process lies inside ordinary probability.
    bool classical() const {
        for (const auto& w : weights_)
            if (is_negative(w)) return false;
        return true;
    }

    bool has_variable(const std::string& id) const {
        for (const auto& v : vars_)
            if (v.id == id) return true;
        return false;
    }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].id == id) return i;
        fail(ErrorKind::UnknownVariable, "no variable named " + id);
    }

    long range_of(const std::string& id) const { return vars_[index_of(id)].range; }

    // Row-major strides: the first variable varies slowest.
    std::size_t stride(std::size_t var_pos) const {
        std::size_t s = 1;
        for (std::size_t i = var_pos + 1; i < vars_.size(); ++i)
            s *= static_cast<std::size_t>(vars_[i].range);
        return s;
    }

    long value_at(std::size_t case_index, std::size_t var_pos) const {
        return static_cast<long>(case_index / stride(var_pos) %
                                 static_cast<std::size_t>(vars_[var_pos].range));
    }

    std::vector<long> unflatten(std::size_t case_index) const {
        std::vector<long> tuple(vars_.size());
        for (std::size_t i = vars_.size(); i-- > 0;) {
            tuple[i] = static_cast<long>(case_index % static_cast<std::size_t>(vars_[i].range));
            case_index /= static_cast<std::size_t>(vars_[i].range);
        }
        return tuple;
    }

    std::size_t flatten(const std::vector<long>& tuple) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            idx = idx * static_cast<std::size_t>(vars_[i].range) + static_cast<std::size_t>(tuple[i]);
        return idx;
    }

    Rational& mutable_weight(std::size_t case_index) { return weights_[case_index]; }

    bool operator==(const Process& o) const { return vars_ == o.vars_ && weights_ == o.weights_; }
    bool operator!=(const Process& o) const { return !(*this == o); }

  private:
    std::vector<VariableDescriptor> vars_;
    std::vector<Rational> weights_;
};

// ---------------------------------------------------------------------------
// Events: predicates over joint cases, closed under AND / OR / NOT. Atoms are
// single-variable value constraints; Equal handles the x=y conditions links
// are made of without expanding to an OR over the whole range.
class Event {
  public:
    static Event always() { return Event(std::make_shared<Node>(Node{Kind::All, {}, 0, {}, {}})); }
    static Event never() { return Event(std::make_shared<Node>(Node{Kind::None, {}, 0, {}, {}})); }

    static Event atom(std::string var, long value) {
        return Event(std::make_shared<Node>(Node{Kind::Atom, std::move(var), value, {}, {}}));
    }

    // Memberwise joint equality of two equally-long variable tuples.
    static Event equal(std::vector<std::string> a, std::vector<std::string> b) {
        if (a.size() != b.size()) fail(ErrorKind::RangeMismatch, "equality arity mismatch");
        auto n = std::make_shared<Node>(Node{Kind::Equal, {}, 0, {}, {}});
        n->lhs_vars = std::move(a);
        n->rhs_vars = std::move(b);
        return Event(n);
    }

    static Event equal(const std::string& a, const std::string& b) {
        return equal(std::vector<std::string>{a}, std::vector<std::string>{b});
    }

    Event operator!() const {
        auto n = std::make_shared<Node>(Node{Kind::Not, {}, 0, {}, {}});
        n->children = {node_};
        return Event(n);
    }

    Event operator&&(const Event& o) const { return combine(Kind::And, o); }
    Event operator||(const Event& o) const { return combine(Kind::Or, o); }

    bool eval(const Process& w, std::size_t case_index) const { return eval_node(*node_, w, case_index); }

  private:
    enum class Kind { All, None, Atom, Equal, Not, And, Or };

    struct Node {
        Kind kind;
        std::string var;  // Atom
        long value = 0;   // Atom
        std::vector<std::string> lhs_vars, rhs_vars;  // Equal
        std::vector<std::shared_ptr<const Node>> children;
    };

    explicit Event(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    Event combine(Kind k, const Event& o) const {
        auto n = std::make_shared<Node>(Node{k, {}, 0, {}, {}});
        n->children = {node_, o.node_};
        return Event(n);
    }

    static bool eval_node(const Node& n, const Process& w, std::size_t idx) {
        switch (n.kind) {
            case Kind::All: return true;
            case Kind::None: return false;
            case Kind::Atom: return w.value_at(idx, w.index_of(n.var)) == n.value;
            case Kind::Equal: {
                for (std::size_t i = 0; i < n.lhs_vars.size(); ++i) {
                    std::size_t a = w.index_of(n.lhs_vars[i]);
                    std::size_t b = w.index_of(n.rhs_vars[i]);
                    if (w.vars()[a].range != w.vars()[b].range)
                        fail(ErrorKind::RangeMismatch, "equality over unequal ranges: " +
                                                           n.lhs_vars[i] + " vs " + n.rhs_vars[i]);
                    if (w.value_at(idx, a) != w.value_at(idx, b)) return false;
                }
                return true;
            }
            case Kind::Not: return !eval_node(*n.children[0], w, idx);
            case Kind::And:
                return eval_node(*n.children[0], w, idx) && eval_node(*n.children[1], w, idx);
            case Kind::Or:
                return eval_node(*n.children[0], w, idx) || eval_node(*n.children[1], w, idx);
        }
        return false;
    }

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Core operations.

inline Process make_process(std::vector<VariableDescriptor> vars, std::vector<Rational> weights) {
    return Process::make(std::move(vars), std::move(weights));
}

// Single variable with an explicit weight vector.
inline Process scalar_process(const std::string& id, const Vec& weights) {
    return Process::make({{id, static_cast<long>(weights.size())}}, weights);
}

// Uniform (white) variable; per-case weight defaults to 1 so that linking a
// white variable leaves the partner's weight table untouched.
inline Process white_process(const std::string& id, long range, const Rational& case_weight = Rational(1)) {
    return scalar_process(id, Vec(static_cast<std::size_t>(range), case_weight));
}

inline Process product(const Process& w1, const Process& w2) {
    std::vector<VariableDescriptor> vars = w1.vars();
    for (const auto& v : w2.vars()) {
        if (w1.has_variable(v.id)) fail(ErrorKind::NameClash, "variable in both factors: " + v.id);
        vars.push_back(v);
    }
    std::size_t cases = w1.case_count() * w2.case_count();
    if (!vars.empty() && (cases > kMaxJointCases))
        fail(ErrorKind::DimensionCap, "product exceeds 2^20 joint cases");
    std::vector<Rational> weights;
    weights.reserve(cases);
    for (std::size_t i = 0; i < w1.case_count(); ++i)
        for (std::size_t j = 0; j < w2.case_count(); ++j)
            weights.push_back(w1.weight(i) * w2.weight(j));
    return Process::make(std::move(vars), std::move(weights));
}

// Sum of weights over the dropped variables. `keep` must be a nonempty
// subset; the result keeps the original variable order.
inline Process marginal(const Process& w, const std::vector<std::string>& keep) {
    if (keep.empty()) fail(ErrorKind::UnknownVariable, "marginal onto empty variable set");
    std::set<std::string> keep_set;
    for (const auto& id : keep) {
        w.index_of(id);  // raises UnknownVariable
        if (!keep_set.insert(id).second) fail(ErrorKind::NameClash, "duplicate id in keep: " + id);
    }
    std::vector<VariableDescriptor> vars;
    std::vector<std::size_t> kept_pos;
    for (std::size_t i = 0; i < w.vars().size(); ++i) {
        if (keep_set.count(w.vars()[i].id)) {
            vars.push_back(w.vars()[i]);
            kept_pos.push_back(i);
        }
    }
    std::size_t cases = 1;
    for (const auto& v : vars) cases *= static_cast<std::size_t>(v.range);
    std::vector<Rational> weights(cases, Rational(0));
    for (std::size_t idx = 0; idx < w.case_count(); ++idx) {
        std::size_t out = 0;
        for (std::size_t k = 0; k < kept_pos.size(); ++k)
            out = out * static_cast<std::size_t>(vars[k].range) +
                  static_cast<std::size_t>(w.value_at(idx, kept_pos[k]));
        weights[out] += w.weight(idx);
    }
    return Process::make(std::move(vars), std::move(weights));
}

// Zero out the cases failing E. Deliberately not renormalized; a zero total
// is legal and simply makes probability queries raise NullNormalizer.
inline Process condition(const Process& w, const Event& e) {
    Process out = w;
    for (std::size_t idx = 0; idx < w.case_count(); ++idx)
        if (!e.eval(w, idx)) out.mutable_weight(idx) = 0;
    return out;
}

inline Rational weight_of(const Process& w, const Event& e) {
    Rational acc = 0;
    for (std::size_t idx = 0; idx < w.case_count(); ++idx)
        if (e.eval(w, idx)) acc += w.weight(idx);
    return acc;
}

inline Rational probability(const Process& w, const Event& e) {
    Rational t = w.total();
    if (is_zero(t)) fail(ErrorKind::NullNormalizer, "probability query on total-0 process");
    return weight_of(w, e) / t;
}

namespace detail {

// Flattened marginal weight table over an ordered group of variables,
// alongside the group's per-variable positions for joint indexing.
struct GroupTable {
    std::vector<std::size_t> positions;
    std::vector<long> ranges;
    std::size_t cases = 1;
    std::vector<Rational> weight;
};

inline GroupTable group_table(const Process& w, const std::vector<std::string>& ids) {
    GroupTable g;
    for (const auto& id : ids) {
        std::size_t pos = w.index_of(id);
        g.positions.push_back(pos);
        g.ranges.push_back(w.vars()[pos].range);
        g.cases *= static_cast<std::size_t>(w.vars()[pos].range);
    }
    g.weight.assign(g.cases, Rational(0));
    for (std::size_t idx = 0; idx < w.case_count(); ++idx) {
        std::size_t sub = 0;
        for (std::size_t k = 0; k < g.positions.size(); ++k)
            sub = sub * static_cast<std::size_t>(g.ranges[k]) +
                  static_cast<std::size_t>(w.value_at(idx, g.positions[k]));
        g.weight[sub] += w.weight(idx);
    }
    return g;
}

inline void require_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                             const std::vector<std::string>& c) {
    std::set<std::string> seen;
    for (const auto* group : {&a, &b, &c})
        for (const auto& id : *group)
            if (!seen.insert(id).second)
                fail(ErrorKind::OverlappingVariables, "variable in two groups: " + id);
}

}  // namespace detail

// Separability identity w(abc) w(b) = w(ab) w(bc) over marginal weights, for
// every value combination. This is conditional independence of a and c given
// b in a form that stays meaningful for signed weights and zero totals. An
// empty group acts as the trivial (constant) variable.
inline bool separates(const Process& w, const std::vector<std::string>& a,
                      const std::vector<std::string>& b, const std::vector<std::string>& c) {
    detail::require_disjoint(a, b, c);
    std::vector<std::string> abc;
    for (const auto* g : {&a, &b, &c}) abc.insert(abc.end(), g->begin(), g->end());

    // Build one joint table over (a,b,c) and fold the needed sub-marginals.
    detail::GroupTable g = detail::group_table(w, abc);
    std::size_t na = 1, nb = 1, nc = 1;
    for (std::size_t i = 0; i < a.size(); ++i) na *= static_cast<std::size_t>(g.ranges[i]);
    for (std::size_t i = a.size(); i < a.size() + b.size(); ++i)
        nb *= static_cast<std::size_t>(g.ranges[i]);
    for (std::size_t i = a.size() + b.size(); i < abc.size(); ++i)
        nc *= static_cast<std::size_t>(g.ranges[i]);

    std::vector<Rational> wab(na * nb, Rational(0)), wbc(nb * nc, Rational(0)), wb(nb, Rational(0));
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib)
            for (std::size_t ic = 0; ic < nc; ++ic) {
                const Rational& x = g.weight[(ia * nb + ib) * nc + ic];
                wab[ia * nb + ib] += x;
                wbc[ib * nc + ic] += x;
                wb[ib] += x;
            }
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib)
            for (std::size_t ic = 0; ic < nc; ++ic) {
                if (g.weight[(ia * nb + ib) * nc + ic] * wb[ib] !=
                    wab[ia * nb + ib] * wbc[ib * nc + ic])
                    return false;
            }
    return true;
}

inline bool separates(const Process& w, const std::string& a, const std::string& b,
                      const std::string& c) {
    return separates(w, std::vector<std::string>{a}, {b}, {c});
}

// Betweenness B(x,y,z) reads "y is between x and z".
inline bool betweenness(const Process& w, const std::string& x, const std::string& y,
                        const std::string& z) {
    return separates(w, x, y, z);
}

// Markov property: each variable separates the ones before it from the ones
// after it, in the given order.
inline bool markov_check(const Process& w, const std::vector<std::string>& order) {
    if (order.size() != w.vars().size())
        fail(ErrorKind::UnknownVariable, "order must be a permutation of the variables");
    std::set<std::string> seen;
    for (const auto& id : order) {
        w.index_of(id);
        if (!seen.insert(id).second) fail(ErrorKind::NameClash, "duplicate id in order: " + id);
    }
    for (std::size_t t = 1; t + 1 < order.size(); ++t) {
        std::vector<std::string> before(order.begin(), order.begin() + t);
        std::vector<std::string> after(order.begin() + t + 1, order.end());
        if (!separates(w, before, {order[t]}, after)) return false;
    }
    return true;
}

// The order property: along consecutive triples, betweenness holds in the
// given arrangement and fails in the two transposed ones. A process with a
// well-ordered causal structure passes; heaps and reversible shuffles fail.
inline bool order_property(const Process& w, const std::vector<std::string>& order) {
    for (std::size_t t = 0; t + 2 < order.size(); ++t) {
        const std::string& x = order[t];
        const std::string& y = order[t + 1];
        const std::string& z = order[t + 2];
        if (!betweenness(w, x, y, z)) return false;
        if (betweenness(w, y, x, z)) return false;
        if (betweenness(w, x, z, y)) return false;
    }
    return true;
}

// Product rule across a partition: every joint probability equals the product
// of its parts' marginal probabilities. Stated over weights so only one
// division boundary (total != 0) exists.
inline bool is_independent(const Process& w, const std::vector<std::vector<std::string>>& parts) {
    Rational t = w.total();
    if (is_zero(t)) fail(ErrorKind::NullNormalizer, "independence undefined for total-0 process");
    std::set<std::string> seen;
    for (const auto& part : parts)
        for (const auto& id : part) {
            w.index_of(id);
            if (!seen.insert(id).second) fail(ErrorKind::OverlappingVariables, "variable in two parts: " + id);
        }
    if (seen.size() != w.vars().size())
        fail(ErrorKind::UnknownVariable, "parts must cover all variables");

    std::vector<detail::GroupTable> tables;
    tables.reserve(parts.size());
    for (const auto& part : parts) tables.push_back(detail::group_table(w, part));

    // w(case) * T^(k-1) == prod_parts w_part(sub-case)
    Rational t_pow = 1;
    for (std::size_t i = 1; i < parts.size(); ++i) t_pow *= t;
    for (std::size_t idx = 0; idx < w.case_count(); ++idx) {
        Rational rhs = 1;
        for (const auto& g : tables) {
            std::size_t sub = 0;
            for (std::size_t k = 0; k < g.positions.size(); ++k)
                sub = sub * static_cast<std::size_t>(g.ranges[k]) +
                      static_cast<std::size_t>(w.value_at(idx, g.positions[k]));
            rhs *= g.weight[sub];
        }
        if (w.weight(idx) * t_pow != rhs) return false;
    }
    return true;
}

// Unique finest partition into independent parts. Pairwise dependence forces
// two variables into the same part, so the pairwise-dependence graph's
// connected components are the atoms; higher-order (XOR-style) dependence is
// caught by growing each atom to the smallest union that passes the full
// independent-of-complement test.
inline std::vector<std::vector<std::string>> prime_factorize(const Process& w) {
    Rational t = w.total();
    if (is_zero(t)) fail(ErrorKind::NullNormalizer, "prime factorization undefined for total-0 process");
    std::size_t n = w.vars().size();
    if (n == 0) return {};
    if (n == 1) return {{w.vars()[0].id}};

    auto pair_independent = [&](std::size_t i, std::size_t j) {
        Process m = marginal(w, {w.vars()[i].id, w.vars()[j].id});
        return is_independent(m, {{w.vars()[i].id}, {w.vars()[j].id}});
    };

    // Union-find over variables, edges where the pairwise product rule fails.
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!pair_independent(i, j)) parent[find(i)] = find(j);

    std::map<std::size_t, std::vector<std::string>> comps;
    for (std::size_t i = 0; i < n; ++i) comps[find(i)].push_back(w.vars()[i].id);
    std::vector<std::vector<std::string>> atoms;
    for (auto& [root, ids] : comps) atoms.push_back(std::move(ids));
    std::size_t m = atoms.size();

    auto union_of = [&](const std::vector<std::size_t>& which) {
        std::vector<std::string> ids;
        for (std::size_t i : which) ids.insert(ids.end(), atoms[i].begin(), atoms[i].end());
        return ids;
    };
    auto independent_of_rest = [&](const std::vector<std::size_t>& which) {
        std::vector<bool> in(m, false);
        for (std::size_t i : which) in[i] = true;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < m; ++i)
            if (!in[i]) rest.push_back(i);
        if (rest.empty()) return true;
        return is_independent(w, {union_of(which), union_of(rest)});
    };

    std::vector<std::vector<std::string>> parts;
    std::vector<bool> assigned(m, false);
    for (std::size_t seed = 0; seed < m; ++seed) {
        if (assigned[seed]) continue;
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < m; ++i)
            if (i != seed && !assigned[i]) pool.push_back(i);
        // Smallest union of atoms containing the seed that splits off cleanly;
        // uniqueness of the prime decomposition makes the first hit canonical.
        std::vector<std::size_t> found;
        std::vector<std::size_t> comb;
        auto try_candidate = [&]() {
            std::vector<std::size_t> candidate{seed};
            candidate.insert(candidate.end(), comb.begin(), comb.end());
            if (independent_of_rest(candidate)) {
                found = candidate;
                return true;
            }
            return false;
        };
        std::function<bool(std::size_t, std::size_t)> choose = [&](std::size_t start,
                                                                   std::size_t left) -> bool {
            if (left == 0) return try_candidate();
            for (std::size_t i = start; i < pool.size(); ++i) {
                comb.push_back(pool[i]);
                if (choose(i + 1, left - 1)) return true;
                comb.pop_back();
            }
            return false;
        };
        for (std::size_t extra = 0; extra <= pool.size() && found.empty(); ++extra) {
            comb.clear();
            choose(0, extra);
        }
        if (found.empty()) {  // unreachable: the full pool always passes
            found.push_back(seed);
            found.insert(found.end(), pool.begin(), pool.end());
        }
        for (std::size_t i : found) assigned[i] = true;
        parts.push_back(union_of(found));
    }

    // Keep parts ordered by first variable appearance for stable output.
    std::sort(parts.begin(), parts.end(),
              [&](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                  return w.index_of(a.front()) < w.index_of(b.front());
              });
    return parts;
}

}  // namespace lks

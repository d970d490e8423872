// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "linktheory/matrix.hpp"
#include "linktheory/measurement.hpp"
#include "linktheory/process.hpp"

namespace lks {

// Textbook simulator for measured chains, used as an independent reference
// for probe(): evolve the state vector through the generators, collapse it at
// each probe with the class projector, and read outcome probabilities off the
// squared norms. Shares nothing with the link machinery beyond the input
// descriptors.
inline Process standard_records(const std::vector<Mat>& gens, const Vec& v,
                                const std::vector<Probe>& probes) {
    const std::size_t n = v.size();
    const std::size_t steps = gens.size();
    if (n == 0) fail(ErrorKind::InvalidInitial, "empty initial vector");
    for (const Mat& g : gens)
        if (!g.square() || g.rows() != n)
            fail(ErrorKind::DimMismatch, "generator shape does not match initial vector");
    Rational norm0 = 0;
    for (const Rational& e : v) norm0 += e * e;
    if (is_zero(norm0)) fail(ErrorKind::InvalidInitial, "initial vector is zero");

    std::vector<long> ranges;
    std::set<std::size_t> seen;
    for (const Probe& p : probes) {
        if (p.stage > steps)
            fail(ErrorKind::StageOutOfRange, "probe stage exceeds chain length");
        if (!seen.insert(p.stage).second)
            fail(ErrorKind::NameClash, "duplicate probe at stage " + std::to_string(p.stage));
        if (p.mode == ProbeMode::partial) {
            if (p.value_map.size() != n)
                fail(ErrorKind::RangeMismatch, "value map must cover the stage range");
            for (long label : p.value_map)
                if (label < 0) fail(ErrorKind::RangeMismatch, "value map labels must be nonnegative");
            ranges.push_back(detail::probe_classes(p.value_map));
        } else {
            ranges.push_back(static_cast<long>(n));
        }
    }

    std::vector<VariableDescriptor> vars;
    std::size_t cases = 1;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        vars.push_back({"r" + std::to_string(probes[i].stage), ranges[i]});
        cases *= static_cast<std::size_t>(ranges[i]);
    }
    std::vector<Rational> weights(std::max<std::size_t>(cases, 1), Rational(0));

    // simulate in time order, then write each outcome tuple back into the
    // plan's variable order
    std::vector<std::size_t> chrono(probes.size());
    for (std::size_t i = 0; i < chrono.size(); ++i) chrono[i] = i;
    std::sort(chrono.begin(), chrono.end(),
              [&](std::size_t a, std::size_t b) { return probes[a].stage < probes[b].stage; });

    std::vector<long> outcome(probes.size(), 0);
    std::function<void(std::size_t, Vec, std::size_t)> walk = [&](std::size_t step,
                                                                  Vec psi,
                                                                  std::size_t stage) {
        if (step == chrono.size()) {
            Rational norm = 0;
            for (const Rational& e : psi) norm += e * e;
            std::size_t idx = 0;
            for (std::size_t i = 0; i < probes.size(); ++i)
                idx = idx * static_cast<std::size_t>(ranges[i]) +
                      static_cast<std::size_t>(outcome[i]);
            weights[idx] = norm / norm0;
            return;
        }
        const Probe& p = probes[chrono[step]];
        while (stage < p.stage) {
            psi = gens[stage] * psi;
            ++stage;
        }
        long classes = ranges[chrono[step]];
        for (long k = 0; k < classes; ++k) {
            Vec collapsed(n, Rational(0));
            for (std::size_t i = 0; i < n; ++i) {
                long label = p.mode == ProbeMode::complete ? static_cast<long>(i)
                                                           : p.value_map[i];
                if (label == k) collapsed[i] = psi[i];
            }
            outcome[chrono[step]] = k;
            walk(step + 1, collapsed, stage);
        }
    };
    walk(0, v, 0);

    if (vars.empty()) return Process::make({}, {Rational(1)});
    return make_process(vars, weights);
}

}  // namespace lks

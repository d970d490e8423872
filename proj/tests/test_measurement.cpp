// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <catch2/catch_amalgamated.hpp>

#include "linktheory/measurement.hpp"
#include "linktheory/rng.hpp"
#include "linktheory/standard.hpp"

using namespace lks;

namespace {

Mat rot_g() { return Mat::from_rows({{rat(3, 5), rat(-4, 5)}, {rat(4, 5), rat(3, 5)}}); }

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

std::vector<Projection> singleton_partition(std::size_t n) {
    std::vector<Projection> parts;
    for (std::size_t k = 0; k < n; ++k) parts.push_back(Projection::single(n, k));
    return parts;
}

// record marginal rescaled to probabilities
Vec record_distribution(const Process& probed, const std::string& rid) {
    Process m = marginal(probed, {rid});
    Vec w = m.weights();
    for (Rational& x : w) x /= m.total();
    return w;
}

}  // namespace

TEST_CASE("check_lab_object") {
    SECTION("white inputs with a constant output pass trivially") {
        Process w = product(product(white_process("u0", 2), white_process("u1", 3)),
                            make_process({{"y", 1}}, {rat(1)}));
        LabObjectView view{w, {{"u0", 0}, {"u1", 1}}, {{"y", 0}}};
        LabReport r = check_lab_object(view);
        REQUIRE(r.all());
    }
    SECTION("probed chain passes all three axioms") {
        PreparedChain chain = make_prepared_chain({rot_g(), rot_g()}, {rat(3, 5), rat(4, 5)});
        Process probed = probe(chain, {complete_probe(0), complete_probe(1), complete_probe(2)});
        LabObjectView view{probed, {}, {{"r0", 0}, {"r1", 1}, {"r2", 2}}};
        REQUIRE(check_lab_object(view).all());
    }
    SECTION("the un-probed double measurement is not observable") {
        Fig5Report fig = paradox_fig5(rot_g(), {rat(3, 5), rat(4, 5)});
        LabObjectView view{fig.table, {}, {{"x", 0}, {"y", 1}, {"z", 2}}};
        LabReport r = check_lab_object(view);
        REQUIRE_FALSE(r.observable);
        REQUIRE(r.controllable);
        REQUIRE(r.causal);
    }
    SECTION("an output correlated with a later input breaks causality") {
        Process w = make_process({{"y0", 2}, {"u1", 2}}, {rat(1), rat(0), rat(0), rat(1)});
        LabReport r = check_lab_object({w, {{"u1", 1}}, {{"y0", 0}}});
        REQUIRE(r.controllable);  // the copy still has a uniform input marginal
        REQUIRE_FALSE(r.causal);
    }
    SECTION("a biased input breaks controllability") {
        Process w = product(scalar_process("u", {rat(1), rat(2)}), white_process("y", 2));
        LabReport r = check_lab_object({w, {{"u", 0}}, {{"y", 1}}});
        REQUIRE_FALSE(r.controllable);
    }
}

TEST_CASE("probe") {
    SECTION("single probe reproduces the Born weights") {
        PreparedChain chain = make_prepared_chain({rot_g()}, {rat(1), rat(0)});
        Process probed = probe(chain, {complete_probe(1)});
        REQUIRE(record_distribution(probed, "r1") == Vec{rat(9, 25), rat(16, 25)});
        LinkState s = chain.stage_state(1);
        for (std::size_t k = 0; k < 2; ++k)
            REQUIRE(probability(probed, Event::atom("r1", static_cast<long>(k))) ==
                    born(Projection::single(2, k), s));
    }
    SECTION("probing both ends of a there-and-back chain gives equal records") {
        Mat g = rot_g();
        PreparedChain chain = make_prepared_chain({g, g.transpose()}, {rat(3, 5), rat(4, 5)});
        Process probed = probe(chain, {complete_probe(0), complete_probe(2)});
        Process records = marginal(probed, {"r0", "r2"});
        REQUIRE(records.weight(records.flatten({0, 1})) == rat(0));
        REQUIRE(records.weight(records.flatten({1, 0})) == rat(0));
        REQUIRE(records.weight(records.flatten({0, 0})) == rat(9, 25));
        REQUIRE(records.weight(records.flatten({1, 1})) == rat(16, 25));
        REQUIRE(probability(probed, Event::equal("r0", "r2")) == rat(1));
    }
    SECTION("probing the unprepared loop leaves everything white") {
        PreparedChain loop = make_prepared_chain({rot_g(), rot_g()}, {});
        Process probed = probe(loop, {complete_probe(1)});
        REQUIRE(record_distribution(probed, "r1") == Vec{rat(1, 2), rat(1, 2)});
        StateClass after = classify_state(post_probe_state(loop, complete_probe(1)));
        REQUIRE(after.white);
        // the record at the loop head is uniform too
        Process head = probe(loop, {complete_probe(0)});
        REQUIRE(record_distribution(head, "r0") == Vec{rat(1, 2), rat(1, 2)});
    }
    SECTION("inserting probes never changes the total weight") {
        PreparedChain chain = make_prepared_chain({rot_g(), rot_g(), rot_g()},
                                                  {rat(3, 5), rat(4, 5)});
        Rational before = chain.folded.total();
        REQUIRE(probe(chain, {complete_probe(1)}).total() == before);
        REQUIRE(probe(chain, {partial_probe(2, {0, 0})}).total() == before);
        REQUIRE(probe(chain, {complete_probe(0), complete_probe(2)}).total() == before);
    }
    SECTION("later probes do not disturb earlier records") {
        PreparedChain chain = make_prepared_chain({rot_g(), rot_g()}, {rat(3, 5), rat(4, 5)});
        Process lone = probe(chain, {complete_probe(0)});
        Process both = probe(chain, {complete_probe(0), complete_probe(2)});
        REQUIRE(marginal(lone, {"r0"}) == marginal(both, {"r0"}));
    }
    SECTION("record sequences are Markov") {
        PreparedChain chain = make_prepared_chain({rot_g(), rot_g()}, {rat(3, 5), rat(4, 5)});
        Process probed = probe(chain, {complete_probe(0), complete_probe(1), complete_probe(2)});
        Process records = marginal(probed, {"r0", "r1", "r2"});
        REQUIRE(markov_check(records, {"r0", "r1", "r2"}));
    }
    SECTION("records match the standard simulator") {
        for (unsigned trial = 0; trial < 10; ++trial) {
            Rng rng(trial_seed(0x0BCE, trial));
            std::size_t n = 2 + rng.below(2);
            std::size_t steps = 2;
            std::vector<Mat> gens(steps, Mat());
            for (Mat& g : gens) g = rng.orthogonal(n);
            Vec v = rng.signed_vector(n);
            bool zero = true;
            for (const Rational& e : v) zero = zero && is_zero(e);
            if (zero) v[0] = rat(1);
            std::vector<long> halves(n, 0);
            for (std::size_t i = n / 2; i < n; ++i) halves[i] = 1;
            std::vector<Probe> probes{complete_probe(0), partial_probe(1, halves),
                                      complete_probe(2)};
            PreparedChain chain = make_prepared_chain(gens, v);
            Process probed = probe(chain, probes);
            Process records = marginal(probed, {"r0", "r1", "r2"});
            Process reference = standard_records(gens, v, probes);
            REQUIRE(records.vars() == reference.vars());
            for (std::size_t c = 0; c < records.case_count(); ++c)
                REQUIRE(records.weight(c) / records.total() == reference.weight(c));
        }
    }
    SECTION("validation") {
        PreparedChain chain = make_prepared_chain({rot_g()}, {rat(1), rat(0)});
        REQUIRE_THROWS_MATCHES(probe(chain, {complete_probe(2)}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::StageOutOfRange);
                               }));
        REQUIRE_THROWS_MATCHES(probe(chain, {complete_probe(1), complete_probe(1)}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NameClash);
                               }));
        REQUIRE_THROWS_MATCHES(probe(chain, {partial_probe(0, {0, 1, 2})}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::RangeMismatch);
                               }));
    }
}

TEST_CASE("projection_update") {
    SECTION("complete partition zeroes the off-diagonal") {
        LinkState s = pure_state({rat(3, 5), rat(4, 5)}, {rat(3, 5), rat(4, 5)});
        LinkState updated = projection_update(s, singleton_partition(2));
        REQUIRE(updated == diagonal_state({rat(9, 25), rat(16, 25)}));
    }
    SECTION("white states are fixed points") {
        LinkState white(Mat::identity(3) * rat(1, 3));
        REQUIRE(projection_update(white, singleton_partition(3)) == white);
        REQUIRE(projection_update(white, partition_from_map({0, 1, 1})) == white);
    }
    SECTION("the trivial partition changes nothing") {
        LinkState s(Mat::from_rows({{rat(1, 2), rat(1, 3)}, {rat(1, 5), rat(1, 7)}}));
        REQUIRE(projection_update(s, {Projection::identity(2)}) == s);
    }
    SECTION("matches blockwise zeroing on random states") {
        for (unsigned trial = 0; trial < 20; ++trial) {
            Rng rng(trial_seed(0xD157, trial));
            std::size_t n = 2 + rng.below(3);
            Mat m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m.at(i, j) = rng.rational();
            std::vector<long> f(n);
            for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<long>(rng.below(2));
            f[0] = 0;  // keep labels contiguous from zero
            LinkState updated = projection_update(LinkState(m), partition_from_map(f));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Rational expect = f[i] == f[j] ? m.at(i, j) : rat(0);
                    REQUIRE(updated.at(i, j) == expect);
                }
        }
    }
    SECTION("bad partitions rejected") {
        LinkState s(Mat::identity(2));
        REQUIRE_THROWS_MATCHES(projection_update(s, {}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotAPartition);
                               }));
        REQUIRE_THROWS_MATCHES(
            projection_update(s, {Projection::single(2, 0)}), Error,
            Catch::Matchers::Predicate<Error>(
                [](const Error& e) { return kind_is(e, ErrorKind::NotAPartition); }));
        REQUIRE_THROWS_MATCHES(
            projection_update(s, {Projection::identity(2), Projection::single(2, 1)}), Error,
            Catch::Matchers::Predicate<Error>(
                [](const Error& e) { return kind_is(e, ErrorKind::NotAPartition); }));
        REQUIRE_THROWS_MATCHES(
            projection_update(s, {Projection::identity(3)}), Error,
            Catch::Matchers::Predicate<Error>(
                [](const Error& e) { return kind_is(e, ErrorKind::NotAPartition); }));
    }
}

TEST_CASE("measurement disturbs the state by the projection rule") {
    SECTION("complete probe leaves the diagonal mixture") {
        PreparedChain chain = make_prepared_chain({rot_g(), rot_g()}, {rat(3, 5), rat(4, 5)});
        for (std::size_t t = 0; t <= 2; ++t) {
            LinkState before = chain.stage_state(t);
            LinkState after = post_probe_state(chain, complete_probe(t));
            REQUIRE(after == projection_update(before, singleton_partition(2)));
        }
    }
    SECTION("partial probe keeps the in-block coherence") {
        for (unsigned trial = 0; trial < 6; ++trial) {
            Rng rng(trial_seed(0x9A27, trial));
            std::size_t n = 3;
            Mat g = rng.orthogonal(n);
            Vec v = rng.signed_vector(n);
            bool zero = true;
            for (const Rational& e : v) zero = zero && is_zero(e);
            if (zero) v[0] = rat(1);
            PreparedChain chain = make_prepared_chain({g, g}, v);
            std::vector<long> f{0, 1, 0};
            LinkState before = chain.stage_state(1);
            LinkState after = post_probe_state(chain, partial_probe(1, f));
            REQUIRE(after == projection_update(before, partition_from_map(f)));
        }
    }
}

TEST_CASE("selection") {
    Mat g = rot_g();
    PreparedChain chain = make_prepared_chain({g, g}, {rat(3, 5), rat(4, 5)});
    Process probed = probe(chain, {complete_probe(1)});

    SECTION("selecting a record value prepares the downstream chain sharply") {
        Process sel = selection(probed, Event::atom("r1", 0));
        for (std::size_t m = 0; m < 2; ++m) {
            Rational expect = g.at(m, 0) * g.at(m, 0);
            REQUIRE(probability(sel, Event::atom("a2", static_cast<long>(m))) == expect);
        }
        // same numbers as a fresh chain prepared in the sharp state
        Process fresh = quantum_prepared_chain(g, {rat(1), rat(0)}, 1);
        for (std::size_t m = 0; m < 2; ++m)
            REQUIRE(probability(sel, Event::atom("a2", static_cast<long>(m))) ==
                    probability(fresh, Event::atom("a1", static_cast<long>(m))));
    }
    SECTION("the universal selection is a no-op") {
        REQUIRE(selection(probed, Event::always()) == probed);
    }
    SECTION("empty selections are rejected") {
        PreparedChain blocked = make_prepared_chain({g}, {rat(4, 5), rat(3, 5)});
        Process p = probe(blocked, {complete_probe(1)});
        // G maps (4/5, 3/5) to (0, 1): the record never reads 0
        REQUIRE(probability(p, Event::atom("r1", 1)) == rat(1));
        REQUIRE_THROWS_MATCHES(selection(p, Event::atom("r1", 0)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NullNormalizer);
                               }));
    }
}

TEST_CASE("paradox_fig5") {
    SECTION("the canonical example carries a negative weight") {
        Fig5Report fig = paradox_fig5(rot_g(), {rat(3, 5), rat(4, 5)});
        REQUIRE(fig.negative_case.has_value());
        REQUIRE(*fig.negative_case == std::vector<long>{0, 0, 1});
        REQUIRE(fig.negative_weight == rat(-144, 625));
        REQUIRE(fig.table.weight(fig.table.flatten({0, 0, 1})) == rat(-144, 625));
        REQUIRE(fig.conditionally_independent);
    }
    SECTION("the (x,z) marginal is correlated and nonnegative") {
        Fig5Report fig = paradox_fig5(rot_g(), {rat(3, 5), rat(4, 5)});
        Process xz = marginal(fig.table, {"x", "z"});
        REQUIRE(xz.weights() == Vec{rat(9, 25), rat(0), rat(0), rat(16, 25)});
        REQUIRE(probability(xz, Event::equal("x", "z")) == rat(1));
    }
    SECTION("probing the measured stages removes the negativity") {
        Mat g = rot_g();
        PreparedChain chain = make_prepared_chain({g, g.transpose()}, {rat(3, 5), rat(4, 5)});
        Process probed = probe(chain, {complete_probe(0), complete_probe(2)});
        Process records = marginal(probed, {"r0", "r2"});
        for (const Rational& w : records.weights()) REQUIRE_FALSE(is_negative(w));
    }
    SECTION("degenerate preparations rejected") {
        REQUIRE_THROWS_MATCHES(paradox_fig5(rot_g(), {rat(1), rat(0)}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::DegenerateInput);
                               }));
        REQUIRE_THROWS_MATCHES(paradox_fig5(Mat::from_rows({{rat(1, 2), rat(1, 2)},
                                                            {rat(1, 2), rat(1, 2)}}),
                                            {rat(3, 5), rat(4, 5)}),
                               Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotUnitary);
                               }));
    }
}

TEST_CASE("switches") {
    SECTION("matrices") {
        REQUIRE(switch_matrix(2, SwitchState::on).matrix == Mat::identity(2));
        REQUIRE(switch_matrix(2, SwitchState::off).matrix ==
                Mat::from_rows({{rat(1, 2), rat(1, 2)}, {rat(1, 2), rat(1, 2)}}));
    }
    SECTION("both settings carry the same total weight") {
        for (std::size_t n = 1; n <= 4; ++n) {
            Rational on_total = 0, off_total = 0;
            Mat on = switch_matrix(n, SwitchState::on).matrix;
            Mat off = switch_matrix(n, SwitchState::off).matrix;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    on_total += on.at(i, j);
                    off_total += off.at(i, j);
                }
            REQUIRE(on_total == off_total);
        }
    }
    SECTION("the unlinked switch variable is white") {
        Process sw = switch_component(3);
        REQUIRE(marginal(sw, {"s"}).weights() == Vec{rat(3), rat(3)});
    }
}

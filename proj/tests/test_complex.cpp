// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <catch2/catch_amalgamated.hpp>

#include "linktheory/complexnum.hpp"
#include "linktheory/measurement.hpp"
#include "linktheory/rng.hpp"
#include "linktheory/standard.hpp"

using namespace lks;

namespace {

ComplexWeight random_complex(Rng& rng) { return {rng.rational(), rng.rational()}; }

// complex matrix product via the real/imaginary block formula
ComplexMat complex_mat_product(const ComplexMat& m, const ComplexMat& n) {
    return {m.re * n.re - m.im * n.im, m.re * n.im + m.im * n.re};
}

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

}  // namespace

TEST_CASE("complex products") {
    const ComplexWeight i{rat(0), rat(1)};
    SECTION("i squared is minus one on both routes") {
        REQUIRE(complex_product_via_matrix(i, i) == ComplexWeight{rat(-1), rat(0)});
        REQUIRE(complex_product_via_link(i, i) == ComplexWeight{rat(-1), rat(0)});
        REQUIRE(complex_product(i, i) == ComplexWeight{rat(-1), rat(0)});
    }
    SECTION("conjugate pair") {
        ComplexWeight p = complex_product({rat(1), rat(1)}, {rat(1), rat(-1)});
        REQUIRE(p == ComplexWeight{rat(2), rat(0)});
    }
    SECTION("one is neutral") {
        ComplexWeight c{rat(7, 3), rat(-2, 5)};
        REQUIRE(complex_product(c, {rat(1), rat(0)}) == c);
        REQUIRE(complex_product({rat(1), rat(0)}, c) == c);
    }
    SECTION("matrix and contraction routes agree on random pairs") {
        for (unsigned trial = 0; trial < 40; ++trial) {
            Rng rng(trial_seed(0xC09F, trial));
            ComplexWeight c = random_complex(rng), d = random_complex(rng);
            REQUIRE(complex_product_via_link(c, d) == complex_product_via_matrix(c, d));
            REQUIRE(complex_product(c, d) == complex_product(d, c));
        }
    }
}

TEST_CASE("joint encoding") {
    SECTION("the canonical table") {
        Process w = complex_to_joint({rat(3), rat(4)});
        REQUIRE(w.weights() == Vec{rat(3), rat(4), rat(-4), rat(3)});
        REQUIRE(joint_to_complex(w) == ComplexWeight{rat(3), rat(4)});
    }
    SECTION("zero maps to the zero table") {
        Process w = complex_to_joint({rat(0), rat(0)});
        REQUIRE(w.weights() == Vec{rat(0), rat(0), rat(0), rat(0)});
        REQUIRE(joint_to_complex(w) == ComplexWeight{rat(0), rat(0)});
    }
    SECTION("round trip on random weights") {
        for (unsigned trial = 0; trial < 20; ++trial) {
            Rng rng(trial_seed(0x107, trial));
            ComplexWeight c = random_complex(rng);
            REQUIRE(joint_to_complex(complex_to_joint(c)) == c);
            REQUIRE(complex_from_matrix(c.matrix()) == c);
        }
    }
    SECTION("ill-shaped joints rejected") {
        Process unequal = make_process({{"j", 2}, {"k", 2}}, {rat(1), rat(0), rat(0), rat(2)});
        REQUIRE_THROWS_MATCHES(joint_to_complex(unequal), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotComplexShaped);
                               }));
        Process skewless = make_process({{"j", 2}, {"k", 2}}, {rat(1), rat(2), rat(3), rat(1)});
        REQUIRE_THROWS_MATCHES(joint_to_complex(skewless), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotComplexShaped);
                               }));
        Process triple = white_process("x", 8);
        REQUIRE_THROWS_MATCHES(joint_to_complex(triple), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotComplexShaped);
                               }));
        REQUIRE_THROWS_MATCHES(complex_from_matrix(Mat::from_rows({{rat(1), rat(2)},
                                                                   {rat(2), rat(1)}})),
                               Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::NotComplexShaped);
                               }));
    }
}

TEST_CASE("boosts") {
    SECTION("half plus half is four fifths") {
        REQUIRE(boost_compose(rat(1, 2), rat(1, 2)) == rat(4, 5));
        REQUIRE(boost_via_coins(rat(1, 2), rat(1, 2)) == rat(4, 5));
    }
    SECTION("rest and light speed") {
        REQUIRE(boost_compose(rat(3, 7), rat(0)) == rat(3, 7));
        REQUIRE(boost_compose(rat(3, 7), rat(1)) == rat(1));
        REQUIRE(boost_compose(rat(-9, 10), rat(1)) == rat(1));
    }
    SECTION("opposite light speeds are singular") {
        REQUIRE_THROWS_MATCHES(boost_compose(rat(1), rat(-1)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::SingularBoost);
                               }));
        REQUIRE_THROWS_MATCHES(boost_via_coins(rat(-1), rat(1)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::SingularBoost);
                               }));
    }
    SECTION("formula and coin link agree on random velocities") {
        for (unsigned trial = 0; trial < 40; ++trial) {
            Rng rng(trial_seed(0xB005, trial));
            Rational v = rng.velocity(), v2 = rng.velocity();
            REQUIRE(boost_compose(v, v2) == boost_via_coins(v, v2));
        }
    }
    SECTION("group laws") {
        for (unsigned trial = 0; trial < 25; ++trial) {
            Rng rng(trial_seed(0x6209, trial));
            Rational v = rng.velocity(), v2 = rng.velocity(), v3 = rng.velocity();
            REQUIRE(boost_compose(v, v2) == boost_compose(v2, v));
            REQUIRE(boost_compose(boost_compose(v, v2), v3) ==
                    boost_compose(v, boost_compose(v2, v3)));
            REQUIRE(boost_compose(v, -v) == rat(0));
        }
    }
    SECTION("coins") {
        CoinProcess c = coin_from_velocity(rat(1, 2));
        REQUIRE(c.p == rat(3, 4));
        REQUIRE(c.q == rat(1, 4));
        REQUIRE(c.velocity() == rat(1, 2));
        REQUIRE(c.process("x").weights() == Vec{rat(3, 4), rat(1, 4)});
        REQUIRE_THROWS_MATCHES((CoinProcess{rat(1), rat(-1)}.velocity()), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::SingularBoost);
                               }));
    }
}

TEST_CASE("complex embedding") {
    const ComplexWeight phase{rat(3, 5), rat(4, 5)};
    SECTION("embedding is a ring homomorphism") {
        for (unsigned trial = 0; trial < 12; ++trial) {
            Rng rng(trial_seed(0xE38D, trial));
            std::size_t n = 1 + rng.below(3);
            Mat re(n, n), im(n, n), re2(n, n), im2(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    re.at(i, j) = rng.rational();
                    im.at(i, j) = rng.rational();
                    re2.at(i, j) = rng.rational();
                    im2.at(i, j) = rng.rational();
                }
            ComplexMat m{re, im}, m2{re2, im2};
            REQUIRE(embed_complex_matrix(m) * embed_complex_matrix(m2) ==
                    embed_complex_matrix(complex_mat_product(m, m2)));
        }
    }
    SECTION("unit-phase multiples of orthogonal matrices embed orthogonally") {
        REQUIRE(is_unit(phase));
        Mat g = Mat::from_rows({{rat(3, 5), rat(-4, 5)}, {rat(4, 5), rat(3, 5)}});
        ComplexMat phased = complex_scale(phase, ComplexMat(g));
        REQUIRE(is_unitary(embed_complex_matrix(ComplexMat(g))));
        REQUIRE(is_unitary(embed_complex_matrix(phased)));
    }
    SECTION("vector embedding preserves the squared length") {
        Vec re{rat(3, 5), rat(0)}, im{rat(0), rat(4, 5)};
        Vec u = embed_complex_vector(re, im);
        REQUIRE(u == Vec{rat(3, 5), rat(0), rat(0), rat(4, 5)});
        Rational norm = 0;
        for (const Rational& x : u) norm += x * x;
        REQUIRE(norm == rat(1));
        REQUIRE_THROWS_MATCHES(embed_complex_vector({rat(1)}, {}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return kind_is(e, ErrorKind::DimMismatch);
                               }));
    }
    SECTION("a global unit phase is unobservable in probe records") {
        Mat g = Mat::from_rows({{rat(3, 5), rat(-4, 5)}, {rat(4, 5), rat(3, 5)}});
        Mat plain_gen = embed_complex_matrix(ComplexMat(g));
        Mat phased_gen = embed_complex_matrix(complex_scale(phase, ComplexMat(g)));
        Vec u = embed_complex_vector({rat(3, 5), rat(0)}, {rat(0), rat(4, 5)});
        std::vector<Probe> probes{partial_probe(1, embedded_block_map(2)),
                                  partial_probe(2, embedded_block_map(2))};
        PreparedChain plain = make_prepared_chain({plain_gen, plain_gen}, u);
        PreparedChain phased = make_prepared_chain({phased_gen, phased_gen}, u);
        Process plain_records = marginal(probe(plain, probes), {"r1", "r2"});
        Process phased_records = marginal(probe(phased, probes), {"r1", "r2"});
        REQUIRE(plain_records == phased_records);
        // the same holds for the textbook simulator on both generator sets
        REQUIRE(standard_records({plain_gen, plain_gen}, u, probes) ==
                standard_records({phased_gen, phased_gen}, u, probes));
    }
}

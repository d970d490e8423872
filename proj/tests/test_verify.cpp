// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <catch2/catch_amalgamated.hpp>

#include "linktheory/verify.hpp"

using namespace lks;

namespace {

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

}  // namespace

TEST_CASE("every suite passes a deterministic smoke run") {
    struct Run {
        const char* suite;
        std::size_t trials;
    };
    const Run runs[] = {
        {"born", 40},
        {"disconnect", 40},
        {"white-connection", 25},
        {"chain-equiv", 8},
        {"dynamical", 25},
        {"quantum-square", 10},
        {"product", 25},
        {"propriety", 10},
        {"boost", 40},
        {"complex", 40},
        {"measurement-oracle", 8},
        {"fig5", 8},
    };
    for (const Run& run : runs) {
        INFO(run.suite);
        SuiteReport rep = run_verify_suite(run.suite, run.trials, 0xC0FFEE);
        CAPTURE(rep.failures, rep.skipped,
                rep.witnesses.empty() ? std::string("-") : rep.witnesses[0].detail);
        REQUIRE(rep.ok());
        REQUIRE(rep.suite == run.suite);
        REQUIRE(rep.trials == run.trials);
        REQUIRE(rep.skipped < run.trials);
    }
}

TEST_CASE("reports are reproducible from the seed") {
    for (const std::string& suite : {"born", "disconnect", "chain-equiv", "boost"}) {
        INFO(suite);
        SuiteReport a = run_verify_suite(suite, 12, 99);
        SuiteReport b = run_verify_suite(suite, 12, 99);
        REQUIRE(a == b);
    }
}

TEST_CASE("degenerate trials are skipped and counted") {
    // Some born trials cancel the state trace on purpose; some disconnect
    // trials kill one marginal value. Both must land in `skipped`.
    SuiteReport born_rep = run_verify_suite("born", 60, 1);
    REQUIRE(born_rep.ok());
    REQUIRE(born_rep.skipped > 0);

    SuiteReport cut_rep = run_verify_suite("disconnect", 120, 1);
    REQUIRE(cut_rep.ok());
    REQUIRE(cut_rep.skipped > 0);
}

TEST_CASE("dims cap shrinks the sampled ranges without breaking suites") {
    for (const std::string& suite : {"born", "chain-equiv", "product", "propriety"}) {
        INFO(suite);
        SuiteReport rep = run_verify_suite(suite, 8, 5, 2);
        REQUIRE(rep.ok());
    }
}

TEST_CASE("unknown suite names are rejected") {
    REQUIRE_THROWS_MATCHES(run_verify_suite("bogus", 1, 0), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return kind_is(e, ErrorKind::ParseError); }));
    REQUIRE(verify_suite_names().size() == 12);
}

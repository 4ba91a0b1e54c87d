#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace cdparse;
using namespace testutil;

TEST_CASE("ambiguity is 1 at licensing, drops with deletions, 0 at uniqueness") {
    const Grammar& g = demo_grammar();
    ConstraintNetwork net = demo_network();
    CHECK(ambiguity_measure(net) == doctest::Approx(1.0).epsilon(1e-12));

    apply_unary(net, constraint(g, "det-precedes-head"));  // product 8 -> 4
    CHECK(ambiguity_measure(net) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    propagate(net, constraints_of(g, {Kind::Hard, Kind::Heuristic}));
    CHECK(check_status(net) == Status::Unique);
    CHECK(ambiguity_measure(net) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ambiguity of an initially unambiguous network is zero") {
    const Grammar& g = demo_grammar();
    auto net = license_domains(g, make_string_nodes(g, {"reads"}));
    CHECK(ambiguity_measure(net) == 0.0);
}

TEST_CASE("mean reliability over the deletion log") {
    std::vector<DeletionRecord> log;
    CHECK(mean_reliability(log) == 1.0);

    log.push_back({1, 0, {}, "a", 1.0});
    log.push_back({2, 0, {}, "b", 0.9});
    log.push_back({3, 0, {}, "c", 1.0});
    CHECK(mean_reliability(log) == doctest::Approx(0.96667).epsilon(1e-5));

    log.clear();
    log.push_back({1, 0, {}, "a", 0.5});
    CHECK(mean_reliability(log) == 0.5);
}

TEST_CASE("quality formula values") {
    CHECK(quality(1.0, 1.0) == 0.0);
    CHECK(quality(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(quality(0.5, 0.5) ==
          doctest::Approx(std::expm1(0.25) / std::expm1(1.0)).epsilon(1e-12));
    for (int i = 1; i <= 10; ++i) {
        CHECK(quality(1.0, i / 10.0) == 0.0);
    }
}

TEST_CASE("quality rejects arguments outside its domain") {
    CHECK_THROWS_AS((void)quality(-0.1, 0.5), Error);
    CHECK_THROWS_AS((void)quality(1.1, 0.5), Error);
    CHECK_THROWS_AS((void)quality(0.5, 0.0), Error);
    CHECK_THROWS_AS((void)quality(0.5, 1.1), Error);
}

TEST_CASE("quality is monotone: rising in r, falling in a") {
    const double h = 1e-6;
    for (int ai = 0; ai <= 10; ++ai) {
        for (int ri = 1; ri <= 10; ++ri) {
            double a = ai / 10.0;
            double r = ri / 10.0;
            // one-sided differences keep the probes inside the domain
            double dq_dr = (quality(a, r) - quality(a, r - h)) / h;
            double dq_da = ai == 10 ? (quality(a, r) - quality(a - h, r)) / h
                                    : (quality(a + h, r) - quality(a, r)) / h;
            double analytic_r = (1.0 - a) * std::exp(r * (1.0 - a)) / std::expm1(1.0);
            double analytic_a = -r * std::exp(r * (1.0 - a)) / std::expm1(1.0);
            CHECK(dq_dr == doctest::Approx(analytic_r).epsilon(1e-4));
            CHECK(dq_da == doctest::Approx(analytic_a).epsilon(1e-4));
            CHECK(dq_da < 0.0);
            if (a < 1.0) {
                CHECK(dq_dr > 0.0);
            } else {
                CHECK(dq_dr == doctest::Approx(0.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("trace CSV carries the exact header and six-decimal floats") {
    QualityTrace trace;
    trace.mode = RunMode::Contract;
    trace.samples.push_back({0, 0, 1.0, 1.0, 0.0});
    trace.samples.push_back({1, 12, 2.0 / 3.0, 1.0, 0.230237});
    std::string csv = trace_to_csv(trace);
    CHECK(csv == "step,elapsed_ms,a,r,q\n"
                 "0,0,1.000000,1.000000,0.000000\n"
                 "1,12,0.666667,1.000000,0.230237\n");
}

TEST_CASE("every recorded sample satisfies the q(a,r) identity") {
    auto result = run_contract(demo_grammar(), demo_nodes(), Budget::steps(3));
    for (const auto& s : result.trace.samples) {
        CHECK(s.q == doctest::Approx(quality(s.a, s.r)).epsilon(1e-12));
    }
}

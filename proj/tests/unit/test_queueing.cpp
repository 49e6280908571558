#include "rulopt/sim/queueing.hpp"

#include "mmc_oracle.hpp"
#include "rulopt/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace rulopt;
using namespace rulopt::sim;

TEST_CASE("service rate blends the two mean service times") {
    ServiceModel model{0.1, 0.2};
    CHECK(service_rate(0.0, model) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(service_rate(1.0, model) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(service_rate(0.5, model) == doctest::Approx(1.0 / 0.15).epsilon(1e-12));

    // Non-increasing in the dimmer.
    double prev = service_rate(0.0, model);
    for (int i = 1; i <= 20; ++i) {
        double next = service_rate(i / 20.0, model);
        CHECK(next <= prev + 1e-15);
        prev = next;
    }
}

TEST_CASE("erlang_c closed-form values") {
    CHECK(erlang_c(1, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(erlang_c(2, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(erlang_c(4, 0.01) < 1e-6);
    CHECK(erlang_c(3, 0.0) == 0.0);
}

TEST_CASE("erlang_c equals the offered load for a single server") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        double a = uniform01(rng) * 0.999;
        CHECK(erlang_c(1, a) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("erlang_c stays within [0,1] and rejects saturation") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        int c = 1 + static_cast<int>(uniform_index(rng, 16));
        double a = uniform01(rng) * (c - 1e-9);
        double p = erlang_c(c, a);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK_THROWS_AS(erlang_c(2, 2.0), SaturationError);
    CHECK_THROWS_AS(erlang_c(1, 1.0), SaturationError);
}

TEST_CASE("interval response time closed forms") {
    auto r1 = interval_response_time(0.5, 1.0, 1, 60.0);
    CHECK_FALSE(r1.saturated);
    CHECK(r1.seconds == doctest::Approx(2.0).epsilon(1e-12));

    auto r2 = interval_response_time(1.0, 1.0, 2, 60.0);
    CHECK_FALSE(r2.saturated);
    CHECK(r2.seconds == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    auto r3 = interval_response_time(5.0, 1.0, 2, 60.0);
    CHECK(r3.saturated);
    CHECK(r3.seconds == 60.0);
}

TEST_CASE("M/M/1 response time matches 1/(mu-lambda)") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        double mu = 0.5 + uniform01(rng) * 10.0;
        double lambda = uniform01(rng) * mu * 0.99;
        auto r = interval_response_time(lambda, mu, 1, 60.0);
        REQUIRE_FALSE(r.saturated);
        CHECK(std::fabs(r.seconds - 1.0 / (mu - lambda)) <= 1e-9 * (1.0 / (mu - lambda)));
    }
}

TEST_CASE("response time is non-increasing in the server count") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        double mu = 0.5 + uniform01(rng) * 5.0;
        double lambda = uniform01(rng) * mu * 0.95; // stable even at c=1
        double prev = interval_response_time(lambda, mu, 1, 60.0).seconds;
        for (int c = 2; c <= 8; ++c) {
            double next = interval_response_time(lambda, mu, c, 60.0).seconds;
            CHECK(next <= prev + 1e-12);
            CHECK(next >= 1.0 / mu - 1e-15);
            prev = next;
        }
    }
}

TEST_CASE("interval utility worked examples") {
    EconomicModel econ;
    econ.revenue_mandatory = 1.0;
    econ.revenue_optional = 1.5;
    econ.rt_threshold = 0.75;
    econ.server_cost = 0.1;
    econ.penalty = 0.5;

    // Healthy interval: served revenue at the blended rate minus cost.
    CHECK(interval_utility(10.0, 10.0, 2, 0, 0.5, 0.2, false, econ, 60.0) ==
          doctest::Approx(738.0).epsilon(1e-12));

    // No traffic: pure cost.
    CHECK(interval_utility(0.0, 10.0, 1, 0, 0.5, 0.1, false, econ, 60.0) ==
          doctest::Approx(-6.0).epsilon(1e-12));

    // Threshold missed: penalty branch.
    EconomicModel econ2 = econ;
    econ2.server_cost = 0.0;
    CHECK(interval_utility(10.0, 10.0, 1, 0, 0.5, 1.0, false, econ2, 60.0) ==
          doctest::Approx(-300.0).epsilon(1e-12));
}

TEST_CASE("booting servers are charged but serve nothing") {
    EconomicModel econ;
    double with_boot = interval_utility(5.0, 10.0, 2, 3, 0.0, 0.11, false, econ, 60.0);
    double without = interval_utility(5.0, 10.0, 2, 0, 0.0, 0.11, false, econ, 60.0);
    CHECK(without - with_boot == doctest::Approx(3 * econ.server_cost * 60.0).epsilon(1e-12));
}

TEST_CASE("an idle extra server costs exactly its rate") {
    EconomicModel econ;
    std::mt19937_64 rng(15);
    for (int i = 0; i < 50; ++i) {
        double mu = 5.0 + uniform01(rng) * 10.0;
        double lambda = uniform01(rng) * mu * 0.8; // R stays under threshold for both c and c+1
        int c = 1 + static_cast<int>(uniform_index(rng, 5));
        auto r_before = interval_response_time(lambda, mu, c, 60.0);
        auto r_after = interval_response_time(lambda, mu, c + 1, 60.0);
        if (r_before.saturated || r_before.seconds > econ.rt_threshold)
            continue;
        REQUIRE_FALSE(r_after.saturated);
        REQUIRE(r_after.seconds <= econ.rt_threshold);
        double u_before = interval_utility(lambda, mu, c, 0, 0.3, r_before.seconds, false, econ, 60.0);
        double u_after = interval_utility(lambda, mu, c + 1, 0, 0.3, r_after.seconds, false, econ, 60.0);
        CHECK(u_before - u_after == doctest::Approx(econ.server_cost * 60.0).epsilon(1e-9));
    }
}

TEST_CASE("analytic response time agrees with the discrete-event oracle") {
    // Spot check one cell here; the acceptance suite sweeps the full grid.
    double mu = 1.0;
    int c = 2;
    double rho = 0.6;
    double lambda = rho * c * mu;
    auto analytic = interval_response_time(lambda, mu, c, 600.0);
    auto oracle = rulopt::testing::simulate_mmc(lambda, mu, c, 80000, 4242, 8000);
    CHECK(std::fabs(analytic.seconds - oracle.mean_response) / analytic.seconds < 0.05);
}

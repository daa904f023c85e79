#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "dsrisk/counter_rng.hpp"
#include "dsrisk/error.hpp"
#include "dsrisk/oracle.hpp"
#include "dsrisk/risk.hpp"

using namespace dsrisk;
using namespace dsrisk::oracle;

TEST_CASE("nb_exact hand sums") {
    CHECK(std::abs(nb_exact(Confirmations(1), HashrateShare(0.1)) - 0.2) <= 1e-15);
    CHECK(std::abs(nb_exact(Confirmations(1), HashrateShare(0.26)) - 0.52) <= 1e-15);
    for (int j = 1; j <= 24; ++j) {
        const double q = 0.02 * j;
        CHECK(std::abs(nb_exact(Confirmations(1), HashrateShare(q)) - 2.0 * q) <= 1e-15);
    }
    CHECK(std::abs(nb_exact(Confirmations(6), HashrateShare(0.1)) -
                   catchup_time_free(Confirmations(6), HashrateShare(0.1))) <= 1e-10);
}

TEST_CASE("poisson_exact examples") {
    CHECK(std::abs(poisson_exact(Confirmations(3), HashrateShare(0.2), 0.0) - 0.015625) <= 1e-16);
    CHECK(std::abs(poisson_exact(Confirmations(1), HashrateShare(0.1), 0.9) - 0.19570) <= 5e-6);
    const double z4 = poisson_exact(Confirmations(4), HashrateShare(0.12), 0.88 * 2.0);
    CHECK(std::abs(100.0 * z4 - 2.87) <= 0.005);
    CHECK(std::abs(z4 - 0.02867742906073992) <= 1e-14);
    CHECK_THROWS_AS(poisson_exact(Confirmations(1), HashrateShare(0.1), -1.0), DomainError);
}

TEST_CASE("CounterRng is a pure function of seed, stream and position") {
    CounterRng a(99, 5);
    CounterRng b(99, 5);
    CounterRng other_stream(99, 6);
    CounterRng other_seed(100, 5);
    int same_stream = 0;
    int same_seed = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        same_stream += x == other_stream.next();
        same_seed += x == other_seed.next();
    }
    CHECK(same_stream == 0);
    CHECK(same_seed == 0);

    CounterRng u(1, 2);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 5 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST_CASE("PoissonSampler matches the Poisson pmf") {
    for (double mean : {0.0, 0.7, 5.0, 12.0, 29.9, 30.0, 45.0, 200.0}) {
        const PoissonSampler sampler(mean);
        constexpr int kDraws = 200000;
        std::vector<int> counts(static_cast<std::size_t>(mean + 20.0 * std::sqrt(mean) + 30.0), 0);
        double total = 0.0;
        double squares = 0.0;
        for (int i = 0; i < kDraws; ++i) {
            CounterRng rng(2024, static_cast<std::uint64_t>(i));
            const auto k = sampler(rng);
            total += static_cast<double>(k);
            squares += static_cast<double>(k) * static_cast<double>(k);
            if (k < counts.size()) ++counts[k];
        }
        const double sample_mean = total / kDraws;
        const double sample_var = squares / kDraws - sample_mean * sample_mean;
        CHECK(std::abs(sample_mean - mean) <= 5.0 * std::sqrt(std::max(mean, 1e-9) / kDraws) + 1e-12);
        if (mean > 0.0) {
            CHECK(std::abs(sample_var / mean - 1.0) < 0.03);
        }
        // Per-bin check against the exact pmf where the bin is well populated.
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const double pmf = std::exp(-mean + k * std::log(std::max(mean, 1e-300)) -
                                        std::lgamma(k + 1.0));
            const double expected = (mean == 0.0 ? (k == 0 ? 1.0 : 0.0) : pmf) * kDraws;
            if (expected >= 50.0) {
                CHECK(std::abs(counts[k] - expected) <= 5.0 * std::sqrt(expected));
            }
        }
    }
    CHECK_THROWS_AS(PoissonSampler(-1.0), DomainError);
}

TEST_CASE("simulate_race: negligible attacker never wins") {
    TrialConfig config;
    config.trials = 100000;
    config.seed = 3;
    for (double kappa : {0.0, 1.0, 3.5}) {
        config.mode = Timed{kappa};
        const auto outcome = simulate_race(Confirmations(6), HashrateShare(0.0001), config);
        CHECK(outcome.estimate == 0.0);
        CHECK(outcome.std_error == 0.0);
        CHECK(outcome.trials == 100000);
    }
}

TEST_CASE("simulate_race timed estimate brackets the closed form") {
    TrialConfig config;
    config.trials = 1000000;
    config.seed = 11;
    config.mode = Timed{0.9};
    const auto outcome = simulate_race(Confirmations(1), HashrateShare(0.1), config);
    CHECK(std::abs(outcome.estimate - 0.19570) <= 3.0 * outcome.std_error);
    CHECK(outcome.std_error ==
          std::sqrt(outcome.estimate * (1.0 - outcome.estimate) / static_cast<double>(config.trials)));
}

TEST_CASE("simulate_race time-free estimate brackets nb_exact") {
    TrialConfig config;
    config.trials = 1000000;
    config.seed = 12;
    config.mode = TimeFree{};
    const auto outcome = simulate_race(Confirmations(6), HashrateShare(0.1), config);
    const double exact = nb_exact(Confirmations(6), HashrateShare(0.1));
    CHECK(std::abs(outcome.estimate - exact) <= 3.0 * outcome.std_error);
}

TEST_CASE("simulate_race is deterministic under any thread count") {
    TrialConfig config;
    config.trials = 20001;
    config.seed = 77;
    config.mode = Timed{1.3};
    const auto reference = simulate_race(Confirmations(3), HashrateShare(0.2), config, 1);
    for (unsigned threads : {1u, 2u, 3u, 8u, 64u}) {
        CHECK(simulate_race(Confirmations(3), HashrateShare(0.2), config, threads) == reference);
    }
    config.mode = TimeFree{};
    const auto free_ref = simulate_race(Confirmations(3), HashrateShare(0.2), config, 1);
    CHECK(simulate_race(Confirmations(3), HashrateShare(0.2), config, 5) == free_ref);

    config.seed = 78;
    CHECK_FALSE(simulate_race(Confirmations(3), HashrateShare(0.2), config, 1) == free_ref);
}

TEST_CASE("deficit walk matches two-barrier gambler's ruin") {
    // kappa = 0 means no head start, so the race is the bare walk from z,
    // absorbed at 0 or max_deficit.
    struct Case { int z; double q; int barrier; };
    for (const Case c : {Case{3, 0.4, 10}, Case{1, 0.3, 2}, Case{5, 0.45, 60}, Case{2, 0.2, 40}}) {
        TrialConfig config;
        config.trials = 400000;
        config.seed = 2024;
        config.max_deficit = c.barrier;
        config.mode = Timed{0.0};
        const auto outcome = simulate_race(Confirmations(c.z), HashrateShare(c.q), config, 1);
        const double ratio = c.q / (1.0 - c.q);
        const double exact = (std::pow(ratio, c.z) - std::pow(ratio, c.barrier)) /
                             (1.0 - std::pow(ratio, c.barrier));
        const double se = std::sqrt(exact * (1.0 - exact) / config.trials);
        CAPTURE(c.z);
        CAPTURE(c.barrier);
        CHECK(std::abs(outcome.estimate - exact) <= 4.0 * se);
    }
}

TEST_CASE("simulate_race truncation bound") {
    TrialConfig config;
    config.trials = 10;
    for (int j = 1; j <= 13; ++j) {
        const double q = 0.02 * j;
        for (int z = 1; z <= 9; ++z) {
            const auto outcome = simulate_race(Confirmations(z), HashrateShare(q), config);
            CHECK(outcome.truncation_bias_bound == std::pow(q / (1.0 - q), 200.0 - z + 1.0));
            CHECK(outcome.truncation_bias_bound <= 1e-10);
        }
    }
    // A tight barrier is reported honestly.
    config.max_deficit = 5;
    const auto loose = simulate_race(Confirmations(2), HashrateShare(0.4), config);
    CHECK(loose.truncation_bias_bound == doctest::Approx(std::pow(0.4 / 0.6, 4.0)));
}

TEST_CASE("simulate_race argument validation") {
    TrialConfig config;
    config.trials = 0;
    CHECK_THROWS_AS(simulate_race(Confirmations(1), HashrateShare(0.1), config), DomainError);
    config.trials = 10;
    config.max_deficit = 3;
    CHECK_THROWS_AS(simulate_race(Confirmations(4), HashrateShare(0.1), config), DomainError);
    config.max_deficit = 200;
    config.mode = Timed{-0.5};
    CHECK_THROWS_AS(simulate_race(Confirmations(1), HashrateShare(0.1), config), DomainError);
}

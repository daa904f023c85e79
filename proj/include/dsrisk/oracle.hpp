#ifndef DSRISK_ORACLE_HPP
#define DSRISK_ORACLE_HPP

#include <cstdint>
#include <variant>

#include "dsrisk/counter_rng.hpp"
#include "dsrisk/risk.hpp"

namespace dsrisk::oracle {

/// Finite negative-binomial sum for the time-free catch-up probability:
/// the attacker mines k blocks (k < z) while the honest side mines z, then
/// must erase a deficit of z - k; k >= z wins outright.
double nb_exact(Confirmations z, HashrateShare share);

/// Same race when the honest z blocks took kappa times their expected
/// duration: the attacker's count is Poisson with mean kappa z q/p.
double poisson_exact(Confirmations z, HashrateShare share, double kappa);

struct Timed {
    double kappa;
};
struct TimeFree {};
using RaceMode = std::variant<Timed, TimeFree>;

struct TrialConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    int max_deficit = 200;
    RaceMode mode = TimeFree{};
};

struct RaceOutcome {
    double estimate;
    double std_error;
    std::uint64_t trials;
    std::uint64_t successes;
    /// Upper bound on the probability mass lost by declaring failure once
    /// the deficit reaches max_deficit: (q/p)^(max_deficit - z + 1).
    double truncation_bias_bound;

    friend bool operator==(const RaceOutcome&, const RaceOutcome&) = default;
};

/// Forward simulation of the race. Trial i draws from CounterRng(seed, i), so
/// the outcome is identical for any thread count. threads = 0 uses the
/// hardware concurrency.
RaceOutcome simulate_race(Confirmations z, HashrateShare share, const TrialConfig& config,
                          unsigned threads = 0);

/// Poisson variate generator: sequential-search inversion below mean 30,
/// transformed rejection with squeeze (PTRS) above.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean);

    std::uint64_t operator()(CounterRng& rng) const;

    double mean() const noexcept { return mean_; }

private:
    double mean_;
    double exp_neg_mean_;
    double log_mean_ = 0.0;
    double b_ = 0.0;
    double a_ = 0.0;
    double inv_alpha_ = 0.0;
    double v_r_ = 0.0;
};

}  // namespace dsrisk::oracle

#endif  // DSRISK_ORACLE_HPP

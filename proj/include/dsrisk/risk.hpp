#ifndef DSRISK_RISK_HPP
#define DSRISK_RISK_HPP

#include <optional>

namespace dsrisk {

/// Attacker share q of the total hashrate, 0 < q < 1/2. The honest share is
/// always derived as 1 - q.
class HashrateShare {
public:
    explicit HashrateShare(double q);

    double q() const noexcept { return q_; }
    double p() const noexcept { return 1.0 - q_; }

private:
    double q_;
};

/// Number of blocks z confirming a transaction, including the block that
/// contains it.
class Confirmations {
public:
    static constexpr int kMax = 100;

    explicit Confirmations(int z);

    int value() const noexcept { return z_; }

    friend bool operator==(Confirmations, Confirmations) = default;

private:
    int z_;
};

/// Observed confirmation time and the two dimensionless ratios derived from
/// it: r = t / (z tau0) against the network block period, and
/// kappa = (1 - q) r against the honest miners' expected time.
struct Timing {
    double t;
    double tau0;
    double r;
    double kappa;
};

inline constexpr double kDefaultBlockPeriod = 600.0;

Timing timing_from(double t, Confirmations z, HashrateShare share,
                   double tau0 = kDefaultBlockPeriod);

/// Probability that the attacker ever catches up z blocks, with no
/// information on how long the confirmations took: I_{4pq}(z, 1/2).
double catchup_time_free(Confirmations z, HashrateShare share);

/// Probability of catching up z blocks given the honest chain took kappa
/// times its expected duration:
///   1 - Q(z, kappa z q/p) + (q/p)^z exp(kappa z (p - q)/p) Q(z, kappa z).
double catchup_timed(Confirmations z, HashrateShare share, double kappa);

/// catchup_timed at kappa = (1 - q) r; the quantity printed in risk tables.
double table_probability(Confirmations z, HashrateShare share, double r);

/// Smallest z in [1, Confirmations::kMax] whose table probability at fixed r
/// is at most risk_target, or nullopt when none qualifies.
std::optional<Confirmations> min_confirmations(HashrateShare share, double r,
                                               double risk_target);

/// Clamp a computed probability into [0, 1]. Overshoot larger than 1e-12 is
/// reported as dsrisk::NumericalError rather than hidden.
double clamp_probability(double value);

}  // namespace dsrisk

#endif  // DSRISK_RISK_HPP

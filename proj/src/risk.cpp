#include "dsrisk/risk.hpp"

#include <cmath>
#include <string>

#include "dsrisk/error.hpp"
#include "dsrisk/specfun.hpp"

namespace dsrisk {
namespace {

constexpr double kClampTolerance = 1e-12;

void check_kappa(double kappa) {
    if (!std::isfinite(kappa) || kappa < 0.0) {
        throw DomainError("kappa must be finite and >= 0, got " + std::to_string(kappa));
    }
}

}  // namespace

HashrateShare::HashrateShare(double q) : q_(q) {
    if (!(q > 0.0 && q < 0.5)) {
        throw DomainError("hashrate share q must satisfy 0 < q < 1/2 (the model assumes an "
                          "honest majority), got " +
                          std::to_string(q));
    }
}

Confirmations::Confirmations(int z) : z_(z) {
    if (z < 1 || z > kMax) {
        throw DomainError("confirmations z must be in [1, " + std::to_string(kMax) + "], got " +
                          std::to_string(z));
    }
}

double clamp_probability(double value) {
    if (std::isnan(value) || value < -kClampTolerance || value > 1.0 + kClampTolerance) {
        throw NumericalError("probability out of [0, 1] beyond rounding: " +
                             std::to_string(value));
    }
    return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

Timing timing_from(double t, Confirmations z, HashrateShare share, double tau0) {
    if (!std::isfinite(t) || t < 0.0) {
        throw DomainError("elapsed time t must be finite and >= 0");
    }
    if (!std::isfinite(tau0) || tau0 <= 0.0) {
        throw DomainError("block period tau0 must be finite and > 0");
    }
    const double r = t / (z.value() * tau0);
    if (!std::isfinite(r)) {
        throw DomainError("pace ratio r = t / (z tau0) is not finite");
    }
    return {t, tau0, r, share.p() * r};
}

double catchup_time_free(Confirmations z, HashrateShare share) {
    return specfun::reg_inc_beta(4.0 * share.p() * share.q(), z.value(), 0.5);
}

double catchup_timed(Confirmations z, HashrateShare share, double kappa) {
    check_kappa(kappa);
    const double n = z.value();
    const double p = share.p();
    const double q = share.q();
    const double honest_work = kappa * n;
    const double attacker_mean = honest_work * q / p;

    // Attacker already ahead or level after the honest chain's z blocks.
    const double ahead = specfun::reg_gamma_pair(n, attacker_mean).lower;
    // Behind, then closes the deficit; both factors of the product live in
    // log space so large kappa z neither overflows nor underflows.
    const double log_behind = n * std::log(q / p) + honest_work * (p - q) / p +
                              specfun::log_reg_gamma_upper(n, honest_work);
    return clamp_probability(ahead + std::exp(log_behind));
}

double table_probability(Confirmations z, HashrateShare share, double r) {
    if (!std::isfinite(r) || r < 0.0) {
        throw DomainError("pace ratio r must be finite and >= 0");
    }
    return catchup_timed(z, share, share.p() * r);
}

std::optional<Confirmations> min_confirmations(HashrateShare share, double r,
                                               double risk_target) {
    if (!(risk_target > 0.0 && risk_target < 1.0)) {
        throw DomainError("risk target must lie in (0, 1)");
    }
    for (int z = 1; z <= Confirmations::kMax; ++z) {
        const Confirmations confirmations(z);
        if (table_probability(confirmations, share, r) <= risk_target) {
            return confirmations;
        }
    }
    return std::nullopt;
}

}  // namespace dsrisk

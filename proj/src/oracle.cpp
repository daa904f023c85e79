#include "dsrisk/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include "dsrisk/error.hpp"
#include "dsrisk/specfun.hpp"

namespace dsrisk::oracle {
namespace {

constexpr double kInversionLimit = 30.0;

// Bernoulli(q) walk on the attacker's deficit, absorbed at 0 (success) and
// at max_deficit (failure). A block of k steps that cannot reach either
// barrier (k <= d - 1 and d + k <= max_deficit - 1) only moves the deficit by
// k - 2B with B ~ Binomial(k, q), so such blocks are drawn in one inversion;
// the process is the same as stepping one block at a time.
class DeficitWalk {
public:
    static constexpr int kMaxBlock = 32;

    DeficitWalk(double q, int max_deficit) : max_deficit_(max_deficit) {
        const double p = 1.0 - q;
        for (int k = 1; k <= kMaxBlock; ++k) {
            auto& cdf = cdf_[k];
            double mass = std::pow(p, k);
            double total = 0.0;
            for (int j = 0; j <= k; ++j) {
                if (j > 0) {
                    mass *= (k - j + 1) * q / (j * p);
                }
                total += mass;
                cdf[j] = total;
            }
            cdf[k] = 1.0;
        }
    }

    bool succeeds(CounterRng& rng, int deficit) const {
        for (;;) {
            const int k = std::max(1, std::min({kMaxBlock, deficit - 1, max_deficit_ - 1 - deficit}));
            const auto& cdf = cdf_[k];
            const double u = rng.uniform();
            int attacker_blocks = 0;
            while (u > cdf[attacker_blocks]) {
                ++attacker_blocks;
            }
            deficit += k - 2 * attacker_blocks;
            if (deficit <= 0) return true;
            if (deficit >= max_deficit_) return false;
        }
    }

private:
    int max_deficit_;
    std::array<std::array<double, kMaxBlock + 1>, kMaxBlock + 1> cdf_{};
};

bool run_trial(CounterRng& rng, int z, double q, const PoissonSampler* attacker_count,
               const DeficitWalk& walk) {
    std::uint64_t mined = 0;
    if (attacker_count != nullptr) {
        mined = (*attacker_count)(rng);
    } else {
        for (int honest = 0; honest < z;) {
            if (rng.uniform() < q) {
                ++mined;
            } else {
                ++honest;
            }
        }
    }
    if (mined >= static_cast<std::uint64_t>(z)) {
        return true;
    }
    return walk.succeeds(rng, z - static_cast<int>(mined));
}

}  // namespace

double nb_exact(Confirmations z, HashrateShare share) {
    const int n = z.value();
    const double p = share.p();
    const double q = share.q();
    const double log_ratio = std::log(q / p);
    // P(attacker has exactly k blocks when honest reaches z) by recurrence
    // from k = 0: C(z+k-1, k) p^z q^k.
    double mass = std::pow(p, n);
    double caught_up = 0.0;
    double behind = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k > 0) {
            mass *= q * (n + k - 1) / k;
        }
        behind += mass;
        caught_up += mass * std::exp((n - k) * log_ratio);
    }
    return clamp_probability(caught_up + (1.0 - behind));
}

double poisson_exact(Confirmations z, HashrateShare share, double kappa) {
    if (!std::isfinite(kappa) || kappa < 0.0) {
        throw DomainError("kappa must be finite and >= 0");
    }
    const int n = z.value();
    const double p = share.p();
    const double q = share.q();
    const double log_ratio = std::log(q / p);
    const double mean = kappa * n * q / p;

    double behind = 0.0;
    double caught_up = 0.0;
    if (mean == 0.0) {
        behind = 1.0;
        caught_up = std::exp(n * log_ratio);
    } else {
        const double log_mean = std::log(mean);
        double log_mass = -mean;
        for (int k = 0; k < n; ++k) {
            if (k > 0) {
                log_mass += log_mean - std::log(static_cast<double>(k));
            }
            behind += std::exp(log_mass);
            caught_up += std::exp(log_mass + (n - k) * log_ratio);
        }
    }
    return clamp_probability(caught_up + (1.0 - behind));
}

PoissonSampler::PoissonSampler(double mean) : mean_(mean), exp_neg_mean_(std::exp(-mean)) {
    if (!std::isfinite(mean) || mean < 0.0) {
        throw DomainError("Poisson mean must be finite and >= 0");
    }
    if (mean >= kInversionLimit) {
        // Hoermann (1993), PTRS constants.
        const double root = std::sqrt(mean);
        log_mean_ = std::log(mean);
        b_ = 0.931 + 2.53 * root;
        a_ = -0.059 + 0.02483 * b_;
        inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
        v_r_ = 0.9277 - 3.6224 / (b_ - 2.0);
    }
}

std::uint64_t PoissonSampler::operator()(CounterRng& rng) const {
    if (mean_ < kInversionLimit) {
        const double u = rng.uniform();
        std::uint64_t k = 0;
        double mass = exp_neg_mean_;
        double cdf = mass;
        // The cap only matters when u lands above the rounded total mass.
        const double cap = mean_ + 40.0 * std::sqrt(mean_) + 40.0;
        while (u > cdf && static_cast<double>(k) < cap) {
            ++k;
            mass *= mean_ / static_cast<double>(k);
            cdf += mass;
        }
        return k;
    }
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a_ / us + b_) * u + mean_ + 0.43);
        if (us >= 0.07 && v <= v_r_) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_) <=
            -mean_ + k * log_mean_ - specfun::ln_gamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

RaceOutcome simulate_race(Confirmations z, HashrateShare share, const TrialConfig& config,
                          unsigned threads) {
    if (config.trials == 0) {
        throw DomainError("simulate_race: trials must be >= 1");
    }
    if (config.max_deficit < z.value()) {
        throw DomainError("simulate_race: max_deficit must be >= z");
    }
    const int n = z.value();
    const double q = share.q();

    std::optional<PoissonSampler> attacker_count;
    if (const auto* timed = std::get_if<Timed>(&config.mode)) {
        if (!std::isfinite(timed->kappa) || timed->kappa < 0.0) {
            throw DomainError("simulate_race: kappa must be finite and >= 0");
        }
        attacker_count.emplace(timed->kappa * n * q / share.p());
    }
    const PoissonSampler* sampler = attacker_count ? &*attacker_count : nullptr;
    const DeficitWalk walk(q, config.max_deficit);

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, config.trials));

    auto count_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t successes = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            CounterRng rng(config.seed, i);
            successes += run_trial(rng, n, q, sampler, walk) ? 1 : 0;
        }
        return successes;
    };

    std::uint64_t successes = 0;
    if (threads == 1) {
        successes = count_range(0, config.trials);
    } else {
        std::vector<std::uint64_t> partial(threads, 0);
        std::vector<std::thread> workers;
        workers.reserve(threads);
        const std::uint64_t chunk = config.trials / threads;
        const std::uint64_t extra = config.trials % threads;
        std::uint64_t begin = 0;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t end = begin + chunk + (t < extra ? 1 : 0);
            workers.emplace_back([&, t, begin, end] { partial[t] = count_range(begin, end); });
            begin = end;
        }
        for (auto& worker : workers) {
            worker.join();
        }
        for (std::uint64_t part : partial) {
            successes += part;
        }
    }

    const double trials = static_cast<double>(config.trials);
    const double estimate = static_cast<double>(successes) / trials;
    return RaceOutcome{
        .estimate = estimate,
        .std_error = std::sqrt(estimate * (1.0 - estimate) / trials),
        .trials = config.trials,
        .successes = successes,
        .truncation_bias_bound =
            std::pow(q / share.p(), static_cast<double>(config.max_deficit - n + 1)),
    };
}

}  // namespace dsrisk::oracle

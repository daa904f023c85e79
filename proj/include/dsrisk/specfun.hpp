#ifndef DSRISK_SPECFUN_HPP
#define DSRISK_SPECFUN_HPP

///
/// \file specfun.hpp
///
/// Log-gamma, regularized incomplete gamma and regularized incomplete beta
/// functions in double precision. All functions are pure and throw
/// dsrisk::DomainError on arguments outside their domain.
///

namespace dsrisk::specfun {

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b), evaluated
/// without cancellation when one argument is large.
double ln_beta(double a, double b);

/// Lower and upper regularized incomplete gamma, P(a,x) + Q(a,x) = 1.
/// The smaller of the two is computed directly; the other is its complement.
struct GammaPair {
    double lower;
    double upper;
};

GammaPair reg_gamma_pair(double a, double x);

/// Q(a, x) = Gamma(a, x) / Gamma(a).
double reg_gamma_upper(double a, double x);

/// P(a, x) = gamma(a, x) / Gamma(a).
double reg_gamma_lower(double a, double x);

/// ln Q(a, x). Stays finite where Q itself underflows (large x).
double log_reg_gamma_upper(double a, double x);

/// I_x(a, b), the regularized incomplete beta function. x may overshoot
/// [0, 1] by at most 1e-12 and is clamped.
double reg_inc_beta(double x, double a, double b);

}  // namespace dsrisk::specfun

#endif  // DSRISK_SPECFUN_HPP

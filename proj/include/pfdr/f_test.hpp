#pragma once

#include <span>
#include <vector>

#include "pfdr/numerics.hpp"
#include "pfdr/pfdr_core.hpp"

namespace pfdr {

// Per-observation effect bound delta > 0 and covariate count p >= 1 for a
// fixed-design regression F-test. The noncentrality (n + p) delta^2 is
// derived on demand.
class FEffect {
public:
    FEffect(double delta, long p);

    double delta() const noexcept { return delta_; }
    long p() const noexcept { return p_; }

private:
    double delta_;
    long p_;
};

/// K(p, n, delta): supremum of the noncentral-to-central F density ratio at
/// the largest noncentrality the effect bound allows.
double lr_sup_f(long p, long n, double delta, const numerics::SeriesPolicy& policy = {});

/// M_p(t) = sum_k Gamma(p/2) (t^2/4)^k / (k! Gamma(k + p/2)).
double m_p(long p, double t);

// Asymptotic sizes for small delta and many covariates. quadratic is the
// exact root that the three limiting branches approximate.
struct LargePBranches {
    double small_delta2p = 0.0;    // delta^2 p -> 0
    double large_delta2p = 0.0;    // delta^2 p -> infinity
    double finite_delta2p = 0.0;   // delta^2 p -> L, with L = delta^2 p
    double quadratic = 0.0;
};

LargePBranches f_large_p_branches(long p, double delta, double log_q);

/// Sizing thresholds for picking the recommended asymptotic regime.
struct FRegimeThresholds {
    double c_min_delta2p = 10.0;
    double c_min_delta = 0.1;
    long a_max_p = 50;
    double a_max_delta = 0.05;
};

Regime select_f_regime(const FEffect& effect, const FRegimeThresholds& thresholds = {});

PlanReport plan_f(const PfdrTarget& target, const FEffect& effect, long n_max = kDefaultNMax,
                  const FRegimeThresholds& thresholds = {});

/// Smallest delta satisfying the design constraint: the square root of the
/// largest running mean of (beta^T x_k)^2 / sigma^2 over the design rows.
double effect_bound_from_design(const std::vector<std::vector<double>>& design,
                                std::span<const double> beta, double sigma);

}  // namespace pfdr

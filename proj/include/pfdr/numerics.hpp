#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

namespace pfdr::numerics {

// Controls truncation of the positive series used by the likelihood-ratio
// suprema. rel_tol must lie in (0, 1e-6] and max_terms must be >= 1000.
struct SeriesPolicy {
    double rel_tol = 1e-14;
    std::size_t max_terms = 1'000'000;
    bool log_domain = false;

    void validate() const;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// psi(x) = Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

/// psi'(x) for x > 0.
double trigamma(double x);

/// ln I0(|t|). Evaluated in log space so large |t| does not overflow.
double bessel_i0_log(double t);

/// I1(t)/I0(t); odd in t, bounded by 1 in magnitude.
double bessel_i1_i0_ratio(double t);

// Yields ln(term_k) for k = 0, 1, 2, ... in order; std::nullopt marks the end
// of a finitely supported series. -infinity is a zero term.
using LogTermGenerator = std::function<std::optional<double>(std::size_t)>;

/// ln of the sum of a nonnegative, unimodal-then-decaying series.
///
/// Stops once the running term is below rel_tol times the partial sum and the
/// terms have started to decrease (so the Poisson-like bulk past the mode is
/// never cut off). Throws NonConvergenceError when max_terms is exhausted.
double log_sum_series(const LogTermGenerator& log_term, const SeriesPolicy& policy = {});

/// exp(log_sum_series(...)).
double sum_series(const LogTermGenerator& log_term, const SeriesPolicy& policy = {});

struct RootDomain {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

/// Solves f(x) = target for strictly increasing f on [domain.lower, domain.upper).
///
/// The upper bracket grows by doubling from lower + bracket_hint; a finite
/// upper bound is approached no closer than a relative 1e-12. The bracket is
/// then refined to full double precision.
///
/// Throws RangeError when f(lower) > target or the doubling runs off to
/// infinity, and BracketError when a finite upper bound is reached first.
double find_root_increasing(const std::function<double(double)>& f, double target,
                            double bracket_hint, RootDomain domain = {});

struct Maximum {
    double argmax = 0.0;
    double value = 0.0;
};

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
Maximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                double x_tol = 1e-12);

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod quadrature; infinite bounds allowed.
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12);

}  // namespace pfdr::numerics

#include "pfdr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "pfdr/error.hpp"

namespace pfdr::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Power series I0(t) = sum (t^2/4)^k / (k!)^2, all terms positive.
double i0_series(double t) {
    const double q = 0.25 * t * t;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// I1(t) = sum (t/2)^(2k+1) / (k! (k+1)!).
double i1_series(double t) {
    const double q = 0.25 * t * t;
    double term = 0.5 * t;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel expansion factor: I_nu(t) ~ e^t / sqrt(2 pi t) * factor, t large.
double bessel_i_asymptotic_factor(int nu, double t) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double previous = kInf;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * t);
        if (std::abs(term) >= previous) break;  // asymptotic series started to diverge
        sum += term;
        previous = std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

constexpr double kBesselSeriesLimit = 20.0;

}  // namespace

void SeriesPolicy::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) {
        throw DomainError("SeriesPolicy.rel_tol must lie in (0, 1e-6]");
    }
    if (max_terms < 1000) {
        throw DomainError("SeriesPolicy.max_terms must be at least 1000");
    }
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
    return boost::math::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma requires x > 0");
    return boost::math::digamma(x);
}

double trigamma(double x) {
    if (!(x > 0.0)) throw DomainError("trigamma requires x > 0");
    return boost::math::trigamma(x);
}

double bessel_i0_log(double t) {
    const double a = std::abs(t);
    if (a <= kBesselSeriesLimit) return std::log(i0_series(a));
    return a - 0.5 * std::log(2.0 * std::numbers::pi * a) +
           std::log(bessel_i_asymptotic_factor(0, a));
}

double bessel_i1_i0_ratio(double t) {
    const double a = std::abs(t);
    double ratio;
    if (a <= kBesselSeriesLimit) {
        ratio = i1_series(a) / i0_series(a);
    } else {
        ratio = bessel_i_asymptotic_factor(1, a) / bessel_i_asymptotic_factor(0, a);
    }
    return t < 0 ? -ratio : ratio;
}

double log_sum_series(const LogTermGenerator& log_term, const SeriesPolicy& policy) {
    policy.validate();
    const double log_tol = std::log(policy.rel_tol);

    // Linear accumulation until a term falls outside the comfortable double
    // range, then (or when forced) a streaming log-sum-exp with running max.
    bool in_log = policy.log_domain;
    double linear_sum = 0.0;
    double max_log = -kInf;
    double scaled_sum = 0.0;  // sum of exp(l - max_log)
    double previous = -kInf;
    bool decreasing = false;

    auto current_log_sum = [&]() {
        if (in_log) return max_log + std::log(scaled_sum);
        return std::log(linear_sum);
    };

    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        const std::optional<double> next = log_term(k);
        if (!next) return current_log_sum();
        const double l = *next;
        if (std::isnan(l)) throw NonConvergenceError("series term is NaN at index " + std::to_string(k));

        if (!in_log && std::abs(l) > 600.0 && l != -kInf) {
            in_log = true;
            if (linear_sum > 0.0) {
                max_log = std::log(linear_sum);
                scaled_sum = 1.0;
            }
        }
        if (in_log) {
            if (l > max_log) {
                scaled_sum = scaled_sum * std::exp(max_log - l) + 1.0;
                max_log = l;
            } else if (l != -kInf) {
                scaled_sum += std::exp(l - max_log);
            }
        } else {
            linear_sum += std::exp(l);
        }

        if (l < previous) decreasing = true;
        previous = l;
        const double log_sum = current_log_sum();
        if (decreasing && (l == -kInf || l < log_tol + log_sum)) return log_sum;
    }
    throw NonConvergenceError("series did not converge within " + std::to_string(policy.max_terms) +
                              " terms");
}

double sum_series(const LogTermGenerator& log_term, const SeriesPolicy& policy) {
    return std::exp(log_sum_series(log_term, policy));
}

double find_root_increasing(const std::function<double(double)>& f, double target,
                            double bracket_hint, RootDomain domain) {
    if (!(bracket_hint > 0.0)) throw DomainError("bracket_hint must be positive");
    if (!(domain.lower < domain.upper)) throw DomainError("root domain is empty");
    if (std::isnan(target)) throw DomainError("target is NaN");

    const double tol = 1e-10 * (1.0 + std::abs(target));
    double lo = domain.lower;
    double f_lo = f(lo);
    if (std::isfinite(f_lo) && std::abs(f_lo - target) <= 0.0) return lo;
    if (f_lo > target) throw RangeError("target lies below the range of f on its domain");

    const bool finite_upper = std::isfinite(domain.upper);
    const double cap = finite_upper ? domain.upper - 1e-12 * std::max(1.0, std::abs(domain.upper))
                                    : kInf;
    double step = bracket_hint;
    double hi = lo + step;
    double f_hi;
    for (;;) {
        if (hi >= cap) hi = cap;
        f_hi = f(hi);
        if (std::isnan(f_hi)) throw BracketError("f is NaN inside the declared domain");
        if (f_hi >= target) break;
        if (hi == cap) {
            throw BracketError("bracket doubling reached the domain bound without crossing target");
        }
        lo = hi;
        f_lo = f_hi;
        step *= 2.0;
        hi = lo + step;
        if (!std::isfinite(hi) || hi > 1e300) {
            throw RangeError("target lies above the range of f");
        }
    }
    if (std::abs(f_hi - target) <= 0.0) return hi;

    std::uintmax_t max_iter = 400;
    auto g = [&](double x) { return f(x) - target; };
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, f_lo - target, f_hi - target, boost::math::tools::eps_tolerance<double>(52),
        max_iter);
    const double ga = g(a);
    const double gb = g(b);
    const double x = std::abs(ga) <= std::abs(gb) ? a : b;
    const double residual = std::min(std::abs(ga), std::abs(gb));
    if (!(residual <= tol)) {
        // Steep f: the bracket is at full precision but the residual is not
        // representable below tol. Accept when the bracket is ulp-tight.
        if (std::abs(b - a) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            throw NonConvergenceError("root refinement did not reach tolerance");
        }
    }
    return x;
}

Maximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                double x_tol) {
    if (!(lo < hi)) throw DomainError("golden-section interval is empty");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > x_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

Integral integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 20, rel_tol, &error, &l1);
    if (!std::isfinite(value)) throw QuadratureError("quadrature produced a non-finite value");
    return {value, error};
}

}  // namespace pfdr::numerics

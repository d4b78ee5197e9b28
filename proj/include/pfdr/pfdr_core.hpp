#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace pfdr {

// Target pFDR level alpha and false-null proportion pi, both in (0, 1).
class PfdrTarget {
public:
    PfdrTarget(double alpha, double pi);

    double alpha() const noexcept { return alpha_; }
    double pi() const noexcept { return pi_; }

    /// Q = (1 - alpha)(1 - pi) / (alpha pi): the level rho_n must reach.
    double q() const noexcept { return (1.0 - alpha_) * (1.0 - pi_) / (alpha_ * pi_); }

private:
    double alpha_;
    double pi_;
};

// n -> rho_n, the supremum of the false-null to true-null density ratio for a
// statistic built from n observations. eval must be safe to call concurrently.
struct LrSupCurve {
    std::function<double(long)> eval;
    bool monotone_checked = false;
};

enum class Regime {
    Theorem2_1,     // normal t, fixed SNR
    Corollary2_1,   // normal t, SNR mixture
    FRegimeA,       // F, small delta, moderate p
    FRegimeB,       // F, small delta, large p
    FRegimeC,       // F, fixed delta, large p
    Theorem4_1,     // general Studentized t
    Theorem5_1,     // Studentized score test
};

std::string to_string(Regime regime);

struct PlanReport {
    std::optional<long> n_exact;
    double n_asymptotic = 0.0;
    Regime regime = Regime::Theorem2_1;
    double q_value = 1.0;
    std::map<std::string, double> diagnostics;
    std::map<std::string, std::string> notes;
};

inline constexpr long kDefaultNMax = 10'000'000;

double q_threshold(const PfdrTarget& target);

/// (1 - pi) / (1 - pi + pi rho): the smallest pFDR any rejection rule can reach.
double min_pfdr(double pi, double rho);

enum class SearchMode { Bracketed, LinearScan };

struct SearchResult {
    long n = 0;
    double rho_at_n = 0.0;
    double rho_below = 0.0;  // rho_{n-1}; 0 when n == 1
    bool monotone_checked = false;
    long evaluations = 0;
};

/// Smallest n in [1, n_max] with rho_n >= Q.
///
/// Bracketed mode doubles n until the crossing is passed, bisects, then checks
/// rho_{n-1} < Q <= rho_n locally. If that check fails it falls back to a
/// linear scan from 1 and reports monotone_checked = false.
SearchResult min_n_search(const LrSupCurve& curve, double q, long n_max = kDefaultNMax,
                          SearchMode mode = SearchMode::Bracketed);

/// Same search, packaged as a PlanReport with n_exact and q_value filled in.
PlanReport min_n_search(const LrSupCurve& curve, const PfdrTarget& target,
                        long n_max = kDefaultNMax, SearchMode mode = SearchMode::Bracketed);

}  // namespace pfdr

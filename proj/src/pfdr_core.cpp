#include "pfdr/pfdr_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "pfdr/error.hpp"

namespace pfdr {

PfdrTarget::PfdrTarget(double alpha, double pi) : alpha_(alpha), pi_(pi) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::Theorem2_1: return "THEOREM_2_1";
        case Regime::Corollary2_1: return "COROLLARY_2_1";
        case Regime::FRegimeA: return "REGIME_A";
        case Regime::FRegimeB: return "REGIME_B";
        case Regime::FRegimeC: return "REGIME_C";
        case Regime::Theorem4_1: return "THEOREM_4_1";
        case Regime::Theorem5_1: return "THEOREM_5_1";
    }
    return "UNKNOWN";
}

double q_threshold(const PfdrTarget& target) { return target.q(); }

double min_pfdr(double pi, double rho) {
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
    if (!(rho >= 1.0)) throw DomainError("rho must be at least 1");
    return (1.0 - pi) / (1.0 - pi + pi * rho);
}

namespace {

SearchResult linear_scan(const LrSupCurve& curve, double q, long n_max, long evaluations) {
    double previous = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        const double rho = curve.eval(n);
        ++evaluations;
        if (rho >= q) return {n, rho, previous, false, evaluations};
        previous = rho;
    }
    std::ostringstream msg;
    msg << "pFDR target not attainable for n <= " << n_max << " (rho_n_max = " << previous
        << ", Q = " << q << ")";
    throw NotAttainableError(msg.str(), previous, n_max);
}

}  // namespace

SearchResult min_n_search(const LrSupCurve& curve, double q, long n_max, SearchMode mode) {
    if (!curve.eval) throw DomainError("curve has no evaluator");
    if (n_max < 1) throw DomainError("n_max must be positive");
    if (mode == SearchMode::LinearScan) return linear_scan(curve, q, n_max, 0);

    long evaluations = 0;
    std::vector<std::pair<long, double>> seen;
    auto rho = [&](long n) {
        ++evaluations;
        const double value = curve.eval(n);
        seen.emplace_back(n, value);
        return value;
    };

    // Exponential bracketing: find hi with rho_hi >= q, lo < hi with rho_lo < q.
    long lo = 0;
    long hi = 1;
    double rho_hi = rho(hi);
    while (rho_hi < q) {
        if (hi == n_max) {
            std::ostringstream msg;
            msg << "pFDR target not attainable for n <= " << n_max << " (rho_n_max = " << rho_hi
                << ", Q = " << q << ")";
            throw NotAttainableError(msg.str(), rho_hi, n_max);
        }
        lo = hi;
        hi = (hi > n_max / 2) ? n_max : 2 * hi;
        rho_hi = rho(hi);
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        const double rho_mid = rho(mid);
        if (rho_mid >= q) {
            hi = mid;
            rho_hi = rho_mid;
        } else {
            lo = mid;
        }
    }

    const double rho_below = hi > 1 ? rho(hi - 1) : 0.0;

    // Every sampled point must be consistent with a nondecreasing curve;
    // otherwise the bisection answer cannot be trusted.
    std::sort(seen.begin(), seen.end());
    bool monotone = true;
    for (std::size_t i = 1; i < seen.size(); ++i) {
        if (seen[i].second < seen[i - 1].second) monotone = false;
    }
    if (monotone && (hi == 1 || rho_below < q)) {
        return {hi, rho_hi, rho_below, true, evaluations};
    }
    return linear_scan(curve, q, n_max, evaluations);
}

PlanReport min_n_search(const LrSupCurve& curve, const PfdrTarget& target, long n_max,
                        SearchMode mode) {
    const SearchResult found = min_n_search(curve, target.q(), n_max, mode);
    PlanReport report;
    report.n_exact = found.n;
    report.q_value = target.q();
    report.diagnostics["rho_at_n_exact"] = found.rho_at_n;
    if (found.n > 1) report.diagnostics["rho_below_n_exact"] = found.rho_below;
    report.diagnostics["monotone_checked"] = found.monotone_checked ? 1.0 : 0.0;
    report.diagnostics["curve_evaluations"] = static_cast<double>(found.evaluations);
    return report;
}

}  // namespace pfdr

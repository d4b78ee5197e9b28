#include "pfdr/normal_t.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "pfdr/error.hpp"

namespace pfdr {

SnrEffect::SnrEffect(double r) : r_(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("SNR r must be positive and finite");
}

SnrMixture::SnrMixture(Kind kind, std::vector<SnrAtom> atoms, double scale, std::string description)
    : kind_(kind), atoms_(std::move(atoms)), scale_(scale), description_(std::move(description)) {}

SnrMixture SnrMixture::discrete(std::vector<SnrAtom> atoms, double scale) {
    if (atoms.empty()) throw DomainError("SNR mixture needs at least one atom");
    if (!(scale > 0.0)) throw DomainError("SNR mixture scale must be positive");
    double total = 0.0;
    for (const SnrAtom& atom : atoms) {
        if (!(atom.r > 0.0)) throw DomainError("SNR mixture atoms must be strictly positive");
        if (!(atom.weight > 0.0)) throw DomainError("SNR mixture weights must be strictly positive");
        total += atom.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("SNR mixture weights must sum to 1");
    std::ostringstream desc;
    desc << "discrete(" << atoms.size() << " atoms)";
    return SnrMixture(Kind::Discrete, std::move(atoms), scale, desc.str());
}

SnrMixture SnrMixture::gamma(double shape, double scale_parameter, double scale) {
    if (!(shape > 0.0) || !(scale_parameter > 0.0)) {
        throw DomainError("gamma mixture needs positive shape and scale");
    }
    if (!(scale > 0.0)) throw DomainError("SNR mixture scale must be positive");

    // Composite Gauss-Legendre over the central 1 - 1e-10 of the law, taken in
    // s = ln r. There r g(r) is smooth for every shape, including shape < 1
    // where g itself is unbounded at the origin.
    constexpr double kCoverageGap = 1e-10;
    constexpr int kPanels = 16;
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const boost::math::gamma_distribution<double> dist(shape, scale_parameter);
    const double s_lo = std::log(boost::math::quantile(dist, 0.5 * kCoverageGap));
    const double s_hi = std::log(boost::math::quantile(boost::math::complement(dist, 0.5 * kCoverageGap)));
    const double panel = (s_hi - s_lo) / kPanels;

    std::vector<SnrAtom> atoms;
    atoms.reserve(kPanels * 30);
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    auto add = [&](double s, double weight) {
        const double r = std::exp(s);
        const double mass = weight * r * boost::math::pdf(dist, r);
        if (mass > 0.0) atoms.push_back({r, mass});
    };
    for (int p = 0; p < kPanels; ++p) {
        const double mid = s_lo + (p + 0.5) * panel;
        const double half = 0.5 * panel;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                add(mid, w[i] * half);
            } else {
                add(mid - half * x[i], w[i] * half);
                add(mid + half * x[i], w[i] * half);
            }
        }
    }
    double total = 0.0;
    for (const SnrAtom& atom : atoms) total += atom.weight;
    for (SnrAtom& atom : atoms) atom.weight /= total;

    std::ostringstream desc;
    desc << "gamma(shape=" << shape << ", scale=" << scale_parameter << ") discretized into "
         << atoms.size() << " atoms";
    return SnrMixture(Kind::Parametric, std::move(atoms), scale, desc.str());
}

double SnrMixture::mgf(double a) const {
    double sum = 0.0;
    for (const SnrAtom& atom : atoms_) sum += atom.weight * std::exp(a * atom.r);
    return sum;
}

double lr_sup_t(long n, SnrEffect r, const numerics::SeriesPolicy& policy) {
    if (n < 1) throw DomainError("lr_sup_t requires n >= 1");
    const double nd = static_cast<double>(n);
    const double delta = std::sqrt(nd + 1.0) * r.r();
    const double log_base = std::log(std::sqrt(2.0) * delta);

    // ln a_{n,k} runs on two interleaved chains: a_{n,k} = a_{n,k-2} (n+k-1)/2.
    double log_a_prev = 0.0;  // ln a_{n,k-1}
    double log_a_prev2 = 0.0; // ln a_{n,k-2}
    double log_factorial = 0.0;
    const double log_a1 = numerics::log_gamma(0.5 * (nd + 2.0)) - numerics::log_gamma(0.5 * (nd + 1.0));

    auto term = [&](std::size_t k) -> std::optional<double> {
        double log_a;
        if (k == 0) {
            log_a = 0.0;
        } else if (k == 1) {
            log_a = log_a1;
        } else {
            log_a = log_a_prev2 + std::log(0.5 * (nd + static_cast<double>(k) - 1.0));
        }
        if (k > 0) log_factorial += std::log(static_cast<double>(k));
        log_a_prev2 = log_a_prev;
        log_a_prev = log_a;
        return log_a + static_cast<double>(k) * log_base - log_factorial;
    };
    return std::exp(-0.5 * delta * delta + numerics::log_sum_series(term, policy));
}

PlanReport plan_t(const PfdrTarget& target, SnrEffect r, long n_max) {
    const LrSupCurve curve{[r](long n) { return lr_sup_t(n, r); }, false};
    PlanReport report = min_n_search(curve, target, n_max);
    report.regime = Regime::Theorem2_1;
    report.n_asymptotic = std::log(target.q()) / r.r();
    report.diagnostics["snr"] = r.r();
    report.diagnostics["log_q"] = std::log(target.q());
    return report;
}

double lr_sup_t_mixture(long n, const SnrMixture& mixture) {
    double sum = 0.0;
    for (const SnrAtom& atom : mixture.atoms()) {
        sum += atom.weight * lr_sup_t(n, SnrEffect(mixture.scale() * atom.r));
    }
    return sum;
}

PlanReport plan_t_mixture(const PfdrTarget& target, const SnrMixture& mixture, long n_max) {
    const LrSupCurve curve{[&mixture](long n) { return lr_sup_t_mixture(n, mixture); }, false};
    PlanReport report = min_n_search(curve, target, n_max);
    report.regime = Regime::Corollary2_1;

    const double q = target.q();
    double a_star;
    const auto& atoms = mixture.atoms();
    if (atoms.size() == 1) {
        a_star = std::log(q) / atoms.front().r;
    } else {
        double mean = 0.0;
        for (const SnrAtom& atom : atoms) mean += atom.weight * atom.r;
        a_star = numerics::find_root_increasing([&mixture](double a) { return mixture.mgf(a); }, q,
                                                1.0 / mean);
    }
    report.n_asymptotic = a_star / mixture.scale();
    report.diagnostics["mgf_inverse_at_q"] = a_star;
    report.diagnostics["scale"] = mixture.scale();
    report.diagnostics["atoms"] = static_cast<double>(atoms.size());
    report.notes["transform"] =
        "inverted the moment generating function E[exp(a r)]; the Laplace form E[exp(-a r)] "
        "never exceeds 1 and cannot reach Q > 1";
    report.notes["mixture"] = mixture.description();
    return report;
}

}  // namespace pfdr

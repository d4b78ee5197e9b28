#include "pfdr/ldp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "pfdr/error.hpp"
#include "pfdr/numerics.hpp"

namespace pfdr::ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_sizing_bookkeeping(PlanReport& report, const SplitSpec& split) {
    const double n_total = std::ceil(report.n_asymptotic);
    const double m = std::round(split.rho() * n_total);
    report.diagnostics["N_ceil"] = n_total;
    report.diagnostics["m"] = m;
    report.diagnostics["n"] = n_total - m;
    report.diagnostics["rho"] = split.rho();
}

}  // namespace

SplitSpec::SplitSpec(double rho) : rho_(rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("split rho must lie in (0, 1)");
}

LegendrePoint legendre(const CgfModel& cgf, double u) {
    if (!(u > cgf.d1_inf && u < cgf.d1_sup)) {
        throw RangeError("u lies outside the range of Lambda'");
    }
    if (u == 0.0) return {0.0, 0.0};
    double eta;
    if (u > 0.0) {
        eta = numerics::find_root_increasing(cgf.lambda_d1, u, 1.0, {0.0, cgf.domain_sup});
    } else {
        auto mirrored = [&cgf](double s) { return -cgf.lambda_d1(-s); };
        eta = -numerics::find_root_increasing(mirrored, -u, 1.0, {0.0, -cgf.domain_inf});
    }
    const double value = u * eta - cgf.lambda_fn(eta);
    return {std::max(0.0, value), eta};
}

double solve_t0(const CgfModel& cgf, const TailIndex& tail, const SplitSpec& split) {
    if (!(tail.lambda > -1.0)) throw DomainError("tail index lambda must exceed -1");
    const double rho = split.rho();
    const double target = (1.0 + tail.lambda) * rho / (1.0 - rho);
    auto f = [&cgf](double t) { return t * cgf.lambda_d1(t); };
    return numerics::find_root_increasing(f, target, 1.0, {0.0, cgf.domain_sup});
}

double pfdr_floor_limit(double pi, double T, const SplitSpec& split, double t0) {
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
    if (!(T >= 0.0) || !(t0 > 0.0)) throw DomainError("T must be >= 0 and t0 > 0");
    return (1.0 - pi) / (1.0 - pi + pi * std::exp((1.0 - split.rho()) * T * t0));
}

PlanReport n_star_general(const PfdrTarget& target, const CgfModel& cgf, const TailIndex& tail,
                          const SplitSpec& split, double d) {
    if (!(d > 0.0)) throw DomainError("effect shift d must be positive");
    const double t0 = solve_t0(cgf, tail, split);
    const double rho = split.rho();
    PlanReport report;
    report.regime = Regime::Theorem4_1;
    report.q_value = target.q();
    report.n_asymptotic = std::log(target.q()) / (d * (1.0 - rho) * t0);
    add_sizing_bookkeeping(report, split);
    report.diagnostics["t0"] = t0;
    report.diagnostics["lambda"] = tail.lambda;
    report.diagnostics["d"] = d;
    report.diagnostics["pfdr_floor_at_N_ceil"] =
        pfdr_floor_limit(target.pi(), d * report.diagnostics["N_ceil"], split, t0);
    report.notes["family"] = cgf.family_tag;
    return report;
}

PlanReport n_star_score(const PfdrTarget& target, const ScoreModel& model, const SplitSpec& split,
                        double theta) {
    if (!(theta > 0.0)) throw DomainError("effect theta must be positive");
    if (model.k_f_mode == KfMode::SymmetricBounded && model.k_f != 0.0) {
        throw DomainError("symmetric-bounded score model must have K_f = 0");
    }
    const double t0 = solve_t0(model.cgf, model.tail, split);
    const double rho = split.rho();
    const double slope = model.cgf.lambda_d1(t0);
    const double rate = (1.0 - rho) * slope + 2.0 * rho * model.k_f;
    PlanReport report;
    report.regime = Regime::Theorem5_1;
    report.q_value = target.q();
    report.n_asymptotic = std::log(target.q()) / (theta * rate);
    add_sizing_bookkeeping(report, split);
    report.diagnostics["t0"] = t0;
    report.diagnostics["lambda_d1_t0"] = slope;
    report.diagnostics["k_f"] = model.k_f;
    report.diagnostics["lambda"] = model.tail.lambda;
    report.diagnostics["theta"] = theta;
    // The tail ratio tends to exp(T * rate) when theta N -> T.
    report.diagnostics["ratio_limit_rate"] = rate;
    report.notes["family"] = model.cgf.family_tag;
    return report;
}

double k_f(const std::function<double(double)>& density, KfMode mode) {
    if (mode == KfMode::SymmetricBounded) return 0.0;

    // Bracket the effective support: probe outward until f is negligible
    // relative to its largest probed value.
    double peak = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.25) peak = std::max(peak, density(x));
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw QuadratureError("density has no finite positive mass near the origin");
    }
    const double cutoff = 1e-20 * peak;
    auto edge = [&](double direction) {
        double x = direction;
        while (density(x) > cutoff || density(2.0 * x) > cutoff) {
            x *= 2.0;
            if (std::abs(x) > 1e6) throw QuadratureError("density support could not be bracketed");
        }
        return 2.0 * x;
    };
    const double lo = edge(-1.0);
    const double hi = edge(1.0);

    auto f2 = [&density](double z) {
        const double f = density(z);
        return f * f;
    };
    auto zf2 = [&density](double z) {
        const double f = density(z);
        return z * f * f;
    };
    const numerics::Integral mass = numerics::integrate(f2, lo, hi, 1e-13);
    const numerics::Integral moment = numerics::integrate(zf2, lo, hi, 1e-13);
    if (mass.error > 1e-10 || moment.error > 1e-10) {
        throw QuadratureError("K_f quadrature did not reach absolute tolerance 1e-10");
    }
    if (!(mass.value > 0.0)) throw QuadratureError("density has zero L2 mass");
    return moment.value / mass.value;
}

SplitOutcome optimal_split(const CgfModel& cgf, const TailIndex& tail) {
    constexpr double kLo = 1e-4;
    constexpr double kHi = 1.0 - 1e-4;
    constexpr double kEdge = 1e-7;
    auto objective = [&](double rho) { return (1.0 - rho) * solve_t0(cgf, tail, SplitSpec(rho)); };
    const numerics::Maximum best = numerics::golden_section_maximize(objective, kLo, kHi, 1e-11);
    SplitOutcome out;
    out.rho_searched = best.argmax;
    out.objective = best.value;
    // A plateau that reaches an endpoint (uniform: 2 tanh(t0/2) saturates) is
    // a boundary supremum even when the search stops inside it.
    auto reaches = [&](double rho) { return objective(rho) >= best.value * (1.0 - 1e-12); };
    if (best.argmax - kLo < kEdge || reaches(kLo)) {
        out.boundary = SplitOutcome::Boundary::Lower;
    } else if (kHi - best.argmax < kEdge || reaches(kHi)) {
        out.boundary = SplitOutcome::Boundary::Upper;
    } else {
        out.rho_star = best.argmax;
    }
    return out;
}

double PsiModel::sigma2() const {
    switch (family) {
        case Family::Normal: return sigma * sigma;
        case Family::Uniform: return width * width / 12.0;
        default: throw UnsupportedFamilyError("Psi is only available for normal and uniform families");
    }
}

PsiModel make_psi(const FamilySpec& spec) {
    if (spec.family != Family::Normal && spec.family != Family::Uniform) {
        throw UnsupportedFamilyError("Psi needs a tractable density of X - Y; family '" +
                                     family_name(spec.family) + "' has none here");
    }
    return {spec.family, spec.sigma, spec.width};
}

namespace {

// Moments of the triangular density of X - Y on (-w, w) under the tilt
// exp(t z^2 / 2), integrated over z in [0, w] (the density is even).
struct TriangularMoments {
    double mass = 0.0;    // int_0^w e^{t z^2/2} (w - z) dz
    double second = 0.0;  // int_0^w (z^2/2) e^{t z^2/2} (w - z) dz
};

TriangularMoments triangular_moments(double w, double t) {
    auto kernel = [w, t](double z) { return std::exp(0.5 * t * z * z) * (w - z); };
    auto weighted = [w, t](double z) { return 0.5 * z * z * std::exp(0.5 * t * z * z) * (w - z); };
    // For strongly negative t the mass concentrates in a window of width
    // ~1/sqrt(|t|) at the origin; split there so the adaptive rule sees it.
    double split = w;
    if (t < 0.0) split = std::min(w, 10.0 / std::sqrt(-t));
    TriangularMoments m;
    m.mass = numerics::integrate(kernel, 0.0, split, 1e-13).value;
    m.second = numerics::integrate(weighted, 0.0, split, 1e-13).value;
    if (split < w) {
        m.mass += numerics::integrate(kernel, split, w, 1e-13).value;
        m.second += numerics::integrate(weighted, split, w, 1e-13).value;
    }
    return m;
}

}  // namespace

double psi_eval(const PsiModel& model, double t) {
    switch (model.family) {
        case Family::Normal: {
            const double s2 = model.sigma * model.sigma;
            if (!(t < 0.5 / s2)) throw DomainError("t outside the domain of Psi");
            return -0.5 * std::log1p(-2.0 * s2 * t);
        }
        case Family::Uniform: {
            const double w = model.width;
            const TriangularMoments m = triangular_moments(w, t);
            return std::log(2.0 * m.mass / (w * w));
        }
        default: throw UnsupportedFamilyError("Psi is only available for normal and uniform families");
    }
}

double psi_d1(const PsiModel& model, double t) {
    switch (model.family) {
        case Family::Normal: {
            const double s2 = model.sigma * model.sigma;
            if (!(t < 0.5 / s2)) throw DomainError("t outside the domain of Psi");
            return s2 / (1.0 - 2.0 * s2 * t);
        }
        case Family::Uniform: {
            const TriangularMoments m = triangular_moments(model.width, t);
            return m.second / m.mass;
        }
        default: throw UnsupportedFamilyError("Psi is only available for normal and uniform families");
    }
}

double eta_psi(const PsiModel& model, double u) {
    const double s2 = model.sigma2();
    if (!(u > 0.0 && u < s2)) throw RangeError("eta_psi needs u in (0, sigma^2)");
    if (model.family == Family::Normal) return (1.0 - s2 / u) / (2.0 * s2);
    // Psi' is increasing in t, so s -> -Psi'(-s) is increasing in s = -t >= 0.
    auto mirrored = [&model](double s) { return -psi_d1(model, -s); };
    return -numerics::find_root_increasing(mirrored, -u, 1.0 / s2);
}

CgfModel empirical_cgf(std::span<const double> sample, std::span<const double> t_grid) {
    if (sample.size() < 100) throw DomainError("empirical CGF needs at least 100 observations");
    if (t_grid.empty()) throw DomainError("empirical CGF needs a t grid");
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / sample.size();
    auto centred = std::make_shared<std::vector<double>>();
    centred->reserve(sample.size());
    double max_abs = 0.0;
    for (double x : sample) {
        centred->push_back(x - mean);
        max_abs = std::max(max_abs, std::abs(x - mean));
    }

    constexpr double kLogBudget = 700.0;
    double lo = 0.0;
    double hi = 0.0;
    for (double t : t_grid) {
        if (std::abs(t) * max_abs > kLogBudget) continue;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }

    // Tilted moments: returns {Lambda, Lambda', Lambda''} at t.
    struct Tilt {
        double value, d1, d2;
    };
    auto tilt = [centred](double t) -> Tilt {
        double peak = -kInf;
        for (double x : *centred) peak = std::max(peak, t * x);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (double x : *centred) {
            const double w = std::exp(t * x - peak);
            s0 += w;
            s1 += w * x;
            s2 += w * x * x;
        }
        const double m1 = s1 / s0;
        const double n = static_cast<double>(centred->size());
        return {peak + std::log(s0 / n), m1, std::max(0.0, s2 / s0 - m1 * m1)};
    };

    CgfModel m;
    m.lambda_fn = [tilt](double t) { return t == 0.0 ? 0.0 : tilt(t).value; };
    m.lambda_d1 = [tilt](double t) { return tilt(t).d1; };
    m.lambda_d2 = [tilt](double t) { return tilt(t).d2; };
    m.domain_inf = lo;
    m.domain_sup = hi;
    m.d1_inf = tilt(lo).d1;
    m.d1_sup = tilt(hi).d1;
    m.family_tag = "empirical(" + std::to_string(sample.size()) + ")";
    return m;
}

double difference_density(const std::function<double(double)>& f, double u) {
    auto integrand = [&f, u](double x) { return f(x) * f(x + u); };
    return numerics::integrate(integrand, -kInf, kInf, 1e-12).value;
}

}  // namespace pfdr::ldp

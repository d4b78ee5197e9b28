#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pfdr/error.hpp"
#include "pfdr/ldp_engine.hpp"
#include "pfdr/numerics.hpp"

namespace pfdr::ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// c_k = 2^{2k} B_{2k} / (2k)!, so that coth(x) - 1/x = sum_k c_k x^{2k-1}.
constexpr std::array<double, 10> kCothCoefficients = {
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
    -3617.0 / 162820783125.0,
    87734.0 / 38979295480125.0,
    -349222.0 / 1531329465290625.0,
};

constexpr double kSmallX = 0.5;

// ln(sinh(x) / x)
double log_sinhc(double x) {
    const double a = std::abs(x);
    if (a < kSmallX) {
        double sum = 0.0;
        double power = a * a;
        for (std::size_t k = 0; k < kCothCoefficients.size(); ++k) {
            sum += kCothCoefficients[k] * power / (2.0 * static_cast<double>(k + 1));
            power *= a * a;
        }
        return sum;
    }
    return a + std::log1p(-std::exp(-2.0 * a)) - std::numbers::ln2 - std::log(a);
}

// coth(x) - 1/x
double coth_minus_inverse(double x) {
    const double a = std::abs(x);
    double value;
    if (a < kSmallX) {
        value = 0.0;
        double power = a;
        for (double c : kCothCoefficients) {
            value += c * power;
            power *= a * a;
        }
    } else {
        value = 1.0 / std::tanh(a) - 1.0 / a;
    }
    return x < 0 ? -value : value;
}

// 1/x^2 - 1/sinh(x)^2
double inverse_square_difference(double x) {
    const double a = std::abs(x);
    if (a < kSmallX) {
        double value = 0.0;
        double power = 1.0;
        for (std::size_t k = 0; k < kCothCoefficients.size(); ++k) {
            value += kCothCoefficients[k] * (2.0 * static_cast<double>(k + 1) - 1.0) * power;
            power *= a * a;
        }
        return value;
    }
    const double s = std::sinh(a);
    return 1.0 / (a * a) - 1.0 / (s * s);
}

std::string tag(const std::string& name, double a) {
    std::ostringstream out;
    out << name << "(" << a << ")";
    return out.str();
}

}  // namespace

std::string family_name(Family family) {
    switch (family) {
        case Family::Normal: return "normal";
        case Family::Uniform: return "uniform";
        case Family::Gamma: return "gamma";
        case Family::NormalScore: return "normal-score";
        case Family::CauchyScore: return "cauchy-score";
        case Family::GammaScore: return "gamma-score";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    for (Family f : {Family::Normal, Family::Uniform, Family::Gamma, Family::NormalScore,
                     Family::CauchyScore, Family::GammaScore}) {
        if (family_name(f) == name) return f;
    }
    throw UnsupportedFamilyError("unknown family '" + name + "'");
}

bool is_score_family(Family family) {
    return family == Family::NormalScore || family == Family::CauchyScore ||
           family == Family::GammaScore;
}

CgfModel normal_cgf(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("normal sigma must be positive");
    const double s2 = sigma * sigma;
    CgfModel m;
    m.lambda_fn = [s2](double t) { return 0.5 * s2 * t * t; };
    m.lambda_d1 = [s2](double t) { return s2 * t; };
    m.lambda_d2 = [s2](double) { return s2; };
    m.domain_inf = -kInf;
    m.domain_sup = kInf;
    m.d1_inf = -kInf;
    m.d1_sup = kInf;
    m.family_tag = tag("normal", sigma);
    return m;
}

CgfModel uniform_cgf(double width) {
    if (!(width > 0.0)) throw DomainError("uniform width must be positive");
    const double h = 0.5 * width;
    CgfModel m;
    m.lambda_fn = [h](double t) { return log_sinhc(h * t); };
    m.lambda_d1 = [h](double t) { return h * coth_minus_inverse(h * t); };
    m.lambda_d2 = [h](double t) { return h * h * inverse_square_difference(h * t); };
    m.domain_inf = -kInf;
    m.domain_sup = kInf;
    m.d1_inf = -h;
    m.d1_sup = h;
    m.family_tag = tag("uniform", width);
    return m;
}

CgfModel gamma_cgf(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("gamma needs alpha > 0 and beta > 0");
    CgfModel m;
    m.lambda_fn = [alpha, beta](double t) {
        if (t >= 1.0 / beta) return kInf;
        return -alpha * (std::log1p(-beta * t) + beta * t);
    };
    m.lambda_d1 = [alpha, beta](double t) { return alpha * beta * beta * t / (1.0 - beta * t); };
    m.lambda_d2 = [alpha, beta](double t) {
        const double u = 1.0 - beta * t;
        return alpha * beta * beta / (u * u);
    };
    m.domain_inf = -kInf;
    m.domain_sup = 1.0 / beta;
    m.d1_inf = -alpha * beta;
    m.d1_sup = kInf;
    std::ostringstream out;
    out << "gamma(" << alpha << "," << beta << ")";
    m.family_tag = out.str();
    return m;
}

CgfModel cauchy_score_cgf() {
    CgfModel m;
    m.lambda_fn = [](double t) { return numerics::bessel_i0_log(t); };
    m.lambda_d1 = [](double t) { return numerics::bessel_i1_i0_ratio(t); };
    m.lambda_d2 = [](double t) {
        if (std::abs(t) < 1e-2) {
            const double t2 = t * t;
            return 0.5 - 3.0 * t2 / 16.0 + 5.0 * t2 * t2 / 96.0;
        }
        const double r = numerics::bessel_i1_i0_ratio(t);
        return 1.0 - r / t - r * r;
    };
    m.domain_inf = -kInf;
    m.domain_sup = kInf;
    m.d1_inf = -1.0;
    m.d1_sup = 1.0;
    m.family_tag = "cauchy-score";
    return m;
}

CgfModel gamma_score_cgf() {
    const double psi1 = numerics::digamma(1.0);
    CgfModel m;
    m.lambda_fn = [psi1](double t) {
        if (t <= -1.0) return kInf;
        return numerics::log_gamma(t + 1.0) - psi1 * t;
    };
    m.lambda_d1 = [psi1](double t) { return numerics::digamma(t + 1.0) - psi1; };
    m.lambda_d2 = [](double t) { return numerics::trigamma(t + 1.0); };
    m.domain_inf = -1.0;
    m.domain_sup = kInf;
    m.d1_inf = -kInf;
    m.d1_sup = kInf;
    m.family_tag = "gamma-score";
    return m;
}

CgfModel make_cgf(const FamilySpec& spec) {
    switch (spec.family) {
        case Family::Normal: return normal_cgf(spec.sigma);
        case Family::Uniform: return uniform_cgf(spec.width);
        case Family::Gamma: return gamma_cgf(spec.alpha, spec.beta);
        case Family::NormalScore: {
            // Score (omega - 0) / sigma^2 of N(theta, sigma^2) is N(0, 1/sigma^2).
            CgfModel m = normal_cgf(1.0 / spec.sigma);
            m.family_tag = tag("normal-score", spec.sigma);
            return m;
        }
        case Family::CauchyScore: return cauchy_score_cgf();
        case Family::GammaScore: return gamma_score_cgf();
    }
    throw UnsupportedFamilyError("unknown family");
}

TailIndex tail_index(const FamilySpec& spec) {
    switch (spec.family) {
        case Family::Normal:
        case Family::Uniform:
        case Family::NormalScore:
            return {0.0, ZetaKind::Constant, std::nullopt};
        case Family::Gamma:
            if (spec.alpha > 0.5) return {0.0, ZetaKind::Constant, std::nullopt};
            if (spec.alpha == 0.5) return {0.0, ZetaKind::Logarithmic, std::nullopt};
            return {2.0 * spec.alpha - 1.0, ZetaKind::Constant, std::nullopt};
        case Family::CauchyScore:
            return {0.0, ZetaKind::Logarithmic, std::nullopt};
        case Family::GammaScore:
            // g(u) = e^u / (1 + e^u)^2 -> 1/4 at 0: a finite nonzero limit.
            return {0.0, ZetaKind::Constant, 0.25};
    }
    throw UnsupportedFamilyError("unknown family");
}

std::function<double(double)> score_density(const FamilySpec& spec) {
    switch (spec.family) {
        case Family::NormalScore: {
            const double s = 1.0 / spec.sigma;
            return [s](double x) {
                return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
            };
        }
        case Family::CauchyScore:
            return [](double x) {
                if (std::abs(x) >= 1.0) return 0.0;
                return 1.0 / (std::numbers::pi * std::sqrt(1.0 - x * x));
            };
        case Family::GammaScore: {
            const double c = numerics::digamma(1.0);
            return [c](double x) {
                const double z = x + c;
                return std::exp(z - std::exp(z));
            };
        }
        default:
            throw UnsupportedFamilyError("family '" + family_name(spec.family) +
                                         "' has no score density");
    }
}

ScoreModel make_score_model(const FamilySpec& spec) {
    if (!is_score_family(spec.family)) {
        throw UnsupportedFamilyError("family '" + family_name(spec.family) + "' is not a score family");
    }
    ScoreModel model;
    model.cgf = make_cgf(spec);
    model.tail = tail_index(spec);
    if (spec.family == Family::CauchyScore) {
        // Symmetric with bounded support; the density itself is unbounded at +-1.
        model.k_f_mode = KfMode::SymmetricBounded;
        model.k_f = 0.0;
    } else {
        model.k_f_mode = KfMode::DensityWeighted;
        model.k_f = k_f(score_density(spec), KfMode::DensityWeighted);
    }
    return model;
}

}  // namespace pfdr::ldp

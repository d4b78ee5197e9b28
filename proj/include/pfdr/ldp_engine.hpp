#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfdr/pfdr_core.hpp"

namespace pfdr::ldp {

// Cumulant generating function Lambda(t) = ln E exp(tX) of a mean-zero
// observable, with its first two derivatives. The domain is the open interval
// (domain_inf, domain_sup); Lambda' maps it onto (d1_inf, d1_sup).
struct CgfModel {
    std::function<double(double)> lambda_fn;
    std::function<double(double)> lambda_d1;
    std::function<double(double)> lambda_d2;
    double domain_inf = 0.0;
    double domain_sup = 0.0;
    double d1_inf = 0.0;
    double d1_sup = 0.0;
    std::string family_tag;
};

enum class ZetaKind { Constant, Logarithmic };

// Local behaviour g(x) ~ C x^lambda zeta(1/x) of the density of X - Y at 0.
// Only lambda enters the sizing formulas; zeta and C are descriptive.
struct TailIndex {
    double lambda = 0.0;
    ZetaKind zeta = ZetaKind::Constant;
    std::optional<double> c_const;
};

// Fraction m / (n + m) of effective degrees of freedom spent on the variance.
class SplitSpec {
public:
    explicit SplitSpec(double rho);
    double rho() const noexcept { return rho_; }

private:
    double rho_;
};

enum class KfMode { SymmetricBounded, DensityWeighted };

struct ScoreModel {
    CgfModel cgf;
    TailIndex tail;
    double k_f = 0.0;
    KfMode k_f_mode = KfMode::SymmetricBounded;
};

// ---------------------------------------------------------------------------
// Built-in families

enum class Family { Normal, Uniform, Gamma, NormalScore, CauchyScore, GammaScore };

struct FamilySpec {
    Family family = Family::Normal;
    double sigma = 1.0;   // Normal, NormalScore
    double width = 1.0;   // Uniform on (-width/2, width/2)
    double alpha = 1.0;   // Gamma shape
    double beta = 1.0;    // Gamma scale
};

std::string family_name(Family family);
Family parse_family(const std::string& name);
bool is_score_family(Family family);

/// N(0, sigma^2): Lambda(t) = sigma^2 t^2 / 2.
CgfModel normal_cgf(double sigma);
/// Uniform(-width/2, width/2): Lambda(t) = ln(sinh(width t / 2) / (width t / 2)).
CgfModel uniform_cgf(double width);
/// gamma(alpha, beta) minus its mean alpha beta.
CgfModel gamma_cgf(double alpha, double beta);
/// sin(xi), xi ~ U(-pi, pi): the Cauchy location score at 0. Lambda = ln I0.
CgfModel cauchy_score_cgf();
/// ln(omega) - psi(1), omega ~ Exp(1): the gamma shape score at 1.
CgfModel gamma_score_cgf();

CgfModel make_cgf(const FamilySpec& spec);
TailIndex tail_index(const FamilySpec& spec);

/// Density of the null score X for the score families.
std::function<double(double)> score_density(const FamilySpec& spec);

/// Score model with K_f computed from the family's score density.
ScoreModel make_score_model(const FamilySpec& spec);

// ---------------------------------------------------------------------------
// Operations

struct LegendrePoint {
    double lambda_star = 0.0;
    double eta = 0.0;
};

/// Lambda*(u) and the tilt eta with Lambda'(eta) = u.
LegendrePoint legendre(const CgfModel& cgf, double u);

/// Unique t0 > 0 with t Lambda'(t) = (1 + lambda) rho / (1 - rho).
double solve_t0(const CgfModel& cgf, const TailIndex& tail, const SplitSpec& split);

/// N* ~ ln Q / (d (1 - rho) t0) for the split-sample Studentized mean test.
PlanReport n_star_general(const PfdrTarget& target, const CgfModel& cgf, const TailIndex& tail,
                          const SplitSpec& split, double d);

/// (1 - pi) / (1 - pi + pi exp((1 - rho) T t0)).
double pfdr_floor_limit(double pi, double T, const SplitSpec& split, double t0);

/// N* ~ ln Q / (theta [(1 - rho) Lambda'(t0) + 2 rho K_f]) for the
/// Studentized score test.
PlanReport n_star_score(const PfdrTarget& target, const ScoreModel& model, const SplitSpec& split,
                        double theta);

/// K_f = int z f(z)^2 dz / int f(z)^2 dz, or 0 in symmetric-bounded mode.
double k_f(const std::function<double(double)>& density, KfMode mode);

struct SplitOutcome {
    enum class Boundary { Interior, Lower, Upper };
    Boundary boundary = Boundary::Interior;
    std::optional<double> rho_star;  // set only for interior maximizers
    double rho_searched = 0.0;       // where the search ended
    double objective = 0.0;          // (1 - rho) t0(rho) there
};

/// Maximizes (1 - rho) t0(rho) over rho in [1e-4, 1 - 1e-4].
SplitOutcome optimal_split(const CgfModel& cgf, const TailIndex& tail);

// Psi(t) = ln E exp(t (X - Y)^2 / 2) for X, Y iid.
struct PsiModel {
    Family family = Family::Normal;
    double sigma = 1.0;
    double width = 1.0;

    double sigma2() const;
};

PsiModel make_psi(const FamilySpec& spec);

double psi_eval(const PsiModel& model, double t);
double psi_d1(const PsiModel& model, double t);

/// The t < 0 with Psi'(t) = u, for u in (0, sigma^2).
double eta_psi(const PsiModel& model, double u);

/// Lambda-hat(t) = ln mean exp(t x_i) over the re-centred sample, with exact
/// tilted-moment derivatives. The domain is the hull of the grid points that
/// keep max |t x_i| within the log-domain budget.
CgfModel empirical_cgf(std::span<const double> sample, std::span<const double> t_grid);

/// g(u) = int f(x) f(x + u) dx: density of X - Y at u for X, Y iid ~ f.
double difference_density(const std::function<double(double)>& f, double u);

}  // namespace pfdr::ldp

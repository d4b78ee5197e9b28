#pragma once

#include <string>
#include <vector>

#include "pfdr/numerics.hpp"
#include "pfdr/pfdr_core.hpp"

namespace pfdr {

// Signal-noise ratio mu/sigma of a false null, r > 0.
class SnrEffect {
public:
    explicit SnrEffect(double r);
    double r() const noexcept { return r_; }

private:
    double r_;
};

struct SnrAtom {
    double r = 0.0;
    double weight = 0.0;
};

// Distribution G of the SNR across false nulls, scaled by s: the SNR of a
// false null is s * r with r ~ G. Parametric families are discretized into
// at most 512 atoms on construction.
class SnrMixture {
public:
    enum class Kind { Discrete, Parametric };

    static SnrMixture discrete(std::vector<SnrAtom> atoms, double scale);

    /// Gamma(shape, scale_parameter) for G, discretized by Gauss-Legendre
    /// in ln r over the central 1 - 1e-10 of the mass (480 atoms).
    static SnrMixture gamma(double shape, double scale_parameter, double scale);

    Kind kind() const noexcept { return kind_; }
    const std::vector<SnrAtom>& atoms() const noexcept { return atoms_; }
    double scale() const noexcept { return scale_; }
    const std::string& description() const noexcept { return description_; }

    /// E_G[exp(a r)].
    double mgf(double a) const;

private:
    SnrMixture(Kind kind, std::vector<SnrAtom> atoms, double scale, std::string description);

    Kind kind_;
    std::vector<SnrAtom> atoms_;
    double scale_;
    std::string description_;
};

/// L(n, r): supremum over x of the noncentral-to-central t density ratio with
/// n degrees of freedom and noncentrality sqrt(n + 1) r.
double lr_sup_t(long n, SnrEffect r, const numerics::SeriesPolicy& policy = {});

PlanReport plan_t(const PfdrTarget& target, SnrEffect r, long n_max = kDefaultNMax);

/// sum_i w_i L(n, s r_i).
double lr_sup_t_mixture(long n, const SnrMixture& mixture);

PlanReport plan_t_mixture(const PfdrTarget& target, const SnrMixture& mixture,
                          long n_max = kDefaultNMax);

}  // namespace pfdr

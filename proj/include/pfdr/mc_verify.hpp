#pragma once

#include <cstdint>

#include "pfdr/ldp_engine.hpp"

namespace pfdr::mc {

// Rejection threshold z_N on the scale of X-bar / S: a null is rejected iff
// X-bar >= z_N S, i.e. the t statistic sqrt(n) X-bar / S >= z_N sqrt(n).
struct ThresholdSchedule {
    enum class Kind { Fixed, LogLog };
    Kind kind = Kind::Fixed;
    double z0 = 1.0;

    void validate() const;
    /// z0 for Fixed, z0 ln(1 + ln(1 + N)) for LogLog.
    double z(long n_total) const;
};

// One random-effects simulation setup. effect is the mean shift d for the
// general families and the parameter theta for the score families.
struct SimScenario {
    ldp::FamilySpec family;
    double effect = 0.0;
    double pi = 0.1;
    long n = 1;
    long m = 1;
    ThresholdSchedule schedule;
    long trials = 1;
    std::uint64_t seed = 0;
    long batch_size = 10'000;

    void validate() const;
    long n_total() const noexcept { return n + m; }
};

/// Worker count: PFDR_SIZER_THREADS when set to a positive integer, else the
/// hardware concurrency. Results never depend on this value.
unsigned default_threads();

struct PfdrEstimate {
    double pfdr_hat = 0.0;
    double std_error = 0.0;
    long rejections = 0;
    long batches = 0;
    long batches_with_rejections = 0;
    double rejection_probability = 0.0;
    double threshold = 0.0;
};

/// E[V/R | R > 0] over `trials` batches of `batch_size` nulls each. Batches
/// with no rejection are excluded; the standard error is the batch-mean one.
/// Throws DegenerateScenarioError if no batch rejects anything.
PfdrEstimate simulate_pfdr(const SimScenario& scenario, unsigned threads = 0);

struct RatioEstimate {
    double ratio_hat = 1.0;
    double std_error = 0.0;
    long numerator_hits = 0;
    long denominator_hits = 0;
    long trials = 0;
    double effect = 0.0;
    double threshold = 0.0;
    double denominator_probability = 0.0;
};

/// P(reject | false null) / P(reject | true null) with effect T_target / N,
/// both events evaluated on the same draws. Throws InsufficientHitsError when
/// either count is below 100.
RatioEstimate tail_ratio_mc(const SimScenario& scenario, double T_target, unsigned threads = 0);

/// z with P_0(X-bar >= z S) close to `probability`: exact for the normal
/// family, otherwise the empirical quantile of a pilot run of pilot_trials.
double calibrate_threshold(const SimScenario& scenario, double probability,
                           long pilot_trials = 1'000'000, unsigned threads = 0);

/// Sharp large-deviation approximation to P(X-bar_n >= u):
/// exp(-n Lambda*(u)) / (eta sqrt(2 pi n Lambda''(eta))).
double bahadur_rao_tail(const ldp::CgfModel& cgf, double u, long n);

}  // namespace pfdr::mc

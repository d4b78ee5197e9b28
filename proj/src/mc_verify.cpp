#include "pfdr/mc_verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "pfdr/error.hpp"
#include "pfdr/numerics.hpp"
#include "pfdr/philox.hpp"

namespace pfdr::mc {

using ldp::Family;

namespace {

constexpr long kMinHits = 100;
constexpr long kTrialsPerChunk = 1L << 16;
constexpr std::uint64_t kPilotKeyOffset = 0x9E3779B97F4A7C15ull;

// Mean and split-pair scale of one null, drawn under P_0 and, on the same
// random numbers, under the false-null distribution.
struct CoupledDraw {
    double xbar0 = 0.0;
    double s0 = 0.0;
    double xbar1 = 0.0;
    double s1 = 0.0;
};

class TrialSampler {
public:
    TrialSampler(const SimScenario& scenario, double effect)
        : spec_(scenario.family), n_(scenario.n), m_(scenario.m), effect_(effect),
          psi1_(numerics::digamma(1.0)) {}

    CoupledDraw draw(Philox4x32& rng) const {
        switch (spec_.family) {
            case Family::Normal: return draw_normal(rng);
            case Family::Uniform:
            case Family::Gamma: return draw_shifted(rng);
            case Family::NormalScore:
            case Family::CauchyScore:
            case Family::GammaScore: return draw_score(rng);
        }
        return {};
    }

private:
    // X-bar and the pair-difference sum are drawn from their exact laws.
    CoupledDraw draw_normal(Philox4x32& rng) const {
        std::normal_distribution<double> normal;
        std::gamma_distribution<double> chi_half(0.5 * static_cast<double>(m_), 1.0);
        const double sigma = spec_.sigma;
        const double z = normal(rng);
        const double g = chi_half(rng);
        CoupledDraw d;
        d.xbar0 = sigma * z / std::sqrt(static_cast<double>(n_));
        d.s0 = sigma * std::sqrt(2.0 * g / static_cast<double>(m_));
        d.xbar1 = d.xbar0 + effect_;
        d.s1 = d.s0;
        return d;
    }

    double centred_observation(Philox4x32& rng) const {
        if (spec_.family == Family::Uniform) return spec_.width * (rng.uniform() - 0.5);
        std::gamma_distribution<double> gamma(spec_.alpha, spec_.beta);
        return gamma(rng) - spec_.alpha * spec_.beta;
    }

    CoupledDraw draw_shifted(Philox4x32& rng) const {
        double sum = 0.0;
        for (long i = 0; i < n_; ++i) sum += centred_observation(rng);
        double pairs = 0.0;
        for (long k = 0; k < m_; ++k) {
            const double diff = centred_observation(rng) - centred_observation(rng);
            pairs += diff * diff;
        }
        CoupledDraw d;
        d.xbar0 = sum / static_cast<double>(n_);
        d.s0 = std::sqrt(pairs / (2.0 * static_cast<double>(m_)));
        d.xbar1 = d.xbar0 + effect_;
        d.s1 = d.s0;
        return d;
    }

    // Score ell-dot_0(omega) of one observation under P_0 and P_theta.
    std::pair<double, double> score_pair(Philox4x32& rng) const {
        switch (spec_.family) {
            case Family::NormalScore: {
                std::normal_distribution<double> normal;
                const double s2 = spec_.sigma * spec_.sigma;
                const double omega = spec_.sigma * normal(rng);
                return {omega / s2, (omega + effect_) / s2};
            }
            case Family::CauchyScore: {
                const double c = std::tan(std::numbers::pi * (rng.uniform() - 0.5));
                const double w1 = c + effect_;
                return {2.0 * c / (1.0 + c * c), 2.0 * w1 / (1.0 + w1 * w1)};
            }
            default: {
                // gamma(1 + theta) = Exp(1) + gamma(theta), independent parts.
                const double e = -std::log(rng.uniform());
                double extra = 0.0;
                if (effect_ > 0.0) {
                    std::gamma_distribution<double> part(effect_, 1.0);
                    extra = part(rng);
                }
                return {std::log(e) - psi1_, std::log(e + extra) - psi1_};
            }
        }
    }

    CoupledDraw draw_score(Philox4x32& rng) const {
        double sum0 = 0.0, sum1 = 0.0;
        for (long i = 0; i < n_; ++i) {
            const auto [x0, x1] = score_pair(rng);
            sum0 += x0;
            sum1 += x1;
        }
        double pairs0 = 0.0, pairs1 = 0.0;
        for (long k = 0; k < m_; ++k) {
            const auto [a0, a1] = score_pair(rng);
            const auto [b0, b1] = score_pair(rng);
            pairs0 += (a0 - b0) * (a0 - b0);
            pairs1 += (a1 - b1) * (a1 - b1);
        }
        const double nd = static_cast<double>(n_);
        const double md = static_cast<double>(m_);
        return {sum0 / nd, std::sqrt(pairs0 / (2.0 * md)), sum1 / nd, std::sqrt(pairs1 / (2.0 * md))};
    }

    ldp::FamilySpec spec_;
    long n_;
    long m_;
    double effect_;
    double psi1_;
};

// Runs fn(chunk) for chunk in [0, chunks) on up to `threads` workers. Work is
// keyed by chunk index only, so scheduling cannot change any result.
template <class Fn>
void for_each_chunk(long chunks, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<long>(threads, std::max<long>(chunks, 1)));
    if (threads <= 1) {
        for (long c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&]() {
            for (long c = next++; c < chunks; c = next++) {
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = chunks;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

// Pairwise summation in index order.
double pairwise_sum(const double* values, std::size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += values[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace

void ThresholdSchedule::validate() const {
    if (!(z0 > 0.0) || !std::isfinite(z0)) throw DomainError("threshold z0 must be positive");
}

double ThresholdSchedule::z(long n_total) const {
    if (kind == Kind::Fixed) return z0;
    const double nd = static_cast<double>(n_total);
    return z0 * std::log(1.0 + std::log(1.0 + nd));
}

void SimScenario::validate() const {
    if (n < 1 || m < 1) throw DomainError("scenario needs n >= 1 and m >= 1");
    if (trials < 1) throw DomainError("scenario needs trials >= 1");
    if (batch_size < 1) throw DomainError("scenario needs batch_size >= 1");
    if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("scenario pi must lie in [0, 1]");
    if (!(effect >= 0.0) || !std::isfinite(effect)) throw DomainError("scenario effect must be >= 0");
    schedule.validate();
    // Validates family parameters.
    (void)ldp::make_cgf(family);
}

unsigned default_threads() {
    if (const char* env = std::getenv("PFDR_SIZER_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

PfdrEstimate simulate_pfdr(const SimScenario& scenario, unsigned threads) {
    scenario.validate();
    const TrialSampler sampler(scenario, scenario.effect);
    const double z = scenario.schedule.z(scenario.n_total());
    const long batches = scenario.trials;
    const long size = scenario.batch_size;

    std::vector<double> fdp(static_cast<std::size_t>(batches), 0.0);
    std::vector<long> rejected(static_cast<std::size_t>(batches), 0);
    for_each_chunk(batches, threads, [&](long b) {
        long v = 0;
        long r = 0;
        for (long j = 0; j < size; ++j) {
            Philox4x32 rng(scenario.seed, static_cast<std::uint64_t>(b) * size + j);
            const bool false_null = rng.uniform() < scenario.pi;
            const CoupledDraw d = sampler.draw(rng);
            const bool reject = false_null ? d.xbar1 >= z * d.s1 : d.xbar0 >= z * d.s0;
            if (reject) {
                ++r;
                if (!false_null) ++v;
            }
        }
        rejected[b] = r;
        fdp[b] = r > 0 ? static_cast<double>(v) / static_cast<double>(r) : 0.0;
    });

    std::vector<double> kept;
    long total_rejections = 0;
    for (long b = 0; b < batches; ++b) {
        total_rejections += rejected[b];
        if (rejected[b] > 0) kept.push_back(fdp[b]);
    }
    PfdrEstimate out;
    out.batches = batches;
    out.threshold = z;
    out.rejections = total_rejections;
    out.rejection_probability =
        static_cast<double>(total_rejections) / (static_cast<double>(batches) * static_cast<double>(size));
    out.batches_with_rejections = static_cast<long>(kept.size());
    if (kept.empty()) {
        std::ostringstream msg;
        msg << "no batch rejected any null at z = " << z << "; lower z0";
        throw DegenerateScenarioError(msg.str(), out.rejection_probability);
    }
    const double k = static_cast<double>(kept.size());
    out.pfdr_hat = pairwise_sum(kept.data(), kept.size()) / k;
    std::vector<double> squares(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        squares[i] = (kept[i] - out.pfdr_hat) * (kept[i] - out.pfdr_hat);
    }
    const double variance = kept.size() > 1 ? pairwise_sum(squares.data(), squares.size()) / (k - 1.0) : 0.0;
    out.std_error = std::sqrt(variance / k);
    return out;
}

RatioEstimate tail_ratio_mc(const SimScenario& scenario, double T_target, unsigned threads) {
    scenario.validate();
    if (!(T_target >= 0.0)) throw DomainError("T_target must be >= 0");
    const double effect = T_target / static_cast<double>(scenario.n_total());
    const TrialSampler sampler(scenario, effect);
    const double z = scenario.schedule.z(scenario.n_total());
    const long trials = scenario.trials;
    const long chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;

    struct Counts {
        long numerator = 0, denominator = 0, both = 0;
    };
    std::vector<Counts> per_chunk(static_cast<std::size_t>(chunks));
    for_each_chunk(chunks, threads, [&](long c) {
        Counts counts;
        const long begin = c * kTrialsPerChunk;
        const long end = std::min(trials, begin + kTrialsPerChunk);
        for (long i = begin; i < end; ++i) {
            Philox4x32 rng(scenario.seed, static_cast<std::uint64_t>(i));
            const CoupledDraw d = sampler.draw(rng);
            const bool den = d.xbar0 >= z * d.s0;
            const bool num = d.xbar1 >= z * d.s1;
            counts.denominator += den;
            counts.numerator += num;
            counts.both += den && num;
        }
        per_chunk[c] = counts;
    });

    Counts total;
    for (const Counts& c : per_chunk) {
        total.numerator += c.numerator;
        total.denominator += c.denominator;
        total.both += c.both;
    }
    if (total.numerator < kMinHits || total.denominator < kMinHits) {
        std::ostringstream msg;
        msg << "too few tail hits (numerator " << total.numerator << ", denominator "
            << total.denominator << ", need " << kMinHits << " each)";
        throw InsufficientHitsError(msg.str(), total.numerator, total.denominator);
    }

    const double k = static_cast<double>(trials);
    const double pa = static_cast<double>(total.numerator) / k;
    const double pb = static_cast<double>(total.denominator) / k;
    const double pab = static_cast<double>(total.both) / k;
    RatioEstimate out;
    out.ratio_hat = static_cast<double>(total.numerator) / static_cast<double>(total.denominator);
    // Delta method for a ratio of two correlated Bernoulli means.
    const double r = out.ratio_hat;
    const double var = (pa * (1.0 - pa) - 2.0 * r * (pab - pa * pb) + r * r * pb * (1.0 - pb)) / (k * pb * pb);
    out.std_error = std::sqrt(std::max(0.0, var));
    out.numerator_hits = total.numerator;
    out.denominator_hits = total.denominator;
    out.trials = trials;
    out.effect = effect;
    out.threshold = z;
    out.denominator_probability = pb;
    return out;
}

double calibrate_threshold(const SimScenario& scenario, double probability, long pilot_trials,
                           unsigned threads) {
    scenario.validate();
    if (!(probability > 0.0 && probability < 1.0)) throw DomainError("probability must lie in (0, 1)");
    if (scenario.family.family == Family::Normal) {
        // X-bar / S = t_m / sqrt(n) exactly.
        const boost::math::students_t_distribution<double> t(static_cast<double>(scenario.m));
        return boost::math::quantile(boost::math::complement(t, probability)) /
               std::sqrt(static_cast<double>(scenario.n));
    }
    if (pilot_trials * probability < 50.0) {
        throw DomainError("pilot run too short for the requested tail probability");
    }
    const TrialSampler sampler(scenario, 0.0);
    std::vector<double> ratios(static_cast<std::size_t>(pilot_trials));
    const long chunks = (pilot_trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    for_each_chunk(chunks, threads, [&](long c) {
        const long begin = c * kTrialsPerChunk;
        const long end = std::min(pilot_trials, begin + kTrialsPerChunk);
        for (long i = begin; i < end; ++i) {
            Philox4x32 rng(scenario.seed + kPilotKeyOffset, static_cast<std::uint64_t>(i));
            const CoupledDraw d = sampler.draw(rng);
            ratios[i] = d.xbar0 / d.s0;
        }
    });
    const auto rank = static_cast<std::size_t>(
        std::floor((1.0 - probability) * static_cast<double>(pilot_trials)));
    std::nth_element(ratios.begin(), ratios.begin() + rank, ratios.end());
    return ratios[rank];
}

double bahadur_rao_tail(const ldp::CgfModel& cgf, double u, long n) {
    if (n < 1) throw DomainError("bahadur_rao_tail requires n >= 1");
    const double u_min = 1e-6 * std::sqrt(cgf.lambda_d2(0.0));
    if (!(u > u_min)) throw RangeError("u too close to 0: the tilt vanishes and the approximation diverges");
    const ldp::LegendrePoint point = ldp::legendre(cgf, u);
    const double nd = static_cast<double>(n);
    return std::exp(-nd * point.lambda_star) /
           (point.eta * std::sqrt(2.0 * std::numbers::pi * nd * cgf.lambda_d2(point.eta)));
}

}  // namespace pfdr::mc

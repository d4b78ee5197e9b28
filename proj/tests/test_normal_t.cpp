#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/gamma.hpp>

#include "oracles.hpp"
#include "pfdr/error.hpp"
#include "pfdr/normal_t.hpp"

using namespace pfdr;

TEST_SUITE("normal_t") {

TEST_CASE("L(n, r) limits") {
    CHECK(lr_sup_t(10, SnrEffect(1e-8)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(lr_sup_t(1000, SnrEffect(1e-3)) == doctest::Approx(std::exp(1.0)).epsilon(0.01));
}

TEST_CASE("L(n, r) matches brute-force maximization of the density ratio") {
    for (int n : {1, 5, 12, 20, 30}) {
        for (double r : {0.05, 0.2, 0.5, 0.8, 1.0}) {
            bool flat = false;
            const double ref = oracle::lr_sup_t_brute(n, r, &flat);
            CHECK(flat);
            CHECK(lr_sup_t(n, SnrEffect(r)) == doctest::Approx(ref).epsilon(1e-6));
        }
    }
}

TEST_CASE("L(n, r) is strictly increasing in r") {
    for (long n : {1L, 7L, 50L, 400L}) {
        double prev = 1.0;
        for (double r = 0.01; r < 2.0; r *= 1.5) {
            const double v = lr_sup_t(n, SnrEffect(r));
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("L(n, a/n) approaches e^a monotonically") {
    for (double a : {0.5, 1.0, 2.0}) {
        double prev_err = INFINITY;
        for (long n : {100L, 1000L, 10000L}) {
            const double err = std::abs(lr_sup_t(n, SnrEffect(a / n)) / std::exp(a) - 1.0);
            CHECK(err < 10.0 / n);
            CHECK(err < prev_err);
            prev_err = err;
        }
    }
}

TEST_CASE("lr_sup_t rejects bad inputs") {
    CHECK_THROWS_AS(SnrEffect(0.0), DomainError);
    CHECK_THROWS_AS(SnrEffect(-1.0), DomainError);
    CHECK_THROWS_AS(lr_sup_t(0, SnrEffect(0.1)), DomainError);
}

TEST_CASE("plan_t examples") {
    const auto r = plan_t(PfdrTarget(0.05, 0.1), SnrEffect(0.01));
    CHECK(r.n_asymptotic == doctest::Approx(100.0 * std::log(171.0)).epsilon(1e-12));
    REQUIRE(r.n_exact);
    CHECK(std::abs(*r.n_exact / r.n_asymptotic - 1.0) < 0.1);
    CHECK(r.regime == Regime::Theorem2_1);

    CHECK(*plan_t(PfdrTarget(0.5, 0.5), SnrEffect(0.3)).n_exact == 1);

    long scan = 1;
    while (oracle::lr_sup_t_brute(static_cast<int>(scan), 1.0) < 171.0) ++scan;
    CHECK(*plan_t(PfdrTarget(0.05, 0.1), SnrEffect(1.0)).n_exact == scan);
}

TEST_CASE("plan_t converges to ln Q / r") {
    const PfdrTarget target(0.05, 0.1);
    const auto report = plan_t(target, SnrEffect(1e-3));
    CHECK(std::abs(*report.n_exact * 1e-3 / std::log(171.0) - 1.0) < 0.05);
}

TEST_CASE("plan_t reports unattainable targets") {
    CHECK_THROWS_AS(plan_t(PfdrTarget(0.05, 0.1), SnrEffect(1e-4), 100), NotAttainableError);
}

TEST_CASE("mixture sums") {
    const auto single = SnrMixture::discrete({{0.3, 1.0}}, 1.0);
    CHECK(lr_sup_t_mixture(17, single) == lr_sup_t(17, SnrEffect(0.3)));
    const auto pair = SnrMixture::discrete({{0.1, 0.5}, {0.2, 0.5}}, 1.0);
    CHECK(lr_sup_t_mixture(50, pair) ==
          doctest::Approx(0.5 * (lr_sup_t(50, SnrEffect(0.1)) + lr_sup_t(50, SnrEffect(0.2)))).epsilon(1e-15));
}

TEST_CASE("gamma mixture approaches its moment generating function") {
    // Unit-mean gamma, shape 4: MGF(1) = (1 - 1/4)^-4.
    const auto g = SnrMixture::gamma(4.0, 0.25, 1e-3);
    const double mgf = std::pow(1.0 - 0.25, -4.0);
    CHECK(g.mgf(1.0) == doctest::Approx(mgf).epsilon(1e-6));
    // Restricted to the central 1 - 1e-10 of G, the e^r tilt of gamma(k, b)
    // is gamma(k, b / (1 - b)), which gives the truncated MGF exactly.
    for (double shape : {0.1, 0.5, 1.0, 4.0}) {
        namespace bm = boost::math;
        const bm::gamma_distribution<double> base(shape, 0.25);
        const bm::gamma_distribution<double> tilted(shape, 0.25 / 0.75);
        const double lo = bm::quantile(base, 5e-11);
        const double hi = bm::quantile(bm::complement(base, 5e-11));
        const double exact = std::pow(0.75, -shape) * (bm::cdf(tilted, hi) - bm::cdf(tilted, lo)) / (1.0 - 1e-10);
        CHECK(SnrMixture::gamma(shape, 0.25, 1e-3).mgf(1.0) == doctest::Approx(exact).epsilon(1e-10));
    }
    CHECK(lr_sup_t_mixture(1000, g) == doctest::Approx(mgf).epsilon(0.02));
}

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS(SnrMixture::discrete({{0.1, 0.5}, {0.2, 0.4}}, 1.0), DomainError);
    CHECK_THROWS_AS(SnrMixture::discrete({{-0.1, 1.0}}, 1.0), DomainError);
    CHECK_THROWS_AS(SnrMixture::discrete({{0.1, 1.0}}, 0.0), DomainError);
    CHECK_THROWS_AS(SnrMixture::discrete({}, 1.0), DomainError);
}

TEST_CASE("plan_t_mixture examples") {
    const PfdrTarget target(0.05, 0.1);
    const auto two = plan_t_mixture(target, SnrMixture::discrete({{1.0, 0.5}, {2.0, 0.5}}, 0.01));
    const double a = oracle::bisect([](double x) { return 0.5 * std::exp(x) + 0.5 * std::exp(2.0 * x) - 171.0; },
                                    0.0, 10.0);
    CHECK(two.n_asymptotic == doctest::Approx(100.0 * a).epsilon(1e-9));
    CHECK(two.regime == Regime::Corollary2_1);
    CHECK(two.notes.count("transform") == 1);

    const auto same = plan_t_mixture(target, SnrMixture::discrete({{1.0, 0.25}, {1.0, 0.75}}, 0.01));
    CHECK(same.n_asymptotic == doctest::Approx(100.0 * std::log(171.0)).epsilon(1e-9));
}

TEST_CASE("point-mass mixture reproduces plan_t") {
    const PfdrTarget target(0.05, 0.1);
    for (double s : {0.5, 0.05, 0.01}) {
        const auto m = plan_t_mixture(target, SnrMixture::discrete({{1.0, 1.0}}, s));
        const auto t = plan_t(target, SnrEffect(s));
        CHECK(*m.n_exact == *t.n_exact);
        CHECK(m.n_asymptotic == t.n_asymptotic);
        CHECK(m.q_value == t.q_value);
        CHECK(m.diagnostics.at("rho_at_n_exact") == t.diagnostics.at("rho_at_n_exact"));
    }
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "pfdr/error.hpp"
#include "pfdr/normal_t.hpp"
#include "pfdr/pfdr_core.hpp"

using namespace pfdr;

TEST_SUITE("pfdr_core") {

TEST_CASE("q_threshold values") {
    CHECK(q_threshold(PfdrTarget(0.05, 0.1)) == doctest::Approx(171.0).epsilon(1e-14));
    CHECK(q_threshold(PfdrTarget(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q_threshold(PfdrTarget(0.01, 0.01)) == doctest::Approx(9801.0).epsilon(1e-14));
}

TEST_CASE("PfdrTarget rejects values outside (0,1)") {
    CHECK_THROWS_AS(PfdrTarget(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(PfdrTarget(1.0, 0.1), DomainError);
    CHECK_THROWS_AS(PfdrTarget(0.05, 1.0), DomainError);
    CHECK_THROWS_AS(PfdrTarget(0.05, -0.1), DomainError);
}

TEST_CASE("min_pfdr values") {
    CHECK(min_pfdr(0.1, 171.0) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(min_pfdr(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(min_pfdr(0.1, 1.0) == doctest::Approx(0.9));
}

TEST_CASE("min_pfdr inverts q_threshold") {
    for (double a : {0.001, 0.01, 0.05, 0.2, 0.5, 0.9}) {
        for (double p : {0.001, 0.05, 0.3, 0.7, 0.99}) {
            const PfdrTarget t(a, p);
            if (q_threshold(t) < 1.0) continue;  // target met without data
            CHECK(std::abs(min_pfdr(p, q_threshold(t)) - a) < 1e-12);
        }
    }
}

TEST_CASE("min_pfdr is decreasing in rho and in pi") {
    double prev = 1.0;
    for (double rho = 1.0; rho < 1000.0; rho *= 1.7) {
        const double v = min_pfdr(0.2, rho);
        CHECK(v <= prev);
        prev = v;
    }
    prev = 1.0;
    for (double pi = 0.01; pi < 0.99; pi += 0.07) {
        const double v = min_pfdr(pi, 5.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("min_n_search on a t curve agrees with a linear scan") {
    const LrSupCurve curve{[](long n) { return lr_sup_t(n, SnrEffect(0.5)); }, false};
    const double q = 171.0;
    long scan = 1;
    while (curve.eval(scan) < q) ++scan;
    const auto bracketed = min_n_search(curve, q);
    const auto linear = min_n_search(curve, q, kDefaultNMax, SearchMode::LinearScan);
    CHECK(bracketed.n == scan);
    CHECK(linear.n == scan);
    CHECK(bracketed.rho_at_n >= q);
    CHECK(bracketed.rho_below < q);
}

TEST_CASE("min_n_search edge cases") {
    const LrSupCurve curve{[](long n) { return 1.0 + 0.01 * n; }, false};
    CHECK(min_n_search(curve, 1.0).n == 1);
    const LrSupCurve capped{[](long n) { return 2.0 - 1.0 / n; }, false};
    CHECK_THROWS_AS(min_n_search(capped, 5.0, 1000), NotAttainableError);
    try {
        min_n_search(capped, 5.0, 1000);
    } catch (const NotAttainableError& e) {
        CHECK(e.n_max() == 1000);
        CHECK(e.rho_at_n_max() == doctest::Approx(2.0 - 1.0 / 1000));
    }
}

TEST_CASE("min_n_search bracketing equals linear scan on small curves") {
    for (double slope : {0.01, 0.3, 2.0, 17.0}) {
        const LrSupCurve curve{[slope](long n) { return std::exp(slope * std::sqrt(static_cast<double>(n))); }, false};
        for (double q : {1.5, 10.0, 171.0}) {
            const auto a = min_n_search(curve, q, 1000000);
            const auto b = min_n_search(curve, q, 1000000, SearchMode::LinearScan);
            CHECK(a.n == b.n);
        }
    }
}

TEST_CASE("min_n_search falls back to a scan when sampled points decrease") {
    // rho_2 > rho_4 is visible to the doubling phase.
    const LrSupCurve curve{[](long n) { return n == 2 ? 100.0 : 5.0 * n; }, false};
    const auto r = min_n_search(curve, 171.0, 10000);
    CHECK(r.n == 35);
    CHECK_FALSE(r.monotone_checked);
    const LrSupCurve clean{[](long n) { return 5.0 * n; }, false};
    CHECK(min_n_search(clean, 171.0, 10000).monotone_checked);
}

TEST_CASE("plan report from a target records weak inequality") {
    const LrSupCurve curve{[](long n) { return static_cast<double>(n); }, false};
    const auto report = min_n_search(curve, PfdrTarget(0.5, 0.5), 100);
    REQUIRE(report.n_exact);
    CHECK(*report.n_exact == 1);
    CHECK(report.q_value == doctest::Approx(1.0));
}

TEST_CASE("regime names") {
    CHECK(to_string(Regime::Theorem2_1) == "THEOREM_2_1");
    CHECK(to_string(Regime::FRegimeC) == "REGIME_C");
    CHECK(to_string(Regime::Theorem5_1) == "THEOREM_5_1");
}

}  // TEST_SUITE

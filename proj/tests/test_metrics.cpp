#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "alc/metrics.hpp"

using namespace alc;

TEST_CASE("wilson interval matches hand-evaluated values") {
    struct Row {
        std::int64_t t, f;
        double lo, hi;
    };
    // frozen from an independent evaluation of the closed form at z = 1.96
    const std::vector<Row> rows = {
        {90, 10, 0.825632695632, 0.944771458387},
        {1, 0, 0.206543291474, 1.000000000000},
        {0, 1, 0.000000000000, 0.793456708526},
        {1, 1, 0.094528654801, 0.905471345199},
        {5, 5, 0.236589593615, 0.763410406385},
        {10, 0, 0.722459831233, 1.000000000000},
        {0, 10, 0.000000000000, 0.277540168767},
        {50, 50, 0.403829828590, 0.596170171410},
        {99, 1, 0.945512475239, 0.998232613434},
        {1, 99, 0.001767386566, 0.054487524761},
        {200, 300, 0.357978238178, 0.443546685528},
        {7, 3, 0.396773219980, 0.892210712514},
        {3, 7, 0.107789287486, 0.603226780020},
        {150, 50, 0.685657765204, 0.804919231837},
        {1000, 0, 0.996173101414, 1.000000000000},
        {0, 1000, 0.000000000000, 0.003826898586},
        {12, 34, 0.156007351944, 0.402594298083},
        {34, 12, 0.597405701917, 0.843992648056},
        {999, 1, 0.994357297040, 0.999823458171},
        {2500, 2500, 0.486146028209, 0.513853971791},
    };
    for (const Row& r : rows) {
        CAPTURE(r.t);
        CAPTURE(r.f);
        const WilsonInterval w = wilson_interval(r.t, r.f, 1.96);
        CHECK(w.lower == doctest::Approx(r.lo).epsilon(1e-9));
        CHECK(w.upper == doctest::Approx(r.hi).epsilon(1e-9));
    }
}

TEST_CASE("wilson interval degenerates to the point estimate at z = 0") {
    const WilsonInterval w = wilson_interval(90, 10, 0.0);
    CHECK(w.lower == doctest::Approx(0.9));
    CHECK(w.upper == doctest::Approx(0.9));
}

TEST_CASE("wilson bounds stay inside [0, 1]") {
    for (std::int64_t t = 0; t <= 20; ++t) {
        for (std::int64_t f = 0; f <= 20; ++f) {
            if (t + f == 0) continue;
            const WilsonInterval w = wilson_interval(t, f, 1.96);
            CHECK(w.lower >= 0.0);
            CHECK(w.upper <= 1.0);
            CHECK(w.lower <= w.upper);
        }
    }
}

TEST_CASE("probabilistic precision is the interval midpoint") {
    Counts c{90, 10, 0};
    const WilsonInterval w = wilson_interval(90, 10, 1.96);
    CHECK(probabilistic_precision(c, 1.96) == doctest::Approx((w.lower + w.upper) / 2));
    CHECK(measured_precision(c) == doctest::Approx(0.9));
}

TEST_CASE("probabilistic precision cap under width-based halting") {
    // the midpoint never exceeds 1 - width/2, so a run that halts the moment
    // the width reaches 0.1 reports at most ~0.95 even on perfect predictions
    std::int64_t first_halt = 0;
    for (std::int64_t t = 1; t <= 200; ++t) {
        const WilsonInterval w = wilson_interval(t, 0, 1.96);
        CHECK(probabilistic_precision({t, 0, 0}, 1.96) <= 1.0 - w.width() / 2 + 1e-12);
        if (first_halt == 0 && w.width() <= 0.1) first_halt = t;
    }
    REQUIRE(first_halt > 0);
    const double capped = probabilistic_precision({first_halt, 0, 0}, 1.96);
    CHECK(capped <= 0.951);
    CHECK(capped >= 0.94);
}

TEST_CASE("recall variants") {
    Counts c{30, 10, 60};
    CHECK(recall_random(c) == doctest::Approx(0.4));  // (30+10)/(30+10+60)
    // (N-A)*N'/(N*D) with N=100, A=50, N'=200, D=1000
    CHECK(recall_whole_population(100, 50, 200, 1000) == doctest::Approx(0.1));
    CHECK(recall_preselected(100, 60) == doctest::Approx(0.4));
}

TEST_CASE("prc identities") {
    PrcParams params;  // alpha 3, r_min 1e-4

    // full recall leaves precision untouched
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        CHECK(prc(p, 1.0, params) == p);
    }

    // at or below the floor the composite equals the recall itself
    CHECK(prc(1.0, 1e-4, params) == doctest::Approx(1e-4));
    CHECK(prc(0.5, 5e-5, params) == doctest::Approx(5e-5));
    CHECK(prc(0.0, 1e-5, params) == doctest::Approx(1e-5));

    // worked example: P=1, R=0.01 -> 1 - (log10 0.01 / log10 1e-4)^3 = 0.875
    CHECK(prc(1.0, 0.01, params) == doctest::Approx(0.875));
}

TEST_CASE("prc is monotone in precision and recall above the floor") {
    PrcParams params;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const double p = static_cast<double>(i) / (n - 1);
            // recall grid on [2e-4, 1], strictly above r_min
            const double r0 = 2e-4 + (1.0 - 2e-4) * j / (n - 1);
            const double r1 = 2e-4 + (1.0 - 2e-4) * (j + 1) / (n - 1);
            CHECK(prc(p, r1, params) >= prc(p, r0, params) - 1e-12);
            if (i + 1 < n) {
                const double p1 = static_cast<double>(i + 1) / (n - 1);
                CHECK(prc(p1, r0, params) >= prc(p, r0, params) - 1e-12);
            }
        }
    }
}

TEST_CASE("alc reproduces the reference pairs") {
    struct Row {
        double base, atk, abs, rel;
    };
    const std::vector<Row> rows = {
        {0.1, 0.3, 0.2, 0.222222},
        {0.75, 0.95, 0.2, 0.8},
        {0.99, 0.999, 0.009, 0.9},
    };
    for (const Row& r : rows) {
        CAPTURE(r.base);
        CHECK(alc_abs(r.atk, r.base) == doctest::Approx(r.abs).epsilon(1e-3));
        CHECK(alc_rel(r.atk, r.base) == doctest::Approx(r.rel).epsilon(1e-3));
    }
}

TEST_CASE("relative alc rejects a saturated baseline") {
    CHECK_THROWS(alc_rel(0.5, 1.0));
    CHECK_THROWS(alc_rel(0.5, 1.5));
}

TEST_CASE("risk classification boundaries") {
    CHECK(classify_alc(-0.3) == RiskClass::safe);
    CHECK(classify_alc(0.49) == RiskClass::safe);
    CHECK(classify_alc(0.5) == RiskClass::at_risk);
    CHECK(classify_alc(0.74) == RiskClass::at_risk);
    CHECK(classify_alc(0.75) == RiskClass::serious);
    CHECK(classify_alc(1.0) == RiskClass::serious);
}

TEST_CASE("f-beta") {
    CHECK(f_beta(0.0, 0.0, 1.0) == 0.0);
    CHECK(f_beta(0.5, 0.5, 1.0) == doctest::Approx(0.5));
    // beta = 2 weighs recall higher
    CHECK(f_beta(0.9, 0.1, 2.0) < f_beta(0.1, 0.9, 2.0));
    CHECK(f_beta(1.0, 1.0, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("make_measure assembles a consistent measure") {
    const PrecisionRecallMeasure m = make_measure({90, 10, 100}, 0.5, 1.96);
    CHECK(m.threshold == 0.5);
    CHECK(m.p_meas == doctest::Approx(0.9));
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.p_lower == doctest::Approx(0.825632695632).epsilon(1e-9));
    CHECK(m.p_upper == doctest::Approx(0.944771458387).epsilon(1e-9));
    CHECK(m.p_prob == doctest::Approx((m.p_lower + m.p_upper) / 2));
    CHECK(m.ci_width() == doctest::Approx(m.p_upper - m.p_lower));
}

TEST_CASE("enum round trips") {
    for (HaltReason r : {HaltReason::converged, HaltReason::early_safe,
                         HaltReason::early_compromised, HaltReason::data_exhausted}) {
        CHECK(halt_reason_from_string(to_string(r)) == r);
    }
    CHECK(to_string(RiskClass::safe) == "safe");
    CHECK(to_string(RiskClass::at_risk) == "at_risk");
    CHECK(to_string(RiskClass::serious) == "serious");
}

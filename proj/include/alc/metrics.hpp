#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Pure numeric core: Wilson intervals, precision and recall, the PRC
// composite, ALC, and the F-beta utility. Everything here is reentrant.

namespace alc {

struct Counts {
    std::int64_t t = 0;  // true predictions
    std::int64_t f = 0;  // false predictions
    std::int64_t a = 0;  // abstentions
};

struct PrcParams {
    double alpha = 3.0;
    double r_min = 0.0001;
    double z = 1.96;  // 95% confidence
    double target_ci_width = 0.1;
};

struct PrecisionRecallMeasure {
    Counts counts;
    double threshold = 0.0;  // rank-score cutoff that produced the counts
    double p_meas = 0.0;
    double p_lower = 0.0;
    double p_upper = 0.0;
    double p_prob = 0.0;  // midpoint of [p_lower, p_upper]
    double recall = 0.0;

    double ci_width() const { return p_upper - p_lower; }
};

enum class HaltReason { converged, early_safe, early_compromised, data_exhausted };

std::string to_string(HaltReason r);
HaltReason halt_reason_from_string(const std::string& s);

enum class RiskClass { safe, at_risk, serious };

std::string to_string(RiskClass c);

// ALC < 0.5 safe, [0.5, 0.75) at risk, >= 0.75 serious.
RiskClass classify_alc(double alc);

struct AlcResult {
    double prc_atk = 0.0;
    double prc_base = 0.0;
    double alc_rel = 0.0;
    double alc_abs = 0.0;
    std::vector<PrecisionRecallMeasure> atk_measures;
    std::vector<PrecisionRecallMeasure> base_measures;
    HaltReason halt_reason = HaltReason::converged;
};

struct WilsonInterval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
};

// Wilson score bounds on the true precision given T successes and F
// failures, at the confidence implied by z. Requires T+F >= 1.
WilsonInterval wilson_interval(std::int64_t t, std::int64_t f, double z);

double measured_precision(const Counts& c);                     // T/(T+F)
double probabilistic_precision(const Counts& c, double z);      // interval midpoint
double recall_random(const Counts& c);                          // (T+F)/(T+F+A)
double recall_whole_population(std::int64_t n, std::int64_t a, std::int64_t n_pre,
                               std::int64_t d);                 // (N-A)*N'/(N*D)
double recall_preselected(std::int64_t n, std::int64_t a);      // (N-A)/N

// Composite of precision and recall. For R > r_min,
// PRC = (1 - (log10 R / log10 r_min)^alpha) * P; otherwise PRC = R.
double prc(double p, double r, const PrcParams& params = {});

double alc_abs(double prc_atk, double prc_base);
// (prc_atk - prc_base)/(1 - prc_base); requires prc_base < 1
double alc_rel(double prc_atk, double prc_base);

// (1+b^2)PR/(b^2 P + R), with F = 0 when P = R = 0 by convention.
double f_beta(double p, double r, double beta);

// Convenience: counts + threshold -> full measure at confidence z.
PrecisionRecallMeasure make_measure(const Counts& c, double threshold, double z);

}  // namespace alc

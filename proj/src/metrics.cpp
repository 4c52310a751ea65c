#include "alc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace alc {

std::string to_string(HaltReason r) {
    switch (r) {
        case HaltReason::converged: return "converged";
        case HaltReason::early_safe: return "early_safe";
        case HaltReason::early_compromised: return "early_compromised";
        case HaltReason::data_exhausted: return "data_exhausted";
    }
    return "unknown";
}

HaltReason halt_reason_from_string(const std::string& s) {
    if (s == "converged") return HaltReason::converged;
    if (s == "early_safe") return HaltReason::early_safe;
    if (s == "early_compromised") return HaltReason::early_compromised;
    if (s == "data_exhausted") return HaltReason::data_exhausted;
    throw std::invalid_argument("unknown halt reason: " + s);
}

std::string to_string(RiskClass c) {
    switch (c) {
        case RiskClass::safe: return "safe";
        case RiskClass::at_risk: return "at_risk";
        case RiskClass::serious: return "serious";
    }
    return "unknown";
}

RiskClass classify_alc(double alc) {
    if (alc < 0.5) return RiskClass::safe;
    if (alc < 0.75) return RiskClass::at_risk;
    return RiskClass::serious;
}

WilsonInterval wilson_interval(std::int64_t t, std::int64_t f, double z) {
    const std::int64_t n = t + f;
    if (n < 1) throw std::invalid_argument("wilson_interval: no predictions");
    const double nn = static_cast<double>(n);
    const double p_hat = static_cast<double>(t) / nn;
    if (z == 0.0) return {p_hat, p_hat};
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p_hat + z2 / (2.0 * nn)) / denom;
    const double half =
        (z / denom) * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
    double lower = center - half;
    double upper = center + half;
    if (lower < 0.0) lower = 0.0;
    if (upper > 1.0) upper = 1.0;
    return {lower, upper};
}

double measured_precision(const Counts& c) {
    if (c.t + c.f < 1) throw std::invalid_argument("measured_precision: no predictions");
    return static_cast<double>(c.t) / static_cast<double>(c.t + c.f);
}

double probabilistic_precision(const Counts& c, double z) {
    const WilsonInterval w = wilson_interval(c.t, c.f, z);
    return w.lower + (w.upper - w.lower) / 2.0;
}

double recall_random(const Counts& c) {
    const std::int64_t attempts = c.t + c.f + c.a;
    if (attempts < 1) throw std::invalid_argument("recall_random: no attempts");
    return static_cast<double>(c.t + c.f) / static_cast<double>(attempts);
}

double recall_whole_population(std::int64_t n, std::int64_t a, std::int64_t n_pre,
                               std::int64_t d) {
    if (n < 1 || d < 1) throw std::invalid_argument("recall_whole_population: N and D must be >= 1");
    if (a < 0 || a > n || n > d)
        throw std::invalid_argument("recall_whole_population: requires D >= N >= A >= 0");
    return static_cast<double>(n - a) * static_cast<double>(n_pre) /
           (static_cast<double>(n) * static_cast<double>(d));
}

double recall_preselected(std::int64_t n, std::int64_t a) {
    if (n < 1) throw std::invalid_argument("recall_preselected: N must be >= 1");
    if (a < 0 || a > n) throw std::invalid_argument("recall_preselected: requires 0 <= A <= N");
    return static_cast<double>(n - a) / static_cast<double>(n);
}

double prc(double p, double r, const PrcParams& params) {
    if (r <= 0.0) throw std::invalid_argument("prc: recall must be positive");
    if (r > 1.0 || p < 0.0 || p > 1.0) throw std::invalid_argument("prc: arguments out of range");
    if (r <= params.r_min) return r;
    const double ratio = std::log10(r) / std::log10(params.r_min);
    return (1.0 - std::pow(ratio, params.alpha)) * p;
}

double alc_abs(double prc_atk, double prc_base) { return prc_atk - prc_base; }

double alc_rel(double prc_atk, double prc_base) {
    if (prc_base >= 1.0) throw std::invalid_argument("alc_rel: degenerate baseline");
    return (prc_atk - prc_base) / (1.0 - prc_base);
}

double f_beta(double p, double r, double beta) {
    if (beta <= 0.0) throw std::invalid_argument("f_beta: beta must be positive");
    if (p == 0.0 && r == 0.0) return 0.0;  // conventional limit
    const double b2 = beta * beta;
    return (1.0 + b2) * p * r / (b2 * p + r);
}

PrecisionRecallMeasure make_measure(const Counts& c, double threshold, double z) {
    PrecisionRecallMeasure m;
    m.counts = c;
    m.threshold = threshold;
    m.p_meas = measured_precision(c);
    const WilsonInterval w = wilson_interval(c.t, c.f, z);
    m.p_lower = w.lower;
    m.p_upper = w.upper;
    m.p_prob = w.lower + (w.upper - w.lower) / 2.0;
    m.recall = recall_random(c);
    return m;
}

}  // namespace alc

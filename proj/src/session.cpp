#include "alc/session.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace alc {

namespace {

Counts counts_at_threshold(const Ledger& ledger, double threshold) {
    Counts c;
    for (const PredictionRecord& rec : ledger) {
        if (rec.is_prediction && rec.rank_score >= threshold) {
            if (rec.correct) ++c.t;
            else ++c.f;
        } else {
            ++c.a;
        }
    }
    return c;
}

// all-predictions measure (threshold at the minimum prediction score)
PrecisionRecallMeasure full_measure(const Ledger& ledger, const PrcParams& params) {
    double min_score = std::numeric_limits<double>::infinity();
    for (const PredictionRecord& rec : ledger) {
        if (rec.is_prediction) min_score = std::min(min_score, rec.rank_score);
    }
    if (!std::isfinite(min_score)) throw std::invalid_argument("no predictions");
    return make_measure(counts_at_threshold(ledger, min_score), min_score, params.z);
}

bool has_prediction(const Ledger& ledger) {
    return std::any_of(ledger.begin(), ledger.end(),
                       [](const PredictionRecord& r) { return r.is_prediction; });
}

double measure_prc(const PrecisionRecallMeasure& m, const PrcParams& params) {
    return prc(m.p_prob, m.recall, params);
}

}  // namespace

std::string to_string(Approach a) {
    switch (a) {
        case Approach::ours: return "ours";
        case Approach::ours_no_recall: return "ours_no_recall";
        case Approach::prior: return "prior";
    }
    return "unknown";
}

Approach approach_from_string(const std::string& s) {
    if (s == "ours") return Approach::ours;
    if (s == "ours_no_recall") return Approach::ours_no_recall;
    if (s == "prior") return Approach::prior;
    throw std::invalid_argument("unknown approach: " + s);
}

std::vector<PrecisionRecallMeasure> threshold_sweep(const Ledger& ledger, int n_prc,
                                                    const PrcParams& params) {
    std::vector<double> scores;
    for (const PredictionRecord& rec : ledger) {
        if (rec.is_prediction) scores.push_back(rec.rank_score);
    }
    if (scores.empty()) throw std::invalid_argument("no predictions");
    std::sort(scores.begin(), scores.end());
    const std::size_t distinct =
        std::set<double>(scores.begin(), scores.end()).size();
    const int bins = std::max(1, std::min<int>(n_prc, static_cast<int>(distinct)));

    std::set<double> thresholds;
    thresholds.insert(scores.front());  // the all-predictions measure
    for (int i = 1; i < bins; ++i) {
        const std::size_t idx = i * scores.size() / bins;
        thresholds.insert(scores[idx]);
    }

    std::vector<PrecisionRecallMeasure> measures;
    for (double t : thresholds) measures.push_back(make_measure(counts_at_threshold(ledger, t), t, params.z));
    // lowest recall first
    std::sort(measures.begin(), measures.end(),
              [](const PrecisionRecallMeasure& a, const PrecisionRecallMeasure& b) {
                  return a.recall < b.recall;
              });
    return measures;
}

HaltDecision check_halt(const Ledger& atk, const Ledger& base, HaltState& state,
                        const HaltParams& hp, const PrcParams& pp, bool allow_growth) {
    if (!has_prediction(atk) || !has_prediction(base)) return {false, HaltReason::converged};

    const PrecisionRecallMeasure fa = full_measure(atk, pp);
    const PrecisionRecallMeasure fb = full_measure(base, pp);

    // early safe: even the most attack-favorable reading of the intervals
    // stays below the safe bar
    if (fa.ci_width() < 0.5 && fb.ci_width() < 0.5) {
        const double opt_atk = prc(fa.p_upper, fa.recall, pp);
        const double opt_base = prc(fb.p_lower, fb.recall, pp);
        if (opt_base < 1.0 && alc_rel(opt_atk, opt_base) < hp.early_safe_alc)
            return {true, HaltReason::early_safe};
    }

    // early compromised: even the most attack-hostile reading exceeds the bar
    {
        const double pess_atk = prc(fa.p_lower, fa.recall, pp);
        const double pess_base = prc(fb.p_upper, fb.recall, pp);
        if (pess_base < 1.0 && alc_rel(pess_atk, pess_base) > hp.early_compromised_alc)
            return {true, HaltReason::early_compromised};
    }

    // significance: every current measure on both sides must be tight
    const std::vector<PrecisionRecallMeasure> ma = threshold_sweep(atk, state.n_prc, pp);
    const std::vector<PrecisionRecallMeasure> mb = threshold_sweep(base, state.n_prc, pp);
    for (const auto& m : ma) {
        if (m.ci_width() > pp.target_ci_width) return {false, HaltReason::converged};
    }
    for (const auto& m : mb) {
        if (m.ci_width() > pp.target_ci_width) return {false, HaltReason::converged};
    }

    if (!allow_growth) return {true, HaltReason::converged};

    // growth: keep going while the lowest-recall attack PRCs still improve
    std::vector<double> lows;
    for (std::size_t i = 0; i < ma.size() && i < 3; ++i) lows.push_back(measure_prc(ma[i], pp));
    if (state.has_snapshot && state.snapshot_prcs.size() == lows.size()) {
        bool improved = true;
        for (std::size_t i = 0; i < lows.size(); ++i) {
            if (lows[i] - state.snapshot_prcs[i] < hp.min_improvement) {
                improved = false;
                break;
            }
        }
        if (!improved) return {true, HaltReason::converged};
    }
    state.has_snapshot = true;
    state.snapshot_prcs = std::move(lows);
    ++state.n_prc;
    return {false, HaltReason::converged};
}

AlcResult finalize(const Ledger& atk, const Ledger& base, int n_prc, const PrcParams& params,
                   HaltReason reason) {
    AlcResult result;
    result.halt_reason = reason;
    if (!has_prediction(atk) || !has_prediction(base)) {
        // zero predictions: measures stay empty, scores stay zero
        result.halt_reason = HaltReason::data_exhausted;
        return result;
    }
    result.atk_measures = threshold_sweep(atk, n_prc, params);
    result.base_measures = threshold_sweep(base, n_prc, params);
    result.prc_atk = 0.0;
    for (const auto& m : result.atk_measures)
        result.prc_atk = std::max(result.prc_atk, prc(m.p_prob, m.recall, params));
    result.prc_base = 0.0;
    for (const auto& m : result.base_measures)
        result.prc_base = std::max(result.prc_base, prc(m.p_prob, m.recall, params));
    result.alc_abs = alc_abs(result.prc_atk, result.prc_base);
    result.alc_rel = alc_rel(result.prc_atk, result.prc_base);
    return result;
}

SessionOutput run_session(const AttackScenario& scenario, const TabularDataset& orig,
                          const std::vector<TabularDataset>& anon, const AttackFn& attacker,
                          const SessionConfig& config) {
    if (anon.empty() && config.approach != Approach::prior)
        throw std::invalid_argument("no anonymized datasets");
    if (orig.column_index(scenario.unknown_attribute) < 0)
        throw std::invalid_argument("unknown attribute not in original: " +
                                    scenario.unknown_attribute);
    if (config.approach == Approach::prior && !config.prior_anon_builder)
        throw std::invalid_argument("prior approach requires an anonymization builder");

    const TabularDataset prepared = discretize(orig, config.bins);
    std::vector<TabularDataset> prepared_anon;
    prepared_anon.reserve(anon.size());
    for (const TabularDataset& a : anon) prepared_anon.push_back(align_to(a, prepared));

    const std::string& unknown = scenario.unknown_attribute;
    const SamplingPolicy policy = make_sampling_policy(prepared, unknown);

    SessionOutput out;
    HaltState halt_state;
    bool grow = config.approach == Approach::ours;
    halt_state.n_prc = grow ? config.halt.initial_n_prc : 1;

    BlockPlan plan(prepared.row_count(), config.seed);
    bool halted = false;
    HaltReason reason = HaltReason::data_exhausted;
    std::uint64_t block_counter = 0;

    while (!plan.exhausted() && !halted) {
        BlockPlan::Block block = plan.next_block();
        BaselineModel model;
        if (config.approach != Approach::prior) {
            model = fit(select_rows(prepared, block.training), scenario.known_attributes, unknown,
                        config.hyper, config.seed + 1 + block_counter);
        }
        const std::vector<std::size_t> rows = downsample_stream(
            block.holdout, prepared, unknown, policy, config.seed + 7919 * (block_counter + 1));

        for (std::size_t row : rows) {
            const std::int64_t target_id = prepared.individual_ids[row];
            const double truth = static_cast<double>(label_of(prepared, row, unknown));
            TargetKnowns knowns;
            knowns.columns = scenario.known_attributes;
            knowns.values = features_of(prepared, row, scenario.known_attributes);

            PredictionRecord base_rec;
            base_rec.ledger = LedgerSide::baseline;
            base_rec.target_id = target_id;
            base_rec.true_value = truth;
            if (config.approach == Approach::prior) {
                TabularDataset remainder = remove_targets(prepared, {target_id});
                TabularDataset prior_anon = config.prior_anon_builder(
                    remainder, config.seed + static_cast<std::uint64_t>(out.attempts));
                auto match = best_row_match(knowns, {prior_anon}, unknown);
                if (match) {
                    base_rec.predicted_value = match->predicted_value;
                    base_rec.rank_score = to_prediction(*match).rank_score;
                } else {
                    base_rec.predicted_value = truth - 1;  // counts as wrong
                    base_rec.rank_score = 0.0;
                }
            } else {
                auto [value, proba] = model.predict_with_probability(knowns.values);
                base_rec.predicted_value = static_cast<double>(value);
                base_rec.rank_score = proba;
            }
            base_rec.correct = base_rec.predicted_value == truth;
            out.baseline_ledger.push_back(base_rec);

            PredictionRecord atk_rec;
            atk_rec.ledger = LedgerSide::attack;
            atk_rec.target_id = target_id;
            atk_rec.true_value = truth;
            auto prediction = attacker(knowns, prepared_anon);
            if (prediction) {
                atk_rec.predicted_value = prediction->value;
                atk_rec.rank_score = prediction->rank_score;
            } else {
                // attacker abstained: the baseline's prediction stands in,
                // ranked below every genuine attack prediction
                atk_rec.predicted_value = base_rec.predicted_value;
                atk_rec.rank_score = 0.0;
            }
            atk_rec.correct = atk_rec.predicted_value == truth;
            out.attack_ledger.push_back(atk_rec);

            ++out.attempts;
            if (out.attempts % config.halt.check_period == 0) {
                HaltDecision decision = check_halt(out.attack_ledger, out.baseline_ledger,
                                                   halt_state, config.halt, config.prc, grow);
                if (decision.halt) {
                    halted = true;
                    reason = decision.reason;
                    break;
                }
            }
        }
        ++block_counter;
    }

    out.final_n_prc = halt_state.n_prc;
    out.result = finalize(out.attack_ledger, out.baseline_ledger, halt_state.n_prc, config.prc,
                          reason);
    return out;
}

}  // namespace alc

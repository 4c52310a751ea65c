#pragma once

#include <cstdint>
#include <vector>

#include "alc/attacks.hpp"
#include "alc/baseline.hpp"
#include "alc/dataset.hpp"
#include "alc/metrics.hpp"

// The measurement engine: drives the predictor loop over shuffled holdout
// blocks, records attack and baseline ledgers, sweeps rank-score thresholds
// into measures, applies the halting criteria, and finalizes the ALC result.

namespace alc {

enum class LedgerSide { attack, baseline };

struct PredictionRecord {
    std::int64_t target_id = 0;
    LedgerSide ledger = LedgerSide::attack;
    bool correct = false;
    double rank_score = 0.0;
    bool is_prediction = true;  // false = abstention
    double predicted_value = 0.0;
    double true_value = 0.0;
};

using Ledger = std::vector<PredictionRecord>;

struct HaltParams {
    int initial_n_prc = 3;
    int check_period = 20;
    double min_improvement = 0.01;
    double early_safe_alc = 0.4;
    double early_compromised_alc = 0.9;
};

struct HaltState {
    int n_prc = 3;
    bool has_snapshot = false;
    // PRCs of the lowest-recall measures at the previous significant check
    std::vector<double> snapshot_prcs;
};

struct HaltDecision {
    bool halt = false;
    HaltReason reason = HaltReason::converged;
};

enum class Approach { ours, ours_no_recall, prior };

std::string to_string(Approach a);
Approach approach_from_string(const std::string& s);

struct SessionConfig {
    PrcParams prc;
    HaltParams halt;
    BaselineHyper hyper;
    Approach approach = Approach::ours;
    std::uint64_t seed = 0;
    int bins = 20;
    // required for Approach::prior: builds the per-target anonymized remainder
    AnonBuilder prior_anon_builder;
};

struct SessionOutput {
    AlcResult result;
    Ledger attack_ledger;
    Ledger baseline_ledger;
    int final_n_prc = 1;
    std::int64_t attempts = 0;
};

// Partitions prediction rank scores into n_prc quantile bins and produces
// one measure per bin boundary plus the all-predictions threshold. Fewer
// distinct scores than bins yield correspondingly fewer measures. Recall is
// computed over all attempts (predictions and abstentions).
std::vector<PrecisionRecallMeasure> threshold_sweep(const Ledger& ledger, int n_prc,
                                                    const PrcParams& params);

// One halting check, in order: early-safe (optimistic ALC from the attack
// upper and baseline lower bounds), early-compromised (pessimistic ALC from
// the opposite bounds), significance of all current measures, then the
// PRC-growth rule that increments n_prc. Mutates `state`.
HaltDecision check_halt(const Ledger& atk, const Ledger& base, HaltState& state,
                        const HaltParams& hp, const PrcParams& pp, bool allow_growth);

// Sweeps both ledgers, takes the highest PRC per side (PRC of the
// probabilistic precision), and computes both ALC variants.
AlcResult finalize(const Ledger& atk, const Ledger& base, int n_prc, const PrcParams& params,
                   HaltReason reason);

SessionOutput run_session(const AttackScenario& scenario, const TabularDataset& orig,
                          const std::vector<TabularDataset>& anon, const AttackFn& attacker,
                          const SessionConfig& config);

}  // namespace alc

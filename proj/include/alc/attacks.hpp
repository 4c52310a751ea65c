#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alc/dataset.hpp"

// The attack framework and the built-in best-row-match attack: a brute-force
// Gower-distance scan over the anonymized tables, modal-value prediction,
// and a (1 - G_min) * (M / C) rank score.

namespace alc {

enum class SelectionMode { random };  // pre-targeted is reserved

struct AttackScenario {
    std::vector<std::string> known_attributes;
    std::string unknown_attribute;
    SelectionMode selection_mode = SelectionMode::random;
    std::string label;
};

struct MatchResult {
    double g_min = 1.0;
    std::int64_t matching_rows = 0;  // C
    std::int64_t modal_count = 0;    // M
    double predicted_value = 0.0;    // label code, or bin index when continuous
};

struct AttackPrediction {
    double value = 0.0;
    double rank_score = 0.0;
};

// Target known attributes paired with their values (codes / raw values).
struct TargetKnowns {
    std::vector<std::string> columns;
    std::vector<double> values;
};

// Mean per-attribute dissimilarity between the target's knowns and row
// `row` of `table`: categorical 0/1, continuous |a-b|/range with the range
// taken from `table`; attributes absent from the table count as 1.
double gower_distance(const TargetKnowns& target, const TabularDataset& table, std::size_t row);

// Scans every table containing the unknown attribute and at least one known
// attribute; rows at the global minimum distance vote, the modal unknown
// value wins (ties to the lowest encoded value). Empty when no table
// qualifies (the attack abstains).
std::optional<MatchResult> best_row_match(const TargetKnowns& target,
                                          const std::vector<TabularDataset>& anon,
                                          const std::string& unknown);

inline AttackPrediction to_prediction(const MatchResult& m) {
    return {m.predicted_value,
            (1.0 - m.g_min) * static_cast<double>(m.modal_count) /
                static_cast<double>(m.matching_rows)};
}

// An attack plugged into the measurement loop: given the target's known
// attributes and the prepared (encoded, discretized) anonymized tables,
// return a prediction or abstain (nullopt).
using AttackFn = std::function<std::optional<AttackPrediction>(
    const TargetKnowns&, const std::vector<TabularDataset>&)>;

// The built-in attack wrapped as an AttackFn.
AttackFn best_row_match_attack(const std::string& unknown);

// Builds the anonymization used by the prior-approach baseline: original
// data minus one target, anonymized deterministically from the seed.
using AnonBuilder = std::function<TabularDataset(const TabularDataset& orig_minus_target,
                                                 std::uint64_t seed)>;

struct PriorBaselineEntry {
    std::int64_t target_id = 0;
    bool correct = false;
    double predicted_value = 0.0;
    double true_value = 0.0;
};

// Prior-approach baseline: per target, remove it from the original,
// anonymize the remainder, and run best_row_match as the baseline
// predictor. Every attempt is a prediction (recall is always 1).
std::vector<PriorBaselineEntry> prior_mode_baseline(const AttackScenario& scenario,
                                                    const TabularDataset& orig,
                                                    const AnonBuilder& anon_builder,
                                                    const std::vector<std::int64_t>& targets,
                                                    std::uint64_t seed);

}  // namespace alc

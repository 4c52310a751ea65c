#include "alc/attacks.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "alc/baseline.hpp"

namespace alc {

namespace {

double unknown_value_of(std::size_t row, const Column& col) {
    if (col.is_continuous()) {
        if (col.bins.empty())
            throw std::runtime_error("continuous unknown attribute is not discretized: " +
                                     col.schema.name);
        return static_cast<double>(col.bins[row]);
    }
    return col.values[row];
}

}  // namespace

double gower_distance(const TargetKnowns& target, const TabularDataset& table, std::size_t row) {
    if (target.columns.empty()) throw std::invalid_argument("no known attributes");
    double sum = 0.0;
    for (std::size_t k = 0; k < target.columns.size(); ++k) {
        const int ci = table.column_index(target.columns[k]);
        if (ci < 0) {
            sum += 1.0;  // absent attribute counts as a full mismatch
            continue;
        }
        const Column& col = table.columns[ci];
        const double a = target.values[k];
        const double b = col.values[row];
        if (col.is_continuous()) {
            const double range = col.schema.max - col.schema.min;
            if (range > 0.0) {
                sum += std::min(1.0, std::abs(a - b) / range);
            } else {
                sum += (a == b) ? 0.0 : 1.0;
            }
        } else {
            sum += (a == b) ? 0.0 : 1.0;
        }
    }
    return sum / static_cast<double>(target.columns.size());
}

std::optional<MatchResult> best_row_match(const TargetKnowns& target,
                                          const std::vector<TabularDataset>& anon,
                                          const std::string& unknown) {
    double g_min = std::numeric_limits<double>::infinity();
    // unknown value -> count among minimum-distance rows, ordered so the
    // modal tie breaks to the lowest encoded value
    std::map<double, std::int64_t> counts;
    bool any_table = false;

    for (const TabularDataset& table : anon) {
        const int ui = table.column_index(unknown);
        if (ui < 0) continue;
        bool has_known = false;
        for (const std::string& k : target.columns) {
            if (table.column_index(k) >= 0) {
                has_known = true;
                break;
            }
        }
        if (!has_known) continue;
        any_table = true;
        const Column& ucol = table.columns[ui];
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const double d = gower_distance(target, table, r);
            if (d > g_min) continue;
            if (d < g_min) {
                g_min = d;
                counts.clear();
            }
            ++counts[unknown_value_of(r, ucol)];
        }
    }
    if (!any_table || counts.empty()) return std::nullopt;

    MatchResult result;
    result.g_min = g_min;
    std::int64_t best_count = 0;
    for (const auto& [value, count] : counts) {
        result.matching_rows += count;
        if (count > best_count) {
            best_count = count;
            result.predicted_value = value;
        }
    }
    result.modal_count = best_count;
    return result;
}

AttackFn best_row_match_attack(const std::string& unknown) {
    return [unknown](const TargetKnowns& target,
                     const std::vector<TabularDataset>& anon) -> std::optional<AttackPrediction> {
        auto match = best_row_match(target, anon, unknown);
        if (!match) return std::nullopt;
        return to_prediction(*match);
    };
}

std::vector<PriorBaselineEntry> prior_mode_baseline(const AttackScenario& scenario,
                                                    const TabularDataset& orig,
                                                    const AnonBuilder& anon_builder,
                                                    const std::vector<std::int64_t>& targets,
                                                    std::uint64_t seed) {
    if (targets.empty()) throw std::invalid_argument("no targets");
    TabularDataset prepared = orig;
    if (prepared.column(scenario.unknown_attribute).is_continuous() &&
        prepared.column(scenario.unknown_attribute).bins.empty()) {
        prepared = discretize(prepared, 20);
    }

    std::vector<PriorBaselineEntry> ledger;
    ledger.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::int64_t id = targets[i];
        std::size_t row = prepared.row_count();
        for (std::size_t r = 0; r < prepared.row_count(); ++r) {
            if (prepared.individual_ids[r] == id) {
                row = r;
                break;
            }
        }
        if (row == prepared.row_count())
            throw std::runtime_error("unknown target id: " + std::to_string(id));

        TargetKnowns knowns;
        knowns.columns = scenario.known_attributes;
        knowns.values = features_of(prepared, row, scenario.known_attributes);
        const double truth =
            unknown_value_of(row, prepared.column(scenario.unknown_attribute));

        TabularDataset remainder = remove_targets(prepared, {id});
        TabularDataset anon = anon_builder(remainder, seed + i);

        PriorBaselineEntry entry;
        entry.target_id = id;
        entry.true_value = truth;
        auto match = best_row_match(knowns, {anon}, scenario.unknown_attribute);
        if (match) {
            entry.predicted_value = match->predicted_value;
        } else {
            // no qualifying table: fall back on the remainder's modal value
            std::map<double, std::int64_t> freq;
            const Column& ucol = remainder.column(scenario.unknown_attribute);
            for (std::size_t r = 0; r < remainder.row_count(); ++r)
                ++freq[unknown_value_of(r, ucol)];
            std::int64_t best = 0;
            for (const auto& [value, count] : freq) {
                if (count > best) {
                    best = count;
                    entry.predicted_value = value;
                }
            }
        }
        entry.correct = entry.predicted_value == truth;
        ledger.push_back(entry);
    }
    return ledger;
}

}  // namespace alc

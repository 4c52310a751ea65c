#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alc/harness.hpp"
#include "alc/session.hpp"

// Configuration parsing and artifact writers behind the CLI commands.
// Everything written here is plain CSV/JSON/text; plotting is external.

namespace alc {

struct ScenarioSpec {
    std::string label;
    std::vector<std::string> known;
    std::string unknown;
};

struct RunConfig {
    std::string original;
    std::vector<std::string> anonymized;
    std::string out_dir = "out";
    std::vector<ScenarioSpec> scenarios;
    PrcParams prc;
    HaltParams halt;
    BaselineHyper hyper;
    Approach approach = Approach::ours;
    int bins = 20;
    std::uint64_t seed = 0;
};

// Flat JSON document with schema validation; unknown keys are an error
// naming the key.
RunConfig parse_run_config(const std::string& path);

struct ComparePlanConfig {
    struct DatasetSpec {
        std::string name;
        std::string path;
        std::vector<std::string> unknowns;  // empty = every column
    };
    std::vector<DatasetSpec> datasets;
    std::vector<double> swap_fractions = {0.2, 0.8};
    int known_sets_per_unknown = 5;
    double uniqueness_target = 0.9;
    std::vector<Approach> approaches = {Approach::ours, Approach::prior};
    std::string out_dir = "out";
    PrcParams prc;
    HaltParams halt;
    BaselineHyper hyper;
    int bins = 20;
    std::uint64_t seed = 0;
    int jobs = 1;
};

ComparePlanConfig parse_compare_config(const std::string& path);

struct CurvesConfig {
    std::vector<double> prc_iso;
    std::vector<double> alc_iso;
    int points = 200;
    PrcParams prc;
    std::string out_dir = "out";
};

CurvesConfig parse_curves_config(const std::string& path);

struct ReplicationConfig {
    std::string input;
    std::vector<std::string> unknowns;
    std::vector<int> replication_counts = {0, 1, 2, 5, 10};
    std::size_t max_targets = 1000;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
};

ReplicationConfig parse_replication_config(const std::string& path);

struct ScenarioOutcome {
    std::string label;
    SessionOutput session;
};

// Runs every scenario and writes predictions.csv, measures.csv,
// results.json, and summary.txt into out_dir. Returns the outcomes.
std::vector<ScenarioOutcome> cmd_measure(const RunConfig& config);

void cmd_anonymize(const std::string& input, double swap_fraction, std::uint64_t seed,
                   const std::string& output);

// Runs the matrix and writes matrix.csv, comparison.csv, and scatter.csv
// (ALC values in the scatter data are clipped at -0.2; matrix.csv keeps
// the raw values).
std::vector<MatrixRow> cmd_compare(const ComparePlanConfig& config);

void cmd_curves(const CurvesConfig& config);

std::vector<ReplicationRow> cmd_replication(const ReplicationConfig& config);

// Artifact writers, exposed for reuse and tests.
void write_predictions_csv(const std::string& path, const std::vector<ScenarioOutcome>& outcomes);
void write_measures_csv(const std::string& path, const std::vector<ScenarioOutcome>& outcomes,
                        const PrcParams& params);
void write_results_json(const std::string& path, const std::vector<ScenarioOutcome>& outcomes,
                        const PrcParams& params);
void write_summary(const std::string& path, const std::vector<ScenarioOutcome>& outcomes);

// Re-reads one scenario's ledger from predictions.csv; with the persisted
// n_prc this reproduces the reported ALC through threshold_sweep+finalize.
Ledger read_predictions_csv(const std::string& path, const std::string& scenario,
                            LedgerSide side);

std::string format_number(double v);  // shortest round-trip decimal

}  // namespace alc

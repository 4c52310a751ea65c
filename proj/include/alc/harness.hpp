#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alc/session.hpp"

// Experiment orchestration: known-attribute set selection, the swap-variant
// attack matrix across approaches, the classification comparison table, and
// the dependent-record replication study.

namespace alc {

struct ExperimentDataset {
    std::string name;
    TabularDataset data;
    // empty = every column in turn
    std::vector<std::string> unknown_attributes;
};

struct ExperimentPlan {
    std::vector<ExperimentDataset> datasets;
    std::vector<double> swap_fractions = {0.2, 0.8};
    int known_sets_per_unknown = 5;
    double uniqueness_target = 0.9;
    std::vector<Approach> approaches = {Approach::ours, Approach::prior};
    std::uint64_t seed = 0;
    SessionConfig session;  // prc/halt/hyper defaults shared by every cell
    int jobs = 1;
};

struct KnownSetResult {
    std::vector<std::vector<std::string>> sets;
    bool degenerate = false;  // target unreachable; the full column set was returned
};

// Grows random candidate column sets (excluding the unknown) until the
// fraction of rows with a unique known-value combination reaches the
// target, preferring the smallest size any draw achieves. Falls back on the
// full column set with a warning when the target is unreachable.
KnownSetResult generate_known_sets(const TabularDataset& ds, const std::string& unknown,
                                   int n_sets, double uniqueness_target, std::uint64_t seed);

// Fraction of rows whose combination of `columns` values appears exactly once.
double uniqueness_fraction(const TabularDataset& ds, const std::vector<std::string>& columns);

struct MatrixRow {
    std::string dataset;
    std::vector<std::string> known;
    std::string unknown;
    double swap_fraction = 0.0;
    Approach approach = Approach::ours;
    AlcResult result;
    std::int64_t n_predictions = 0;
    bool failed = false;
    std::string error;
};

// One session per (dataset, known set, unknown, swap fraction, approach).
// Individual failures are recorded and the matrix continues.
std::vector<MatrixRow> run_matrix(const ExperimentPlan& plan);

struct ComparisonCell {
    RiskClass ours_class = RiskClass::safe;
    RiskClass other_class = RiskClass::safe;
    std::int64_t count = 0;
    double fraction = 0.0;
};

struct ComparisonTable {
    Approach other = Approach::prior;
    std::vector<ComparisonCell> cells;
    std::int64_t total = 0;
};

// Cross-tabulates risk classes of "ours" against each other approach over
// shared configurations.
std::vector<ComparisonTable> classify_and_compare(const std::vector<MatrixRow>& results);

struct ReplicationRow {
    std::string unknown;
    std::string variant;  // hyperparameter variant name
    int replicas = 0;
    double precision = 0.0;
    double abs_error = 0.0;  // |precision - precision at 0 replicas|
    std::int64_t n_predictions = 0;
};

struct ReplicationVariant {
    std::string name;
    BaselineHyper hyper;
};

// Dependent-record study: non-member targets whose unknown value has
// frequency < 10% are held out, replicated k times into the training data,
// and the baseline precision error vs. the 0-replica run is recorded per
// hyperparameter variant.
std::vector<ReplicationRow> replication_study(const TabularDataset& ds,
                                              const std::vector<std::string>& unknowns,
                                              const std::vector<int>& replication_counts,
                                              const std::vector<ReplicationVariant>& variants,
                                              std::size_t max_targets, std::uint64_t seed);

// Deterministic synthetic table for desk-scale experiments: `n_known`
// categorical known attributes of the given cardinality (jointly near
// unique), one unknown attribute drawn independently of the knowns, and one
// continuous column.
TabularDataset make_synthetic_dataset(std::size_t n_rows, int n_known, int cardinality,
                                      std::uint64_t seed, bool with_continuous = true);

}  // namespace alc

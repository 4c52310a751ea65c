#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alc/dataset.hpp"

// The non-member baseline predictor: a bagged ensemble of axis-aligned
// decision trees (Gini impurity, sqrt-feature subsampling per split)
// returning a predicted label and the ensemble vote fraction as rank score.

namespace alc {

struct BaselineHyper {
    int trees = 200;
    int min_split = 10;
    int min_leaf = 10;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;  // leaf prediction
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int predict(const std::vector<double>& features) const;

    // leaf-only tree that always predicts `label`; used to stub ensembles
    static DecisionTree leaf(int label);
};

class BaselineModel {
public:
    std::vector<DecisionTree> trees;
    std::vector<std::string> feature_columns;
    std::string label_column;
    int n_classes = 0;

    // Majority vote across trees; rank score is the vote fraction of the
    // winning label. Ties break toward the lowest label code.
    std::pair<int, double> predict_with_probability(const std::vector<double>& features) const;
};

// Trains the ensemble on `train`. The label column is the unknown attribute:
// its categorical codes, or its bin indices when continuous (requires a
// discretized companion). Deterministic for a fixed seed.
BaselineModel fit(const TabularDataset& train, const std::vector<std::string>& known,
                  const std::string& unknown, const BaselineHyper& hyper, std::uint64_t seed);

// Encoded label of `row` in the unknown column (bin index if continuous).
int label_of(const TabularDataset& ds, std::size_t row, const std::string& unknown);

std::vector<double> features_of(const TabularDataset& ds, std::size_t row,
                                const std::vector<std::string>& known);

// Shuffled row order partitioned into holdout blocks of
// min(1000, ceil(0.10*N)) rows; the model is retrained per block.
class BlockPlan {
public:
    BlockPlan(std::size_t n_rows, std::uint64_t seed);

    std::size_t block_size() const { return block_size_; }
    bool exhausted() const { return next_ >= order_.size(); }

    struct Block {
        std::vector<std::size_t> holdout;
        std::vector<std::size_t> training;
    };
    Block next_block();  // throws if exhausted

private:
    std::vector<std::size_t> order_;
    std::size_t block_size_ = 1;
    std::size_t next_ = 0;
};

struct SamplingPolicy {
    bool has_dominant = false;
    double dominant_value = 0.0;
    double keep_probability = 1.0;
};

// Detects a label value covering more than 50% of rows. The keep
// probability is chosen so the emitted dominant share is 50%.
SamplingPolicy make_sampling_policy(const TabularDataset& ds, const std::string& unknown);

// Filters `rows`, skipping dominant-label rows with probability
// 1 - keep_probability. Pass-through when no value dominates.
std::vector<std::size_t> downsample_stream(const std::vector<std::size_t>& rows,
                                           const TabularDataset& ds, const std::string& unknown,
                                           const SamplingPolicy& policy, std::uint64_t seed);

}  // namespace alc

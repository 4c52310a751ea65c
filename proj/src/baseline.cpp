#include "alc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace alc {

namespace {

struct TreeBuilder {
    const std::vector<std::vector<double>>& feats;  // [feature][row]
    const std::vector<int>& labels;
    int n_classes;
    int min_split;
    int min_leaf;
    int features_per_split;
    std::mt19937_64& rng;
    std::vector<TreeNode> nodes;

    int majority(const std::vector<std::size_t>& idx) const {
        std::vector<int> counts(n_classes, 0);
        for (std::size_t i : idx) ++counts[labels[i]];
        int best = 0;
        for (int c = 1; c < n_classes; ++c) {
            if (counts[c] > counts[best]) best = c;  // tie keeps the lower code
        }
        return best;
    }

    static double gini(const std::vector<int>& counts, double n) {
        double g = 1.0;
        for (int c : counts) {
            const double p = c / n;
            g -= p * p;
        }
        return g;
    }

    int build(std::vector<std::size_t>& idx) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        bool pure = true;
        for (std::size_t i = 1; i < idx.size(); ++i) {
            if (labels[idx[i]] != labels[idx[0]]) {
                pure = false;
                break;
            }
        }
        if (pure || static_cast<int>(idx.size()) < min_split) {
            nodes[node_id].label = majority(idx);
            return node_id;
        }

        // sample feature candidates without replacement
        std::vector<int> cand(feats.size());
        std::iota(cand.begin(), cand.end(), 0);
        for (int i = 0; i < features_per_split && i < static_cast<int>(cand.size()); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, cand.size() - 1);
            std::swap(cand[i], cand[pick(rng)]);
        }
        cand.resize(std::min<std::size_t>(features_per_split, cand.size()));

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> sorted = idx;
        for (int f : cand) {
            const std::vector<double>& v = feats[f];
            std::sort(sorted.begin(), sorted.end(),
                      [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
            std::vector<int> left_counts(n_classes, 0);
            std::vector<int> right_counts(n_classes, 0);
            for (std::size_t i : sorted) ++right_counts[labels[i]];
            const double n_total = static_cast<double>(sorted.size());
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const int lab = labels[sorted[i]];
                ++left_counts[lab];
                --right_counts[lab];
                if (v[sorted[i]] == v[sorted[i + 1]]) continue;
                const double n_left = static_cast<double>(i + 1);
                const double n_right = n_total - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                const double impurity =
                    (n_left * gini(left_counts, n_left) + n_right * gini(right_counts, n_right)) /
                    n_total;
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = (v[sorted[i]] + v[sorted[i + 1]]) / 2.0;
                }
            }
        }
        if (best_feature < 0) {
            nodes[node_id].label = majority(idx);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (feats[best_feature][i] <= best_threshold) left_idx.push_back(i);
            else right_idx.push_back(i);
        }
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        const int l = build(left_idx);
        const int r = build(right_idx);
        nodes[node_id].left = l;
        nodes[node_id].right = r;
        return node_id;
    }
};

}  // namespace

int DecisionTree::predict(const std::vector<double>& features) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        const TreeNode& n = nodes[node];
        node = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[node].label;
}

DecisionTree DecisionTree::leaf(int label) {
    DecisionTree t;
    TreeNode n;
    n.label = label;
    t.nodes.push_back(n);
    return t;
}

std::pair<int, double> BaselineModel::predict_with_probability(
    const std::vector<double>& features) const {
    if (features.size() != feature_columns.size())
        throw std::invalid_argument("missing feature value");
    std::vector<int> votes(std::max(n_classes, 1), 0);
    for (const DecisionTree& t : trees) {
        const int lab = t.predict(features);
        if (lab >= static_cast<int>(votes.size())) votes.resize(lab + 1, 0);
        ++votes[lab];
    }
    int best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = static_cast<int>(c);
    }
    return {best, static_cast<double>(votes[best]) / static_cast<double>(trees.size())};
}

int label_of(const TabularDataset& ds, std::size_t row, const std::string& unknown) {
    const Column& col = ds.column(unknown);
    if (col.is_continuous()) {
        if (col.bins.empty())
            throw std::runtime_error("continuous unknown has no discretized companion: " + unknown);
        return col.bins[row];
    }
    return static_cast<int>(col.values[row]);
}

std::vector<double> features_of(const TabularDataset& ds, std::size_t row,
                                const std::vector<std::string>& known) {
    std::vector<double> out;
    out.reserve(known.size());
    for (const std::string& k : known) out.push_back(ds.column(k).values[row]);
    return out;
}

BaselineModel fit(const TabularDataset& train, const std::vector<std::string>& known,
                  const std::string& unknown, const BaselineHyper& hyper, std::uint64_t seed) {
    const std::size_t n = train.row_count();
    if (n == 0) throw std::invalid_argument("empty training set");
    if (known.empty()) throw std::invalid_argument("no known attributes");

    BaselineModel model;
    model.feature_columns = known;
    model.label_column = unknown;

    std::vector<std::vector<double>> feats(known.size());
    for (std::size_t f = 0; f < known.size(); ++f) feats[f] = train.column(known[f]).values;
    std::vector<int> labels(n);
    int n_classes = 1;
    for (std::size_t r = 0; r < n; ++r) {
        labels[r] = label_of(train, r, unknown);
        n_classes = std::max(n_classes, labels[r] + 1);
    }
    {
        const Column& uc = train.column(unknown);
        n_classes = std::max(
            n_classes, uc.is_continuous() ? uc.bin_count : static_cast<int>(uc.decode.size()));
    }
    model.n_classes = n_classes;

    const int fps = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(known.size()))));
    model.trees.resize(hyper.trees);
    for (int t = 0; t < hyper.trees; ++t) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
        std::mt19937_64 rng(seq);
        std::vector<std::size_t> sample(n);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) sample[i] = pick(rng);  // bootstrap
        TreeBuilder builder{feats,          labels, n_classes, hyper.min_split,
                            hyper.min_leaf, fps,    rng,       {}};
        builder.build(sample);
        model.trees[t].nodes = std::move(builder.nodes);
    }
    return model;
}

BlockPlan::BlockPlan(std::size_t n_rows, std::uint64_t seed) {
    if (n_rows == 0) throw std::invalid_argument("empty dataset");
    order_.resize(n_rows);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order_.begin(), order_.end(), rng);
    const auto tenth = static_cast<std::size_t>(
        std::ceil(0.10 * static_cast<double>(n_rows)));
    block_size_ = std::min<std::size_t>(1000, tenth);
    if (block_size_ < 1) block_size_ = 1;
}

BlockPlan::Block BlockPlan::next_block() {
    if (exhausted()) throw std::runtime_error("block plan exhausted");
    Block b;
    const std::size_t end = std::min(next_ + block_size_, order_.size());
    b.holdout.assign(order_.begin() + next_, order_.begin() + end);
    b.training.reserve(order_.size() - (end - next_));
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (i < next_ || i >= end) b.training.push_back(order_[i]);
    }
    next_ = end;
    return b;
}

SamplingPolicy make_sampling_policy(const TabularDataset& ds, const std::string& unknown) {
    SamplingPolicy policy;
    const std::size_t n = ds.row_count();
    if (n == 0) return policy;
    std::unordered_map<int, std::size_t> counts;
    for (std::size_t r = 0; r < n; ++r) ++counts[label_of(ds, r, unknown)];
    for (const auto& [value, count] : counts) {
        const double freq = static_cast<double>(count) / static_cast<double>(n);
        if (freq > 0.5) {
            policy.has_dominant = true;
            policy.dominant_value = value;
            // emitted dominant share becomes 50%: keep = (1-f)/f
            policy.keep_probability = (1.0 - freq) / freq;
            break;
        }
    }
    return policy;
}

std::vector<std::size_t> downsample_stream(const std::vector<std::size_t>& rows,
                                           const TabularDataset& ds, const std::string& unknown,
                                           const SamplingPolicy& policy, std::uint64_t seed) {
    if (!policy.has_dominant) return rows;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        if (label_of(ds, r, unknown) == static_cast<int>(policy.dominant_value) &&
            unit(rng) >= policy.keep_probability) {
            continue;
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace alc

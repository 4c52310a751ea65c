#include "alc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace alc {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::string config_key(const MatrixRow& row) {
    std::ostringstream key;
    key << row.dataset << '|' << row.unknown << '|' << row.swap_fraction << '|';
    for (const std::string& k : row.known) key << k << ',';
    return key.str();
}

}  // namespace

double uniqueness_fraction(const TabularDataset& ds, const std::vector<std::string>& columns) {
    if (columns.empty()) return 0.0;
    std::map<std::vector<double>, int> combos;
    std::vector<double> key(columns.size());
    std::vector<const Column*> cols;
    for (const std::string& c : columns) cols.push_back(&ds.column(c));
    std::vector<std::vector<double>> keys(ds.row_count());
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) key[c] = cols[c]->values[r];
        keys[r] = key;
        ++combos[key];
    }
    std::size_t unique = 0;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (combos[keys[r]] == 1) ++unique;
    }
    return static_cast<double>(unique) / static_cast<double>(ds.row_count());
}

KnownSetResult generate_known_sets(const TabularDataset& ds, const std::string& unknown,
                                   int n_sets, double uniqueness_target, std::uint64_t seed) {
    if (ds.column_count() < 2) throw std::invalid_argument("need at least 2 columns");
    if (n_sets < 1) throw std::invalid_argument("n_sets must be >= 1");

    std::vector<std::string> candidates;
    for (const Column& c : ds.columns) {
        if (c.schema.name != unknown) candidates.push_back(c.schema.name);
    }

    struct Candidate {
        std::vector<std::string> set;  // sorted
        std::size_t size;
    };
    std::vector<Candidate> found;
    std::set<std::vector<std::string>> seen;

    const int trials = std::max(30, n_sets * 6);
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<std::string> order = candidates;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::string> grown;
        for (const std::string& col : order) {
            grown.push_back(col);
            if (uniqueness_fraction(ds, grown) >= uniqueness_target) {
                std::vector<std::string> sorted = grown;
                std::sort(sorted.begin(), sorted.end());
                if (seen.insert(sorted).second) found.push_back({sorted, sorted.size()});
                break;
            }
        }
    }

    KnownSetResult result;
    if (found.empty()) {
        std::cerr << "warning: uniqueness target unreachable for unknown '" << unknown
                  << "'; returning the full column set\n";
        std::sort(candidates.begin(), candidates.end());
        result.sets.push_back(candidates);
        result.degenerate = true;
        return result;
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const Candidate& a, const Candidate& b) { return a.size < b.size; });
    for (const Candidate& c : found) {
        if (static_cast<int>(result.sets.size()) >= n_sets) break;
        result.sets.push_back(c.set);
    }
    return result;
}

std::vector<MatrixRow> run_matrix(const ExperimentPlan& plan) {
    struct Job {
        MatrixRow row;
        const ExperimentDataset* dataset;
        const TabularDataset* anon;
        std::uint64_t seed;
    };

    std::vector<Job> jobs;
    // per dataset x fraction, anonymize once and share across cells
    std::vector<std::unique_ptr<TabularDataset>> anon_store;
    std::uint64_t cell = 0;
    for (const ExperimentDataset& eds : plan.datasets) {
        std::vector<std::string> unknowns = eds.unknown_attributes;
        if (unknowns.empty()) {
            for (const Column& c : eds.data.columns) unknowns.push_back(c.schema.name);
        }
        std::map<double, const TabularDataset*> anons;
        for (double fraction : plan.swap_fractions) {
            anon_store.push_back(std::make_unique<TabularDataset>(swap_anonymize(
                eds.data, {fraction, mix_seed(plan.seed, 1000 + anon_store.size())})));
            anons[fraction] = anon_store.back().get();
        }
        for (const std::string& unknown : unknowns) {
            KnownSetResult ks =
                generate_known_sets(eds.data, unknown, plan.known_sets_per_unknown,
                                    plan.uniqueness_target, mix_seed(plan.seed, cell + 17));
            for (const std::vector<std::string>& known : ks.sets) {
                for (double fraction : plan.swap_fractions) {
                    for (Approach approach : plan.approaches) {
                        Job job;
                        job.row.dataset = eds.name;
                        job.row.known = known;
                        job.row.unknown = unknown;
                        job.row.swap_fraction = fraction;
                        job.row.approach = approach;
                        job.dataset = &eds;
                        job.anon = anons[fraction];
                        job.seed = mix_seed(plan.seed, ++cell);
                        jobs.push_back(std::move(job));
                    }
                }
            }
        }
    }

    auto run_cell = [&plan](Job& job) {
        try {
            AttackScenario scenario;
            scenario.known_attributes = job.row.known;
            scenario.unknown_attribute = job.row.unknown;
            scenario.label = config_key(job.row);

            SessionConfig config = plan.session;
            config.approach = job.row.approach;
            config.seed = job.seed;
            if (job.row.approach == Approach::prior) {
                const double fraction = job.row.swap_fraction;
                config.prior_anon_builder = [fraction](const TabularDataset& remainder,
                                                       std::uint64_t seed) {
                    return swap_anonymize(remainder, {fraction, seed});
                };
            }
            SessionOutput out =
                run_session(scenario, job.dataset->data, {*job.anon},
                            best_row_match_attack(job.row.unknown), config);
            job.row.result = out.result;
            job.row.n_predictions = out.attempts;
        } catch (const std::exception& e) {
            job.row.failed = true;
            job.row.error = e.what();
        }
    };

    const int workers = std::max(1, plan.jobs);
    if (workers == 1) {
        for (Job& job : jobs) run_cell(job);
    } else {
        for (std::size_t start = 0; start < jobs.size(); start += workers) {
            std::vector<std::future<void>> wave;
            const std::size_t end = std::min(jobs.size(), start + workers);
            for (std::size_t i = start; i < end; ++i) {
                wave.push_back(std::async(std::launch::async, [&run_cell, &jobs, i] {
                    run_cell(jobs[i]);
                }));
            }
            for (auto& f : wave) f.get();
        }
    }

    std::vector<MatrixRow> rows;
    rows.reserve(jobs.size());
    for (Job& job : jobs) rows.push_back(std::move(job.row));
    return rows;
}

std::vector<ComparisonTable> classify_and_compare(const std::vector<MatrixRow>& results) {
    std::map<std::string, std::map<Approach, const MatrixRow*>> by_config;
    for (const MatrixRow& row : results) {
        if (row.failed) continue;
        by_config[config_key(row)][row.approach] = &row;
    }

    std::map<Approach, std::map<std::pair<int, int>, std::int64_t>> tallies;
    std::map<Approach, std::int64_t> totals;
    for (const auto& [key, group] : by_config) {
        auto ours_it = group.find(Approach::ours);
        if (ours_it == group.end()) continue;
        const RiskClass ours_class = classify_alc(ours_it->second->result.alc_rel);
        for (const auto& [approach, row] : group) {
            if (approach == Approach::ours) continue;
            const RiskClass other_class = classify_alc(row->result.alc_rel);
            ++tallies[approach][{static_cast<int>(ours_class), static_cast<int>(other_class)}];
            ++totals[approach];
        }
    }

    std::vector<ComparisonTable> tables;
    for (const auto& [approach, cells] : tallies) {
        ComparisonTable table;
        table.other = approach;
        table.total = totals[approach];
        for (const auto& [classes, count] : cells) {
            ComparisonCell cell;
            cell.ours_class = static_cast<RiskClass>(classes.first);
            cell.other_class = static_cast<RiskClass>(classes.second);
            cell.count = count;
            cell.fraction = static_cast<double>(count) / static_cast<double>(table.total);
            table.cells.push_back(cell);
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

std::vector<ReplicationRow> replication_study(const TabularDataset& ds,
                                              const std::vector<std::string>& unknowns,
                                              const std::vector<int>& replication_counts,
                                              const std::vector<ReplicationVariant>& variants,
                                              std::size_t max_targets, std::uint64_t seed) {
    std::vector<ReplicationRow> rows;
    const TabularDataset prepared = discretize(ds, 20);

    for (const std::string& unknown : unknowns) {
        // qualifying targets: unknown value with frequency below 10%
        std::map<int, std::int64_t> freq;
        const std::size_t n = prepared.row_count();
        std::vector<int> labels(n);
        for (std::size_t r = 0; r < n; ++r) {
            labels[r] = label_of(prepared, r, unknown);
            ++freq[labels[r]];
        }
        std::vector<std::size_t> qualifying;
        for (std::size_t r = 0; r < n; ++r) {
            if (static_cast<double>(freq[labels[r]]) / static_cast<double>(n) < 0.10)
                qualifying.push_back(r);
        }
        if (qualifying.empty()) {
            std::cerr << "notice: no rows with unknown-value frequency < 10% for '" << unknown
                      << "'; skipped\n";
            continue;
        }
        std::mt19937_64 rng(mix_seed(seed, std::hash<std::string>{}(unknown)));
        std::shuffle(qualifying.begin(), qualifying.end(), rng);
        if (qualifying.size() > max_targets) qualifying.resize(max_targets);

        std::vector<std::string> features;
        for (const Column& c : prepared.columns) {
            if (c.schema.name != unknown) features.push_back(c.schema.name);
        }
        std::vector<std::size_t> non_targets;
        {
            std::set<std::size_t> target_set(qualifying.begin(), qualifying.end());
            for (std::size_t r = 0; r < n; ++r) {
                if (!target_set.count(r)) non_targets.push_back(r);
            }
        }

        for (const ReplicationVariant& variant : variants) {
            double precision_zero = 0.0;
            for (int k : replication_counts) {
                std::vector<std::size_t> train_rows = non_targets;
                for (int i = 0; i < k; ++i)
                    train_rows.insert(train_rows.end(), qualifying.begin(), qualifying.end());
                BaselineModel model =
                    fit(select_rows(prepared, train_rows), features, unknown, variant.hyper,
                        mix_seed(seed, 31 * k + 7));
                std::int64_t correct = 0;
                for (std::size_t r : qualifying) {
                    auto [value, proba] = model.predict_with_probability(
                        features_of(prepared, r, features));
                    if (value == labels[r]) ++correct;
                }
                const double precision =
                    static_cast<double>(correct) / static_cast<double>(qualifying.size());
                if (k == 0) precision_zero = precision;
                ReplicationRow row;
                row.unknown = unknown;
                row.variant = variant.name;
                row.replicas = k;
                row.precision = precision;
                row.abs_error = std::abs(precision - precision_zero);
                row.n_predictions = static_cast<std::int64_t>(qualifying.size());
                rows.push_back(row);
            }
        }
    }
    return rows;
}

TabularDataset make_synthetic_dataset(std::size_t n_rows, int n_known, int cardinality,
                                      std::uint64_t seed, bool with_continuous) {
    if (n_rows == 0 || n_known < 1 || cardinality < 2)
        throw std::invalid_argument("bad synthetic dataset shape");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> value(0, cardinality - 1);
    std::uniform_real_distribution<double> amount(0.0, 1000.0);

    TabularDataset ds;
    auto make_categorical = [&](const std::string& name) {
        Column col;
        col.schema.name = name;
        col.schema.kind = ColumnKind::categorical;
        col.schema.distinct_count = cardinality;
        for (int v = 0; v < cardinality; ++v) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "v%03d", v);
            col.encode.emplace(buf, v);
            col.decode.emplace_back(buf);
        }
        col.values.resize(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r)
            col.values[r] = static_cast<double>(value(rng));
        return col;
    };
    for (int k = 0; k < n_known; ++k) ds.columns.push_back(make_categorical("k" + std::to_string(k)));
    ds.columns.push_back(make_categorical("secret"));
    if (with_continuous) {
        Column col;
        col.schema.name = "amount";
        col.schema.kind = ColumnKind::continuous;
        col.values.resize(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r) col.values[r] = amount(rng);
        col.schema.min = *std::min_element(col.values.begin(), col.values.end());
        col.schema.max = *std::max_element(col.values.begin(), col.values.end());
        col.schema.distinct_count = static_cast<int>(
            std::set<double>(col.values.begin(), col.values.end()).size());
        ds.columns.push_back(std::move(col));
    }
    ds.row_ids.resize(n_rows);
    std::iota(ds.row_ids.begin(), ds.row_ids.end(), std::int64_t{0});
    ds.individual_ids = ds.row_ids;
    return ds;
}

}  // namespace alc

#include "alc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace alc {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config must be a JSON object: " + path);
    return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw std::runtime_error("unknown config key '" + key + "' in " + context);
    }
}

template <typename T>
void read_key(const json& j, const std::string& key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::runtime_error("config key '" + key + "' has the wrong type");
    }
}

void read_prc(const json& j, PrcParams& prc) {
    read_key(j, "alpha", prc.alpha);
    read_key(j, "r_min", prc.r_min);
    read_key(j, "z", prc.z);
    read_key(j, "target_ci_width", prc.target_ci_width);
    if (prc.alpha <= 0.0) throw std::runtime_error("config key 'alpha' must be > 0");
    if (prc.r_min <= 0.0 || prc.r_min >= 1.0)
        throw std::runtime_error("config key 'r_min' must be in (0,1)");
}

void read_halt(const json& j, HaltParams& halt) {
    read_key(j, "n_prc", halt.initial_n_prc);
    read_key(j, "check_period", halt.check_period);
    read_key(j, "min_improvement", halt.min_improvement);
    read_key(j, "early_safe_alc", halt.early_safe_alc);
    read_key(j, "early_compromised_alc", halt.early_compromised_alc);
}

void read_hyper(const json& j, BaselineHyper& hyper) {
    read_key(j, "trees", hyper.trees);
    read_key(j, "min_split", hyper.min_split);
    read_key(j, "min_leaf", hyper.min_leaf);
}

const std::set<std::string> kSharedKeys = {
    "alpha", "r_min", "z", "target_ci_width", "n_prc", "check_period", "min_improvement",
    "early_safe_alc", "early_compromised_alc", "trees", "min_split", "min_leaf",
    "bins", "seed", "out_dir"};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

double clip_alc(double v) { return std::max(v, -0.2); }

json measure_to_json(const PrecisionRecallMeasure& m, const PrcParams& params) {
    return json{{"threshold", m.threshold},
                {"t", m.counts.t},
                {"f", m.counts.f},
                {"a", m.counts.a},
                {"p_meas", m.p_meas},
                {"p_lower", m.p_lower},
                {"p_upper", m.p_upper},
                {"p_prob", m.p_prob},
                {"recall", m.recall},
                {"prc", prc(m.p_prob, m.recall, params)}};
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

RunConfig parse_run_config(const std::string& path) {
    const json j = load_json(path);
    std::set<std::string> allowed = kSharedKeys;
    allowed.insert({"original", "anonymized", "scenarios", "approach"});
    reject_unknown_keys(j, allowed, path);

    RunConfig config;
    read_key(j, "original", config.original);
    if (config.original.empty()) throw std::runtime_error("missing config key 'original'");
    read_key(j, "anonymized", config.anonymized);
    if (config.anonymized.empty()) throw std::runtime_error("missing config key 'anonymized'");
    read_key(j, "out_dir", config.out_dir);
    read_prc(j, config.prc);
    read_halt(j, config.halt);
    read_hyper(j, config.hyper);
    read_key(j, "bins", config.bins);
    read_key(j, "seed", config.seed);
    std::string approach = "ours";
    read_key(j, "approach", approach);
    config.approach = approach_from_string(approach);
    if (config.approach == Approach::prior)
        throw std::runtime_error(
            "config key 'approach': 'prior' is only available in the compare command");

    if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty())
        throw std::runtime_error("missing config key 'scenarios'");
    for (const json& s : j.at("scenarios")) {
        reject_unknown_keys(s, {"label", "known", "unknown"}, "scenario");
        ScenarioSpec spec;
        read_key(s, "label", spec.label);
        read_key(s, "known", spec.known);
        read_key(s, "unknown", spec.unknown);
        if (spec.known.empty()) throw std::runtime_error("scenario key 'known' must be nonempty");
        if (spec.unknown.empty()) throw std::runtime_error("missing scenario key 'unknown'");
        if (spec.label.empty())
            spec.label = "scenario" + std::to_string(config.scenarios.size());
        config.scenarios.push_back(std::move(spec));
    }
    return config;
}

ComparePlanConfig parse_compare_config(const std::string& path) {
    const json j = load_json(path);
    std::set<std::string> allowed = kSharedKeys;
    allowed.insert({"datasets", "swap_fractions", "known_sets_per_unknown", "uniqueness_target",
                    "approaches", "jobs"});
    reject_unknown_keys(j, allowed, path);

    ComparePlanConfig config;
    if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty())
        throw std::runtime_error("missing config key 'datasets'");
    for (const json& d : j.at("datasets")) {
        reject_unknown_keys(d, {"name", "path", "unknowns"}, "dataset");
        ComparePlanConfig::DatasetSpec spec;
        read_key(d, "name", spec.name);
        read_key(d, "path", spec.path);
        read_key(d, "unknowns", spec.unknowns);
        if (spec.path.empty()) throw std::runtime_error("missing dataset key 'path'");
        if (spec.name.empty()) spec.name = spec.path;
        config.datasets.push_back(std::move(spec));
    }
    read_key(j, "swap_fractions", config.swap_fractions);
    for (double f : config.swap_fractions) {
        if (f < 0.0 || f > 1.0)
            throw std::runtime_error("config key 'swap_fractions' must lie in [0,1]");
    }
    read_key(j, "known_sets_per_unknown", config.known_sets_per_unknown);
    if (config.known_sets_per_unknown < 1)
        throw std::runtime_error("config key 'known_sets_per_unknown' must be >= 1");
    read_key(j, "uniqueness_target", config.uniqueness_target);
    if (j.contains("approaches")) {
        config.approaches.clear();
        for (const std::string& a : j.at("approaches").get<std::vector<std::string>>())
            config.approaches.push_back(approach_from_string(a));
    }
    read_key(j, "out_dir", config.out_dir);
    read_prc(j, config.prc);
    read_halt(j, config.halt);
    read_hyper(j, config.hyper);
    read_key(j, "bins", config.bins);
    read_key(j, "seed", config.seed);
    read_key(j, "jobs", config.jobs);
    return config;
}

CurvesConfig parse_curves_config(const std::string& path) {
    const json j = load_json(path);
    reject_unknown_keys(
        j, {"prc_iso", "alc_iso", "points", "alpha", "r_min", "z", "target_ci_width", "out_dir"},
        path);
    CurvesConfig config;
    read_key(j, "prc_iso", config.prc_iso);
    read_key(j, "alc_iso", config.alc_iso);
    read_key(j, "points", config.points);
    read_key(j, "out_dir", config.out_dir);
    read_prc(j, config.prc);
    if (config.points < 2) throw std::runtime_error("config key 'points' must be >= 2");
    for (double v : config.prc_iso) {
        if (v <= 0.0 || v >= 1.0)
            throw std::runtime_error("config key 'prc_iso' values must lie in (0,1)");
    }
    for (double v : config.alc_iso) {
        if (v < 0.0 || v >= 1.0)
            throw std::runtime_error("config key 'alc_iso' values must lie in [0,1)");
    }
    return config;
}

ReplicationConfig parse_replication_config(const std::string& path) {
    const json j = load_json(path);
    reject_unknown_keys(
        j, {"input", "unknowns", "replication_counts", "max_targets", "out_dir", "seed"}, path);
    ReplicationConfig config;
    read_key(j, "input", config.input);
    if (config.input.empty()) throw std::runtime_error("missing config key 'input'");
    read_key(j, "unknowns", config.unknowns);
    read_key(j, "replication_counts", config.replication_counts);
    read_key(j, "max_targets", config.max_targets);
    read_key(j, "out_dir", config.out_dir);
    read_key(j, "seed", config.seed);
    return config;
}

void write_predictions_csv(const std::string& path, const std::vector<ScenarioOutcome>& outcomes) {
    std::ofstream out = open_out(path);
    out << "scenario,target_id,ledger,kind,correct,rank_score,predicted_value,true_value\n";
    for (const ScenarioOutcome& o : outcomes) {
        auto dump = [&](const Ledger& ledger, const char* side) {
            for (const PredictionRecord& r : ledger) {
                out << o.label << ',' << r.target_id << ',' << side << ','
                    << (r.is_prediction ? "prediction" : "abstention") << ','
                    << (r.correct ? 1 : 0) << ',' << format_number(r.rank_score) << ','
                    << format_number(r.predicted_value) << ',' << format_number(r.true_value)
                    << '\n';
            }
        };
        dump(o.session.attack_ledger, "attack");
        dump(o.session.baseline_ledger, "baseline");
    }
}

void write_measures_csv(const std::string& path, const std::vector<ScenarioOutcome>& outcomes,
                        const PrcParams& params) {
    std::ofstream out = open_out(path);
    out << "scenario,ledger,threshold,t,f,a,p_meas,p_lower,p_upper,p_prob,recall,prc\n";
    for (const ScenarioOutcome& o : outcomes) {
        auto dump = [&](const std::vector<PrecisionRecallMeasure>& measures, const char* side) {
            for (const PrecisionRecallMeasure& m : measures) {
                out << o.label << ',' << side << ',' << format_number(m.threshold) << ','
                    << m.counts.t << ',' << m.counts.f << ',' << m.counts.a << ','
                    << format_number(m.p_meas) << ',' << format_number(m.p_lower) << ','
                    << format_number(m.p_upper) << ',' << format_number(m.p_prob) << ','
                    << format_number(m.recall) << ','
                    << format_number(prc(m.p_prob, m.recall, params)) << '\n';
            }
        };
        dump(o.session.result.atk_measures, "attack");
        dump(o.session.result.base_measures, "baseline");
    }
}

void write_results_json(const std::string& path, const std::vector<ScenarioOutcome>& outcomes,
                        const PrcParams& params) {
    json results = json::array();
    for (const ScenarioOutcome& o : outcomes) {
        const AlcResult& r = o.session.result;
        json measures_atk = json::array();
        for (const auto& m : r.atk_measures) measures_atk.push_back(measure_to_json(m, params));
        json measures_base = json::array();
        for (const auto& m : r.base_measures) measures_base.push_back(measure_to_json(m, params));
        results.push_back(json{{"scenario", o.label},
                               {"prc_atk", r.prc_atk},
                               {"prc_base", r.prc_base},
                               {"alc_rel", r.alc_rel},
                               {"alc_abs", r.alc_abs},
                               {"halt_reason", to_string(r.halt_reason)},
                               {"risk_class", to_string(classify_alc(r.alc_rel))},
                               {"n_prc", o.session.final_n_prc},
                               {"attempts", o.session.attempts},
                               {"atk_measures", measures_atk},
                               {"base_measures", measures_base}});
    }
    std::ofstream out = open_out(path);
    out << json{{"results", results}}.dump(2) << '\n';
}

void write_summary(const std::string& path, const std::vector<ScenarioOutcome>& outcomes) {
    std::ofstream out = open_out(path);
    out << "anonymity loss summary\n======================\n\n";
    std::vector<const ScenarioOutcome*> flagged;
    for (const ScenarioOutcome& o : outcomes) {
        const AlcResult& r = o.session.result;
        out << o.label << ":\n"
            << "  alc: " << format_number(r.alc_rel) << " (" << to_string(classify_alc(r.alc_rel))
            << ")\n"
            << "  prc_atk: " << format_number(r.prc_atk)
            << "  prc_base: " << format_number(r.prc_base) << '\n';
        if (!r.atk_measures.empty()) {
            // best attack measure = the one whose PRC is reported
            const PrecisionRecallMeasure* best = &r.atk_measures.front();
            double best_prc = -1.0;
            for (const auto& m : r.atk_measures) {
                const double v = prc(m.p_prob, m.recall);
                if (v > best_prc) {
                    best_prc = v;
                    best = &m;
                }
            }
            out << "  best attack measure: precision " << format_number(best->p_prob)
                << ", recall " << format_number(best->recall) << '\n';
        }
        out << "  attempts: " << o.session.attempts
            << "  halt: " << to_string(r.halt_reason) << "\n\n";
        if (r.alc_rel >= 0.5) flagged.push_back(&o);
    }
    out << "flagged for examination (alc >= 0.5):";
    if (flagged.empty()) {
        out << " none\n";
    } else {
        out << '\n';
        for (const ScenarioOutcome* o : flagged)
            out << "  " << o->label << " (alc " << format_number(o->session.result.alc_rel)
                << ")\n";
    }
}

std::vector<ScenarioOutcome> cmd_measure(const RunConfig& config) {
    const TabularDataset orig = load_csv(config.original);
    std::vector<TabularDataset> anon;
    for (const std::string& path : config.anonymized)
        anon.push_back(load_csv_like(path, orig));

    std::vector<ScenarioOutcome> outcomes;
    for (std::size_t i = 0; i < config.scenarios.size(); ++i) {
        const ScenarioSpec& spec = config.scenarios[i];
        AttackScenario scenario;
        scenario.known_attributes = spec.known;
        scenario.unknown_attribute = spec.unknown;
        scenario.label = spec.label;

        SessionConfig session;
        session.prc = config.prc;
        session.halt = config.halt;
        session.hyper = config.hyper;
        session.approach = config.approach;
        session.bins = config.bins;
        session.seed = config.seed + i;

        ScenarioOutcome outcome;
        outcome.label = spec.label;
        outcome.session =
            run_session(scenario, orig, anon, best_row_match_attack(spec.unknown), session);
        outcomes.push_back(std::move(outcome));
    }

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    write_predictions_csv((dir / "predictions.csv").string(), outcomes);
    write_measures_csv((dir / "measures.csv").string(), outcomes, config.prc);
    write_results_json((dir / "results.json").string(), outcomes, config.prc);
    write_summary((dir / "summary.txt").string(), outcomes);
    return outcomes;
}

void cmd_anonymize(const std::string& input, double swap_fraction, std::uint64_t seed,
                   const std::string& output) {
    const TabularDataset ds = load_csv(input);
    write_csv(swap_anonymize(ds, {swap_fraction, seed}), output);
}

std::vector<MatrixRow> cmd_compare(const ComparePlanConfig& config) {
    ExperimentPlan plan;
    for (const auto& spec : config.datasets) {
        ExperimentDataset eds;
        eds.name = spec.name;
        eds.data = load_csv(spec.path);
        eds.unknown_attributes = spec.unknowns;
        plan.datasets.push_back(std::move(eds));
    }
    plan.swap_fractions = config.swap_fractions;
    plan.known_sets_per_unknown = config.known_sets_per_unknown;
    plan.uniqueness_target = config.uniqueness_target;
    plan.approaches = config.approaches;
    plan.seed = config.seed;
    plan.jobs = config.jobs;
    plan.session.prc = config.prc;
    plan.session.halt = config.halt;
    plan.session.hyper = config.hyper;
    plan.session.bins = config.bins;

    const std::vector<MatrixRow> rows = run_matrix(plan);
    const std::vector<ComparisonTable> tables = classify_and_compare(rows);

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);

    {
        std::ofstream out = open_out(dir / "matrix.csv");
        out << "dataset,known,unknown,swap_fraction,approach,prc_atk,prc_base,alc,class,"
               "halt_reason,n_predictions,status\n";
        for (const MatrixRow& row : rows) {
            std::string known;
            for (const std::string& k : row.known) {
                if (!known.empty()) known += ';';
                known += k;
            }
            out << row.dataset << ',' << known << ',' << row.unknown << ','
                << format_number(row.swap_fraction) << ',' << to_string(row.approach) << ',';
            if (row.failed) {
                out << ",,,,," << row.n_predictions << ",error\n";
            } else {
                out << format_number(row.result.prc_atk) << ','
                    << format_number(row.result.prc_base) << ','
                    << format_number(row.result.alc_rel) << ','
                    << to_string(classify_alc(row.result.alc_rel)) << ','
                    << to_string(row.result.halt_reason) << ',' << row.n_predictions << ",ok\n";
            }
        }
    }
    {
        std::ofstream out = open_out(dir / "comparison.csv");
        out << "other_approach,ours_class,other_class,count,fraction\n";
        for (const ComparisonTable& table : tables) {
            for (const ComparisonCell& cell : table.cells) {
                out << to_string(table.other) << ',' << to_string(cell.ours_class) << ','
                    << to_string(cell.other_class) << ',' << cell.count << ','
                    << format_number(cell.fraction) << '\n';
            }
        }
    }
    {
        // scatter data mirrors the ours-vs-other ALC plots; values clipped
        std::ofstream out = open_out(dir / "scatter.csv");
        out << "dataset,known,unknown,swap_fraction,other_approach,ours_alc,other_alc,recall\n";
        std::map<std::string, std::vector<const MatrixRow*>> by_key;
        std::vector<std::string> order;
        for (const MatrixRow& row : rows) {
            if (row.failed) continue;
            std::string key = row.dataset + '|' + row.unknown + '|' +
                              format_number(row.swap_fraction);
            for (const std::string& k : row.known) key += '|' + k;
            if (by_key.find(key) == by_key.end()) order.push_back(key);
            by_key[key].push_back(&row);
        }
        for (const std::string& key : order) {
            const MatrixRow* ours = nullptr;
            for (const MatrixRow* row : by_key[key]) {
                if (row->approach == Approach::ours) ours = row;
            }
            if (!ours) continue;
            double best_recall = 1.0;
            double best_prc = -1.0;
            for (const auto& m : ours->result.atk_measures) {
                const double v = prc(m.p_prob, m.recall, config.prc);
                if (v > best_prc) {
                    best_prc = v;
                    best_recall = m.recall;
                }
            }
            for (const MatrixRow* other : by_key[key]) {
                if (other->approach == Approach::ours) continue;
                std::string known;
                for (const std::string& k : ours->known) {
                    if (!known.empty()) known += ';';
                    known += k;
                }
                out << ours->dataset << ',' << known << ',' << ours->unknown << ','
                    << format_number(ours->swap_fraction) << ',' << to_string(other->approach)
                    << ',' << format_number(clip_alc(ours->result.alc_rel)) << ','
                    << format_number(clip_alc(other->result.alc_rel)) << ','
                    << format_number(best_recall) << '\n';
            }
        }
    }
    return rows;
}

void cmd_curves(const CurvesConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream out = open_out(std::filesystem::path(config.out_dir) / "curves.csv");
    out << "kind,iso,x,y\n";
    // (P, R) loci of constant PRC; x = recall, y = precision
    for (double iso : config.prc_iso) {
        const double log_rmin = std::log10(config.prc.r_min);
        for (int i = 0; i < config.points; ++i) {
            const double t = static_cast<double>(i) / (config.points - 1);
            const double r = std::pow(10.0, log_rmin * (1.0 - t));  // r_min..1 log grid
            const double weight = 1.0 - std::pow(std::log10(r) / log_rmin, config.prc.alpha);
            if (weight <= 0.0) continue;
            const double p = iso / weight;
            if (p > 1.0) continue;
            out << "prc," << format_number(iso) << ',' << format_number(r) << ','
                << format_number(p) << '\n';
        }
    }
    // (PRC_base, PRC_atk) loci of constant ALC
    for (double iso : config.alc_iso) {
        for (int i = 0; i < config.points; ++i) {
            const double base = static_cast<double>(i) / config.points;  // [0, 1)
            const double atk = iso * (1.0 - base) + base;
            out << "alc," << format_number(iso) << ',' << format_number(base) << ','
                << format_number(atk) << '\n';
        }
    }
}

std::vector<ReplicationRow> cmd_replication(const ReplicationConfig& config) {
    const TabularDataset ds = load_csv(config.input);
    std::vector<std::string> unknowns = config.unknowns;
    if (unknowns.empty()) {
        for (const Column& c : ds.columns) {
            if (!c.is_continuous()) unknowns.push_back(c.schema.name);
        }
    }
    const std::vector<ReplicationVariant> variants = {
        {"default", {100, 2, 1}},
        {"anti_overfit", {200, 10, 10}},
    };
    const std::vector<ReplicationRow> rows = replication_study(
        ds, unknowns, config.replication_counts, variants, config.max_targets, config.seed);

    std::filesystem::create_directories(config.out_dir);
    std::ofstream out = open_out(std::filesystem::path(config.out_dir) / "replication.csv");
    out << "unknown,variant,replicas,precision,abs_error,n_predictions\n";
    for (const ReplicationRow& row : rows) {
        out << row.unknown << ',' << row.variant << ',' << row.replicas << ','
            << format_number(row.precision) << ',' << format_number(row.abs_error) << ','
            << row.n_predictions << '\n';
    }
    return rows;
}

Ledger read_predictions_csv(const std::string& path, const std::string& scenario,
                            LedgerSide side) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    std::getline(in, line);  // header
    Ledger ledger;
    const std::string want_side = side == LedgerSide::attack ? "attack" : "baseline";
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) continue;
        if (fields[0] != scenario || fields[2] != want_side) continue;
        PredictionRecord r;
        r.target_id = std::stoll(fields[1]);
        r.ledger = side;
        r.is_prediction = fields[3] == "prediction";
        r.correct = fields[4] == "1";
        r.rank_score = std::stod(fields[5]);
        r.predicted_value = std::stod(fields[6]);
        r.true_value = std::stod(fields[7]);
        ledger.push_back(r);
    }
    return ledger;
}

}  // namespace alc

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "alc/report.hpp"

// Command line front end. Each subcommand reads a JSON config (or plain
// flags for `anonymize`) and writes its artifacts into --out.

int main(int argc, char** argv) {
    CLI::App app{"attribute-inference anonymity loss measurement"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;

    auto add_common = [&](CLI::App* sub, bool with_jobs) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "random seed (overrides the config)")
            ->each([&](const std::string&) { seed_set = true; });
        if (with_jobs) sub->add_option("--jobs", jobs, "parallel sessions (overrides the config)");
    };

    CLI::App* measure = app.add_subcommand("measure", "measure anonymity loss per scenario");
    add_common(measure, false);

    CLI::App* anonymize = app.add_subcommand("anonymize", "write a swap-anonymized copy");
    std::string anon_input, anon_output;
    double swap_fraction = 0.2;
    std::uint64_t anon_seed = 0;
    anonymize->add_option("--input", anon_input, "input CSV")->required();
    anonymize->add_option("--output", anon_output, "output CSV")->required();
    anonymize->add_option("--fraction", swap_fraction, "fraction of cells to swap per column")
        ->check(CLI::Range(0.0, 1.0));
    anonymize->add_option("--seed", anon_seed, "random seed");

    CLI::App* compare = app.add_subcommand("compare", "run the approach-comparison matrix");
    add_common(compare, true);

    CLI::App* curves = app.add_subcommand("curves", "emit iso-score curve data");
    add_common(curves, false);

    CLI::App* replication =
        app.add_subcommand("replication-study", "baseline precision vs. replicated records");
    add_common(replication, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (measure->parsed()) {
            alc::RunConfig config = alc::parse_run_config(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (seed_set) config.seed = seed;
            alc::cmd_measure(config);
        } else if (anonymize->parsed()) {
            alc::cmd_anonymize(anon_input, swap_fraction, anon_seed, anon_output);
        } else if (compare->parsed()) {
            alc::ComparePlanConfig config = alc::parse_compare_config(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (seed_set) config.seed = seed;
            if (jobs > 0) config.jobs = jobs;
            alc::cmd_compare(config);
        } else if (curves->parsed()) {
            alc::CurvesConfig config = alc::parse_curves_config(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            alc::cmd_curves(config);
        } else if (replication->parsed()) {
            alc::ReplicationConfig config = alc::parse_replication_config(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (seed_set) config.seed = seed;
            alc::cmd_replication(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

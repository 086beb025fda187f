#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "der/episode_io.hpp"
#include "der/harness.hpp"
#include "der/learner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic experience replay training harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string name = "run";
    int count = 6;
    std::vector<std::uint64_t> seeds{0, 1, 2};
    bool deterministic = false;
    bool quiet = false;
    int workers_override = 0;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    double threshold = 0.5;
    std::vector<std::string> csvs;

    auto* demo = app.add_subcommand("demo-gen", "Generate scripted demonstration episodes");
    demo->add_option("--config", config_path, "experiment config file")->required();
    demo->add_option("--count", count, "number of demonstrations");
    demo->add_option("--out", out, "output episode file")->required();

    auto* train = app.add_subcommand("train", "Run one training experiment");
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--out", out, "output directory")->required();
    train->add_option("--name", name, "run name (CSV/checkpoint prefix)");
    train->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) { seed_set = true; });
    train->add_option("--workers", workers_override, "worker count override");
    train->add_flag("--deterministic", deterministic, "single-threaded reproducible mode");
    train->add_flag("--quiet", quiet, "suppress per-iteration output");

    auto* ablate = app.add_subcommand("ablate", "Run the 4-structure x DER ablation matrix");
    ablate->add_option("--config", config_path, "base config file")->required();
    ablate->add_option("--out", out, "output directory")->required();
    ablate->add_option("--seeds", seeds, "seeds, e.g. --seeds 0 1 2");
    ablate->add_flag("--deterministic", deterministic, "single-threaded reproducible mode");

    auto* summ = app.add_subcommand("summarize", "Aggregate per-seed CSVs into mean + 95% CI");
    summ->add_option("csvs", csvs, "metrics CSV files for one cell")->required();
    summ->add_option("--out", out, "summary CSV path")->required();
    summ->add_option("--threshold", threshold, "success-rate threshold for iterations-to-threshold");

    CLI11_PARSE(app, argc, argv);

    try {
        if (demo->parsed()) {
            der::ExperimentConfig cfg = der::load_config(config_path);
            auto demos = der::generate_demos(cfg, count);
            der::save_episodes(out, demos);
            std::cout << "wrote " << demos.size() << " demos to " << out << "\n";
        } else if (train->parsed()) {
            der::ExperimentConfig cfg = der::load_config(config_path);
            if (seed_set) cfg.seed = seed_override;
            if (workers_override > 0) cfg.num_workers = workers_override;
            if (deterministic) cfg.deterministic = true;
            der::RunOptions opts;
            opts.out_dir = out;
            opts.run_name = name;
            if (!quiet)
                opts.on_iteration = [](const der::IterationRecord& r) {
                    std::cout << "iter " << r.iteration << " episodes " << r.episodes
                              << " success_rate " << r.success_rate << " mean_reward "
                              << r.mean_reward << "\n";
                };
            auto result = der::run_experiment(cfg, opts);
            std::cout << "done: " << result.total_episodes << " episodes, "
                      << result.total_timesteps << " timesteps\n";
        } else if (ablate->parsed()) {
            der::ExperimentConfig base = der::load_config(config_path);
            if (deterministic) base.deterministic = true;
            const der::StructureType structs[] = {
                der::StructureType::NoDemos, der::StructureType::OneShotAll,
                der::StructureType::AllShotsAll, der::StructureType::OneShotEach};
            for (auto st : structs) {
                for (bool der_on : {false, true}) {
                    std::vector<std::string> cell_csvs;
                    for (auto s : seeds) {
                        der::ExperimentConfig cfg = base;
                        cfg.structure_type = st;
                        cfg.der_enabled = der_on;
                        cfg.seed = s;
                        std::string run = der::to_string(st) + std::string(der_on ? "_der" : "_vanilla") +
                                          "_seed" + std::to_string(s);
                        std::cout << "=== " << run << " ===\n";
                        der::RunOptions opts;
                        opts.out_dir = out;
                        opts.run_name = run;
                        der::run_experiment(cfg, opts);
                        cell_csvs.push_back(out + "/" + run + ".csv");
                    }
                    auto s = der::summarize(cell_csvs);
                    der::write_summary_csv(out + "/" + der::to_string(st) +
                                               (der_on ? "_der" : "_vanilla") + "_summary.csv",
                                           s);
                }
            }
        } else if (summ->parsed()) {
            auto s = der::summarize(csvs, threshold);
            der::write_summary_csv(out, s);
            std::cout << "wrote " << out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "der/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "der/env.hpp"
#include "der/learner.hpp"
#include "der/rng.hpp"
#include "der/worker.hpp"

namespace der {

std::vector<Episode> generate_demos(const ExperimentConfig& cfg, int count) {
    std::vector<Episode> demos;
    for (int i = 0; i < count; ++i) {
        InsertionEnv env(cfg.env);
        auto rng = seed_stream(cfg.seed, "demo-" + std::to_string(i));
        demos.push_back(scripted_demo(env, rng, cfg.demo_jitter, cfg.a_max, cfg.max_episode_steps));
    }
    return demos;
}

namespace {

struct IterationAccumulator {
    std::vector<IterationRecord> records;
    std::vector<double> reward_sum;
    std::mutex mu;

    IterationAccumulator(int max_iterations, int iteration_timesteps) {
        records.resize(max_iterations);
        reward_sum.assign(max_iterations, 0.0);
        for (int i = 0; i < max_iterations; ++i) {
            records[i].iteration = i;
            records[i].timesteps = static_cast<long>(i + 1) * iteration_timesteps;
        }
    }

    void add_episode(int iteration, const Episode& e) {
        std::lock_guard lock(mu);
        IterationRecord& r = records[iteration];
        ++r.episodes;
        if (e.success) ++r.successes;
        reward_sum[iteration] += e.total_reward;
    }

    void finalize() {
        std::lock_guard lock(mu);
        for (std::size_t i = 0; i < records.size(); ++i) {
            IterationRecord& r = records[i];
            if (r.episodes > 0) {
                r.success_rate = static_cast<double>(r.successes) / static_cast<double>(r.episodes);
                r.mean_reward = reward_sum[i] / static_cast<double>(r.episodes);
            }
        }
    }
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);

    int demo_count = cfg.structure_type == StructureType::NoDemos ? 0 : cfg.num_demos;
    std::vector<Episode> demos = generate_demos(cfg, demo_count);

    std::vector<std::unique_ptr<PrioritizedBuffer>> buffers;
    for (int i = 0; i < cfg.num_buffers; ++i)
        buffers.push_back(std::make_unique<PrioritizedBuffer>(cfg.buffer_capacity,
                                                              cfg.demo_zone_capacity(),
                                                              cfg.priority_alpha, i));
    initialize_structure(cfg, demos, buffers);

    SuccessPool pool(cfg.pool_capacity);
    Learner learner(cfg, &buffers, &pool, opts.events);
    for (const auto& d : demos) learner.ingest_episode(d);

    std::vector<std::unique_ptr<Worker>> workers;
    for (int i = 0; i < cfg.num_workers; ++i)
        workers.push_back(std::make_unique<Worker>(cfg, i, std::make_unique<InsertionEnv>(cfg.env),
                                                   &buffers, &pool, opts.events));

    const long budget = static_cast<long>(cfg.iteration_timesteps) * cfg.max_iterations;
    IterationAccumulator acc(cfg.max_iterations, cfg.iteration_timesteps);
    ExperimentResult result;
    auto t0 = std::chrono::steady_clock::now();

    long steps_done = 0;
    int emitted = 0;  // iterations already reported
    bool stopped = false;

    auto emit_through = [&](long steps, bool flush_all) {
        acc.finalize();
        int complete = static_cast<int>(steps / cfg.iteration_timesteps);
        complete = std::min(complete, cfg.max_iterations);
        int upto = flush_all ? cfg.max_iterations : complete;
        for (; emitted < upto && !stopped; ++emitted) {
            IterationRecord& r = acc.records[emitted];
            if (!cfg.deterministic)
                r.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (opts.on_iteration) opts.on_iteration(r);
            if (opts.stop_after && opts.stop_after(r)) stopped = true;
        }
    };

    if (cfg.deterministic) {
        long pending = 0;  // env steps not yet matched by trainer steps
        std::size_t next_worker = 0;
        while (steps_done < budget && !stopped) {
            Worker& w = *workers[next_worker];
            next_worker = (next_worker + 1) % workers.size();
            auto snap = learner.snapshot();
            Episode e = w.run_episode(*snap);
            int iter = static_cast<int>(std::min(steps_done / cfg.iteration_timesteps,
                                                 static_cast<long>(cfg.max_iterations - 1)));
            steps_done += static_cast<long>(e.length());
            w.ship_fragments(e);
            learner.ingest_episode(e);
            acc.add_episode(iter, e);
            ++result.total_episodes;
            pending += static_cast<long>(e.length());
            while (pending >= cfg.train_every) {
                learner.train_step();
                pending -= cfg.train_every;
            }
            emit_through(steps_done, false);
        }
    } else {
        std::atomic<long> steps{0};
        std::atomic<bool> stop{false};
        std::atomic<long> episodes{0};
        std::vector<std::thread> threads;
        for (auto& wp : workers) {
            threads.emplace_back([&, w = wp.get()] {
                while (!stop.load(std::memory_order_relaxed)) {
                    auto snap = learner.snapshot();
                    if (!snap->consistent())
                        throw std::runtime_error("torn parameter snapshot");
                    Episode e = w->run_episode(*snap);
                    long before = steps.fetch_add(static_cast<long>(e.length()));
                    if (before >= budget) break;
                    int iter = static_cast<int>(std::min(before / cfg.iteration_timesteps,
                                                         static_cast<long>(cfg.max_iterations - 1)));
                    w->ship_fragments(e);
                    learner.enqueue_observations(e);
                    acc.add_episode(iter, e);
                    episodes.fetch_add(1);
                    if (before + static_cast<long>(e.length()) >= budget) break;
                }
            });
        }
        std::thread trainer([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                if (!learner.train_step())
                    std::this_thread::sleep_for(std::chrono::milliseconds(1));
            }
        });
        while (steps.load() < budget && !stopped) {
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            emit_through(steps.load(), false);
        }
        stop.store(true);
        for (auto& t : threads) t.join();
        trainer.join();
        result.total_episodes = episodes.load();
        steps_done = steps.load();
    }

    emit_through(steps_done, !stopped && steps_done >= budget);
    acc.finalize();
    acc.records.resize(static_cast<std::size_t>(emitted));
    result.records = acc.records;
    result.total_timesteps = steps_done;

    if (!opts.out_dir.empty()) {
        write_metrics_csv(opts.out_dir + "/" + opts.run_name + ".csv", result.records);
        learner.save_checkpoint(opts.out_dir + "/" + opts.run_name + ".ckpt");
    }
    return result;
}

void write_metrics_csv(const std::string& path, const std::vector<IterationRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "iteration,timesteps,episodes,successes,success_rate,mean_reward,wall_seconds\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.iteration << ',' << r.timesteps << ',' << r.episodes << ',' << r.successes << ','
            << r.success_rate << ',' << r.mean_reward << ',' << r.wall_seconds << '\n';
    }
}

std::vector<IterationRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<IterationRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        IterationRecord r;
        char c;
        if (!(ls >> r.iteration >> c >> r.timesteps >> c >> r.episodes >> c >> r.successes >> c >>
              r.success_rate >> c >> r.mean_reward >> c >> r.wall_seconds))
            throw std::runtime_error("bad CSV row in " + path);
        records.push_back(r);
    }
    return records;
}

double t_quantile_975(int df) {
    // two-sided 95% Student-t critical values; normal limit beyond the table
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                   2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                   2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                   2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1) throw std::invalid_argument("t_quantile: df < 1");
    if (df <= 30) return table[df - 1];
    return 1.96;
}

CellSummary summarize(const std::vector<std::string>& csv_paths, double threshold) {
    if (csv_paths.empty()) throw std::invalid_argument("summarize: no CSVs");
    std::vector<std::vector<IterationRecord>> runs;
    std::size_t shortest = SIZE_MAX;
    for (const auto& p : csv_paths) {
        runs.push_back(read_metrics_csv(p));
        shortest = std::min(shortest, runs.back().size());
    }
    for (const auto& r : runs)
        if (r.size() != shortest)
            std::cerr << "summarize: truncating to " << shortest << " iterations\n";
    CellSummary s;
    s.iterations = static_cast<int>(shortest);
    const int n = static_cast<int>(runs.size());
    for (std::size_t i = 0; i < shortest; ++i) {
        double ms = 0.0, mr = 0.0;
        for (const auto& r : runs) {
            ms += r[i].success_rate;
            mr += r[i].mean_reward;
        }
        ms /= n;
        mr /= n;
        double half = 0.0;
        if (n > 1) {
            double var = 0.0;
            for (const auto& r : runs) var += (r[i].success_rate - ms) * (r[i].success_rate - ms);
            var /= (n - 1);
            half = t_quantile_975(n - 1) * std::sqrt(var / n);
        }
        s.mean_success.push_back(ms);
        s.ci_half.push_back(half);
        s.mean_reward.push_back(mr);
    }
    for (const auto& r : runs) {
        long hit = -1;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i].success_rate >= threshold) {
                hit = static_cast<long>(i);
                break;
            }
        }
        s.iters_to_half.push_back(hit);
    }
    return s;
}

void write_summary_csv(const std::string& path, const CellSummary& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "iteration,mean_success,ci_half,mean_reward\n";
    out.precision(17);
    for (int i = 0; i < s.iterations; ++i)
        out << i << ',' << s.mean_success[i] << ',' << s.ci_half[i] << ',' << s.mean_reward[i]
            << '\n';
    out << "# iters_to_threshold";
    for (long v : s.iters_to_half) out << ' ' << v;
    out << '\n';
}

}  // namespace der

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "der/rng.hpp"
#include "der/worker.hpp"
#include "support/stats.hpp"

using namespace der;

namespace {

ExperimentConfig worker_config() {
    ExperimentConfig cfg;
    cfg.hidden1 = 8;
    cfg.hidden2 = 8;
    cfg.seed = 5;
    cfg.num_buffers = 1;
    return cfg;
}

std::vector<std::unique_ptr<PrioritizedBuffer>> make_buffers(int n, std::size_t cap = 20000) {
    std::vector<std::unique_ptr<PrioritizedBuffer>> bufs;
    for (int i = 0; i < n; ++i) bufs.push_back(std::make_unique<PrioritizedBuffer>(cap, 0, 0.5, i));
    return bufs;
}

std::unique_ptr<EnvBase> peg_env(double init_angle_range = -1.0) {
    EnvConfig ec = EnvConfig::defaults_for(EnvVariant::PegInHole);
    if (init_angle_range >= 0.0) ec.init_angle_range = init_angle_range;
    return std::make_unique<InsertionEnv>(ec);
}

/// Snapshot around an all-zero actor (outputs tanh(0) = 0, i.e. no motion),
/// optionally with one output bias forced so that action slot `slot`
/// saturates toward sign(bias) * a_max.
ParameterSnapshot make_snapshot(const ExperimentConfig& cfg, int slot = -1, double bias = 0.0) {
    Mlp actor({static_cast<int>(kObsDim), cfg.hidden1, cfg.hidden2, static_cast<int>(kActionDim)},
              OutputActivation::Tanh);
    std::vector<double> v = actor.flat_values();
    if (slot >= 0) v[v.size() - kActionDim + slot] = bias;
    actor.set_flat(v);
    ParameterSnapshot snap;
    snap.version = 1;
    snap.actor = actor.flatten();
    snap.checksum = ParameterSnapshot::compute_checksum(snap.version, snap.actor.values);
    return snap;
}

Episode canned_episode(int n, bool success) {
    std::vector<Transition> ts;
    for (int i = 0; i < n; ++i) {
        Transition t;
        t.s.data[6] = 1.0;
        t.s_next.data[6] = 1.0;
        t.r = static_cast<double>(i);
        t.done = success && i == n - 1;
        t.success = t.done;
        ts.push_back(t);
    }
    return Episode::from_transitions(ts);
}

}  // namespace

TEST_CASE("zero exploration noise: identical workers produce identical episodes") {
    ExperimentConfig cfg = worker_config();
    cfg.exploration_sigma_scale = 0.0;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w1(cfg, 0, peg_env(), &bufs, &pool);
    Worker w2(cfg, 0, peg_env(), &bufs, &pool);
    ParameterSnapshot snap = make_snapshot(cfg, 2, -5.0);
    Episode e1 = w1.run_episode(snap);
    Episode e2 = w2.run_episode(snap);
    REQUIRE(e1.length() == e2.length());
    for (std::size_t i = 0; i < e1.transitions.size(); ++i) {
        CHECK(e1.transitions[i].a.data == e2.transitions[i].a.data);
        CHECK(e1.transitions[i].r == e2.transitions[i].r);
        CHECK(e1.transitions[i].s.data == e2.transitions[i].s.data);
    }
}

TEST_CASE("saturated descent policy reaches the goal on the aligned peg") {
    ExperimentConfig cfg = worker_config();
    cfg.exploration_sigma_scale = 0.0;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w(cfg, 0, peg_env(0.0), &bufs, &pool);
    Episode e = w.run_episode(make_snapshot(cfg, 2, -8.0));
    CHECK(e.success);
    CHECK(e.transitions.back().done);
    CHECK(e.transitions.back().success);
    CHECK(e.transitions.back().r > 900.0);  // terminal bonus dominates
    CHECK(w.episodes_run() == 1);
}

TEST_CASE("episode truncation at T_max flags done without success") {
    ExperimentConfig cfg = worker_config();
    cfg.exploration_sigma_scale = 0.0;
    cfg.max_episode_steps = 4;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w(cfg, 0, peg_env(), &bufs, &pool);
    Episode e = w.run_episode(make_snapshot(cfg));  // zero policy never finishes
    CHECK(e.length() == 4);
    CHECK(e.transitions.back().done);
    CHECK(!e.transitions.back().success);
    CHECK(!e.success);
    for (std::size_t i = 0; i + 1 < e.transitions.size(); ++i) CHECK(!e.transitions[i].done);
}

TEST_CASE("episode ships in fragment-sized chunks to a single buffer") {
    ExperimentConfig cfg = worker_config();
    cfg.fragment_size = 50;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    EventLog events;
    Worker w(cfg, 0, peg_env(), &bufs, &pool, &events);
    w.ship_fragments(canned_episode(120, false));
    CHECK(w.transitions_shipped() == 120);
    CHECK(bufs[0]->total_inserted() == 120);
    CHECK(bufs[0]->size() == 120);
    std::vector<long> counts;
    for (const auto& e : events.snapshot())
        if (e.type == Event::Type::InsertMain) {
            counts.push_back(e.count);
            CHECK(e.buffer == 0);
        }
    CHECK(counts == std::vector<long>({50, 50, 20}));
    // stored in order
    for (int i = 0; i < 120; ++i) CHECK(bufs[0]->transition_at(i).r == static_cast<double>(i));
}

TEST_CASE("episode routing is uniform across buffers (chi-square)") {
    ExperimentConfig cfg = worker_config();
    cfg.num_buffers = 6;
    auto bufs = make_buffers(6, 20000);
    SuccessPool pool(10);
    Worker w(cfg, 0, peg_env(), &bufs, &pool);
    for (int i = 0; i < 10000; ++i) w.ship_fragments(canned_episode(1, false));
    std::vector<long> counts;
    for (auto& b : bufs) counts.push_back(static_cast<long>(b->total_inserted()));
    long total = 0;
    for (long c : counts) total += c;
    CHECK(total == 10000);
    double p = testsupport::chi2_gof_pvalue(counts, std::vector<double>(6, 1.0 / 6));
    CHECK(p > 0.01);
}

TEST_CASE("only successful episodes reach the pool") {
    ExperimentConfig cfg = worker_config();
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    EventLog events;
    Worker w(cfg, 0, peg_env(), &bufs, &pool, &events);
    w.ship_fragments(canned_episode(5, false));
    CHECK(pool.empty());
    w.ship_fragments(canned_episode(5, true));
    CHECK(pool.size() == 1);
    int pool_adds = 0;
    for (const auto& e : events.snapshot())
        if (e.type == Event::Type::PoolAdd) ++pool_adds;
    CHECK(pool_adds == 1);
}

TEST_CASE("concurrent shipping conserves the transition count") {
    ExperimentConfig cfg = worker_config();
    cfg.num_buffers = 4;
    auto bufs = make_buffers(4, 20000);
    SuccessPool pool(10000);
    std::vector<std::unique_ptr<Worker>> workers;
    for (int i = 0; i < 4; ++i)
        workers.push_back(std::make_unique<Worker>(cfg, i, peg_env(), &bufs, &pool));
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i)
        threads.emplace_back([&, i] {
            for (int k = 0; k < 200; ++k) workers[i]->ship_fragments(canned_episode(7, k % 3 == 0));
        });
    for (auto& t : threads) t.join();
    std::uint64_t shipped = 0, inserted = 0;
    for (auto& w : workers) shipped += w->transitions_shipped();
    for (auto& b : bufs) inserted += b->total_inserted();
    CHECK(shipped == 4u * 200u * 7u);
    CHECK(shipped == inserted);
    CHECK(pool.size() == 4 * 67);  // k % 3 == 0 for 67 of 200 episodes
}

TEST_CASE("distinct workers draw distinct noise streams") {
    ExperimentConfig cfg = worker_config();
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w1(cfg, 0, peg_env(0.0), &bufs, &pool);
    Worker w2(cfg, 1, peg_env(0.0), &bufs, &pool);
    ParameterSnapshot snap = make_snapshot(cfg);
    Episode e1 = w1.run_episode(snap);
    Episode e2 = w2.run_episode(snap);
    // same env start (aligned, deterministic) but different noise -> actions differ
    CHECK(e1.transitions[0].a.data != e2.transitions[0].a.data);
}

TEST_CASE("sigma ladder spreads exploration across workers") {
    ExperimentConfig cfg = worker_config();
    cfg.sigma_ladder = true;
    cfg.num_workers = 5;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker first(cfg, 0, peg_env(), &bufs, &pool);
    Worker last(cfg, 4, peg_env(), &bufs, &pool);
    CHECK(first.sigma() == doctest::Approx(cfg.exploration_sigma_scale * cfg.a_max));
    CHECK(last.sigma() == doctest::Approx(0.25 * cfg.exploration_sigma_scale * cfg.a_max));
    CHECK(first.sigma() > last.sigma());
}

TEST_CASE("actions respect the magnitude bound even under noise") {
    ExperimentConfig cfg = worker_config();
    cfg.exploration_sigma_scale = 2.0;  // huge noise; clamp must hold
    cfg.max_episode_steps = 50;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w(cfg, 0, peg_env(), &bufs, &pool);
    Episode e = w.run_episode(make_snapshot(cfg));
    for (const auto& t : e.transitions)
        for (double a : t.a.data) CHECK(std::abs(a) <= cfg.a_max + 1e-15);
}

TEST_CASE("worker tracks the snapshot version") {
    ExperimentConfig cfg = worker_config();
    cfg.exploration_sigma_scale = 0.0;
    cfg.max_episode_steps = 3;
    auto bufs = make_buffers(1);
    SuccessPool pool(10);
    Worker w(cfg, 0, peg_env(0.0), &bufs, &pool);

    ParameterSnapshot idle = make_snapshot(cfg);            // zero policy
    ParameterSnapshot descend = make_snapshot(cfg, 2, -8.0);
    descend.version = 2;
    descend.checksum = ParameterSnapshot::compute_checksum(2, descend.actor.values);

    Episode e1 = w.run_episode(idle);
    CHECK(e1.transitions[0].a.data[2] == 0.0);
    Episode e2 = w.run_episode(descend);
    CHECK(e2.transitions[0].a.data[2] < -0.04);
    Episode e3 = w.run_episode(idle);  // version 1 again -> actor swapped back
    CHECK(e3.transitions[0].a.data[2] == 0.0);
}

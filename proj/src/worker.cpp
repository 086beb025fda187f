#include "der/worker.hpp"

#include <cmath>
#include <iostream>
#include <span>

#include "der/rng.hpp"

namespace der {

Worker::Worker(const ExperimentConfig& cfg, int id, std::unique_ptr<EnvBase> env,
               std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers, SuccessPool* pool,
               EventLog* events)
    : cfg_(cfg),
      id_(id),
      env_(std::move(env)),
      buffers_(buffers),
      pool_(pool),
      events_(events),
      actor_({static_cast<int>(kObsDim), cfg.hidden1, cfg.hidden2, static_cast<int>(kActionDim)},
             OutputActivation::Tanh),
      env_rng_(seed_stream(cfg.seed, "env/worker-" + std::to_string(id))),
      noise_rng_(seed_stream(cfg.seed, "noise/worker-" + std::to_string(id))),
      route_rng_(seed_stream(cfg.seed, "route/worker-" + std::to_string(id))) {
    sigma_ = cfg.exploration_sigma_scale * cfg.a_max;
    if (cfg.sigma_ladder && cfg.num_workers > 1) {
        // Ape-X style spread: later workers explore less
        double frac = static_cast<double>(id) / static_cast<double>(cfg.num_workers - 1);
        sigma_ *= std::pow(0.25, frac);
    }
}

Episode Worker::run_episode(const ParameterSnapshot& snap) {
    if (snap.version != actor_version_) {
        actor_.set_parameters(snap.actor);
        actor_version_ = snap.version;
    }
    std::normal_distribution<double> noise(0.0, sigma_);
    Observation obs;
    try {
        obs = env_->reset(env_rng_);
    } catch (const std::exception& e) {
        std::cerr << "worker " << id_ << ": env reset fault: " << e.what() << "\n";
        throw;
    }
    std::vector<Transition> ts;
    ts.reserve(cfg_.max_episode_steps);
    for (int t = 0; t < cfg_.max_episode_steps; ++t) {
        Observation norm = snap.filter.apply(obs);
        std::vector<double> u = actor_.forward({norm.data.begin(), norm.data.end()});
        std::array<double, kActionDim> raw{};
        for (std::size_t j = 0; j < kActionDim; ++j) {
            raw[j] = u[j] * cfg_.a_max;
            if (sigma_ > 0.0) raw[j] += noise(noise_rng_);
        }
        Action act(raw, cfg_.a_max);
        StepResult r;
        try {
            r = env_->step(act);
        } catch (const std::exception& e) {
            std::cerr << "worker " << id_ << ": env fault, episode discarded: " << e.what() << "\n";
            throw;
        }
        bool last = r.done || t + 1 == cfg_.max_episode_steps;
        ts.push_back(Transition{obs, act, r.obs, r.reward, last, r.success});
        obs = r.obs;
        if (r.done) break;
    }
    ++episodes_;
    return Episode::from_transitions(std::move(ts));
}

void Worker::ship_fragments(const Episode& episode) {
    std::uniform_int_distribution<std::size_t> pick(0, buffers_->size() - 1);
    std::size_t bi = pick(route_rng_);
    PrioritizedBuffer& buf = *(*buffers_)[bi];
    const auto& ts = episode.transitions;
    const std::size_t frag = static_cast<std::size_t>(cfg_.fragment_size);
    for (std::size_t off = 0; off < ts.size(); off += frag) {
        std::size_t n = std::min(frag, ts.size() - off);
        buf.insert_main(std::span<const Transition>(ts.data() + off, n));
        shipped_ += n;
        if (events_)
            events_->add({Event::Type::InsertMain, episodes_, buf.id(), static_cast<long>(n)});
    }
    if (episode.success) {
        pool_->add(episode);
        if (events_) events_->add({Event::Type::PoolAdd, episodes_, -1, 0});
    }
}

}  // namespace der

#include "der/learner.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "der/rng.hpp"

namespace der {

std::uint64_t ParameterSnapshot::compute_checksum(std::uint64_t version,
                                                  const std::vector<double>& values) {
    std::uint64_t h = 14695981039346656037ull ^ version;
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    }
    return h;
}

Learner::Learner(const ExperimentConfig& cfg, std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers,
                 SuccessPool* pool, EventLog* events)
    : cfg_(cfg),
      buffers_(buffers),
      pool_(pool),
      events_(events),
      actor_({static_cast<int>(kObsDim), cfg.hidden1, cfg.hidden2, static_cast<int>(kActionDim)},
             OutputActivation::Tanh),
      critic_({static_cast<int>(kObsDim + kActionDim), cfg.hidden1, cfg.hidden2, 1},
              OutputActivation::Identity),
      target_actor_(actor_),
      target_critic_(critic_),
      select_rng_(seed_stream(cfg.seed, "trainer/select")),
      sample_rng_(seed_stream(cfg.seed, "trainer/sample")),
      refresh_rng_(seed_stream(cfg.seed, "der/refresh")) {
    auto init_rng_a = seed_stream(cfg.seed, "init/actor");
    auto init_rng_c = seed_stream(cfg.seed, "init/critic");
    actor_.init(init_rng_a);
    critic_.init(init_rng_c);
    target_actor_ = actor_;
    target_critic_ = critic_;
    actor_adam_ = AdamState(actor_.parameter_count(), cfg.learning_rate);
    critic_adam_ = AdamState(critic_.parameter_count(), cfg.learning_rate);
    publish();
}

void Learner::ingest(const Observation& obs) { filter_.update(obs); }

void Learner::ingest_episode(const Episode& e) {
    for (const auto& t : e.transitions) filter_.update(t.s);
    filter_.update(e.transitions.back().s_next);
}

std::vector<double> Learner::normalize_batch(const std::vector<Transition>& ts, bool next) const {
    std::vector<double> out(ts.size() * kObsDim);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        Observation n = filter_.apply(next ? ts[i].s_next : ts[i].s);
        std::copy(n.data.begin(), n.data.end(), out.begin() + i * kObsDim);
    }
    return out;
}

std::vector<double> Learner::action_batch(const std::vector<Transition>& ts) const {
    std::vector<double> out(ts.size() * kActionDim);
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < kActionDim; ++j)
            out[i * kActionDim + j] = ts[i].a.data[j] / cfg_.a_max;
    return out;
}

namespace {

std::vector<double> concat_rows(const std::vector<double>& a, std::size_t acols,
                                const std::vector<double>& b, std::size_t bcols, std::size_t rows) {
    std::vector<double> out(rows * (acols + bcols));
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy(a.begin() + r * acols, a.begin() + (r + 1) * acols,
                  out.begin() + r * (acols + bcols));
        std::copy(b.begin() + r * bcols, b.begin() + (r + 1) * bcols,
                  out.begin() + r * (acols + bcols) + acols);
    }
    return out;
}

}  // namespace

std::vector<double> Learner::td_targets(const SampleBatch& batch) const {
    const std::size_t n = batch.transitions.size();
    std::vector<double> s_next = normalize_batch(batch.transitions, true);
    MlpCache ac = target_actor_.forward_batch(s_next, static_cast<int>(n));
    std::vector<double> critic_in = concat_rows(s_next, kObsDim, ac.act.back(), kActionDim, n);
    MlpCache qc = target_critic_.forward_batch(critic_in, static_cast<int>(n));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = batch.transitions[i];
        y[i] = t.r + cfg_.gamma * (t.done ? 0.0 : 1.0) * qc.act.back()[i];
    }
    return y;
}

std::vector<double> Learner::q_values(const SampleBatch& batch) const {
    const std::size_t n = batch.transitions.size();
    std::vector<double> s = normalize_batch(batch.transitions, false);
    std::vector<double> a = action_batch(batch.transitions);
    std::vector<double> critic_in = concat_rows(s, kObsDim, a, kActionDim, n);
    MlpCache qc = critic_.forward_batch(critic_in, static_cast<int>(n));
    return qc.act.back();
}

std::vector<double> Learner::compute_priorities(const SampleBatch& batch,
                                                const std::vector<double>& targets) const {
    std::vector<double> q = q_values(batch);
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = std::abs(targets[i] - q[i]);
    return p;
}

void Learner::enqueue_observations(const Episode& e) {
    std::lock_guard lock(queue_mu_);
    for (const auto& t : e.transitions) obs_queue_.push_back(t.s);
    obs_queue_.push_back(e.transitions.back().s_next);
}

void Learner::drain_observation_queue() {
    std::vector<Observation> pending;
    {
        std::lock_guard lock(queue_mu_);
        pending.swap(obs_queue_);
    }
    for (const auto& o : pending) filter_.update(o);
}

Learner::LossInfo Learner::compute_losses(const SampleBatch& batch) const {
    const std::size_t n = batch.transitions.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    LossInfo info;

    std::vector<double> y = td_targets(batch);

    // critic: weighted squared TD error
    std::vector<double> s = normalize_batch(batch.transitions, false);
    std::vector<double> a = action_batch(batch.transitions);
    std::vector<double> critic_in = concat_rows(s, kObsDim, a, kActionDim, n);
    MlpCache qc = critic_.forward_batch(critic_in, static_cast<int>(n));
    info.td.resize(n);
    std::vector<double> upstream(n);
    for (std::size_t i = 0; i < n; ++i) {
        info.td[i] = y[i] - qc.act.back()[i];
        info.critic_loss += batch.weights[i] * info.td[i] * info.td[i];
        upstream[i] = cfg_.critic_loss_coef * batch.weights[i] * 2.0 * (-info.td[i]) * inv_n;
    }
    info.critic_loss *= cfg_.critic_loss_coef * inv_n;
    info.critic_grad = critic_.backward_batch(qc, upstream).flatten();

    // actor: maximize Q(s, pi(s)) -> loss = -coef * mean Q
    MlpCache pc = actor_.forward_batch(s, static_cast<int>(n));
    std::vector<double> actor_critic_in = concat_rows(s, kObsDim, pc.act.back(), kActionDim, n);
    MlpCache q2 = critic_.forward_batch(actor_critic_in, static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) info.actor_loss += q2.act.back()[i];
    info.actor_loss *= -cfg_.actor_loss_coef * inv_n;
    std::vector<double> qup(n, -cfg_.actor_loss_coef * inv_n);
    MlpGradients through = critic_.backward_batch(q2, qup);
    // chain the action slice of the critic input gradient through the actor
    std::vector<double> da(n * kActionDim);
    for (std::size_t i = 0; i < n; ++i)
        std::copy(through.dinput.begin() + i * (kObsDim + kActionDim) + kObsDim,
                  through.dinput.begin() + (i + 1) * (kObsDim + kActionDim),
                  da.begin() + i * kActionDim);
    info.actor_grad = actor_.backward_batch(pc, da).flatten();
    return info;
}

bool Learner::train_step() {
    drain_observation_queue();
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < buffers_->size(); ++i)
        if ((*buffers_)[i]->size() >= static_cast<std::size_t>(cfg_.learning_start)) ready.push_back(i);
    if (ready.empty()) return false;
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    std::size_t chosen = ready[pick(select_rng_)];
    if (selection_counts_.size() != buffers_->size()) selection_counts_.assign(buffers_->size(), 0);
    ++selection_counts_[chosen];
    PrioritizedBuffer& buf = *(*buffers_)[chosen];
    auto batch_opt = buf.sample(static_cast<std::size_t>(cfg_.train_batch_size), cfg_.is_beta, sample_rng_);
    if (!batch_opt) return false;
    const SampleBatch& batch = *batch_opt;

    LossInfo info = compute_losses(batch);

    std::vector<double> cflat = critic_.flat_values();
    adam_step(cflat, info.critic_grad, critic_adam_);
    critic_.set_flat(cflat);
    std::vector<double> aflat = actor_.flat_values();
    adam_step(aflat, info.actor_grad, actor_adam_);
    actor_.set_flat(aflat);

    buf.update_priorities(batch.indices, batch.generations, info.td);

    ++steps_;
    last_critic_loss_ = info.critic_loss;
    last_actor_loss_ = info.actor_loss;

    if (steps_ % cfg_.target_update_freq == 0) {
        ModelParameters ta = target_actor_.flatten();
        hard_update(ta, actor_.flatten());
        target_actor_.set_parameters(ta);
        ModelParameters tc = target_critic_.flatten();
        hard_update(tc, critic_.flatten());
        target_critic_.set_parameters(tc);
        if (events_) events_->add({Event::Type::TargetCopy, steps_, -1, 0});
    }
    if (cfg_.der_enabled && steps_ % cfg_.der_refresh_period == 0) {
        refresh_zones(*pool_, *buffers_, refresh_rng_);
        if (events_) events_->add({Event::Type::ZoneRefresh, steps_, -1, static_cast<long>(pool_->size())});
    }
    publish();
    return true;
}

void Learner::publish() {
    auto snap = std::make_shared<ParameterSnapshot>();
    snap->version = ++version_;
    snap->actor = actor_.flatten();
    snap->filter = filter_;
    snap->checksum = ParameterSnapshot::compute_checksum(snap->version, snap->actor.values);
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(snap);
}

std::shared_ptr<const ParameterSnapshot> Learner::snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return snapshot_;
}

void Learner::save_checkpoint(const std::string& prefix) const {
    save_parameters(actor_.flatten(), prefix + ".actor");
    save_parameters(critic_.flatten(), prefix + ".critic");
    save_parameters(target_actor_.flatten(), prefix + ".target_actor");
    save_parameters(target_critic_.flatten(), prefix + ".target_critic");
}

void Learner::load_checkpoint(const std::string& prefix) {
    actor_.set_parameters(load_parameters(prefix + ".actor"));
    critic_.set_parameters(load_parameters(prefix + ".critic"));
    target_actor_.set_parameters(load_parameters(prefix + ".target_actor"));
    target_critic_.set_parameters(load_parameters(prefix + ".target_critic"));
    publish();
}

}  // namespace der

#ifndef DER_LEARNER_HPP_
#define DER_LEARNER_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "der/config.hpp"
#include "der/der.hpp"
#include "der/events.hpp"
#include "der/filter.hpp"
#include "der/mlp.hpp"
#include "der/replay.hpp"

namespace der {

/// Atomic actor + filter snapshot handed to workers at episode start.
struct ParameterSnapshot {
    std::uint64_t version = 0;
    ModelParameters actor;
    ObservationFilter filter;
    std::uint64_t checksum = 0;  // over version and actor values

    static std::uint64_t compute_checksum(std::uint64_t version, const std::vector<double>& values);
    bool consistent() const { return checksum == compute_checksum(version, actor.values); }
};

/// DDPG trainer: samples a batch from a randomly chosen ready buffer,
/// applies the weighted critic / actor losses, writes absolute-TD priorities
/// back, hard-copies targets on schedule and triggers DER refreshes.
class Learner {
  public:
    Learner(const ExperimentConfig& cfg, std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers,
            SuccessPool* pool, EventLog* events = nullptr);

    /// Trainer-side filter ingest; single writer.
    void ingest(const Observation& obs);
    void ingest_episode(const Episode& e);

    /// Thread-safe handoff from workers; the trainer drains the queue into
    /// the filter at the start of each train_step.
    void enqueue_observations(const Episode& e);
    void drain_observation_queue();

    std::vector<double> td_targets(const SampleBatch& batch) const;
    std::vector<double> q_values(const SampleBatch& batch) const;
    std::vector<double> compute_priorities(const SampleBatch& batch,
                                           const std::vector<double>& targets) const;

    struct LossInfo {
        double critic_loss = 0.0;
        double actor_loss = 0.0;
        std::vector<double> critic_grad;  // flat, same layout as Mlp::flat_values
        std::vector<double> actor_grad;
        std::vector<double> td;
    };
    LossInfo compute_losses(const SampleBatch& batch) const;

    /// One Alg.-1 trainer cycle. Returns false (no-op) when no buffer has
    /// reached the learning-start threshold.
    bool train_step();

    std::shared_ptr<const ParameterSnapshot> snapshot() const;

    long step_count() const { return steps_; }
    double last_critic_loss() const { return last_critic_loss_; }
    double last_actor_loss() const { return last_actor_loss_; }
    const std::vector<long>& buffer_selection_counts() const { return selection_counts_; }

    const Mlp& actor() const { return actor_; }
    const Mlp& critic() const { return critic_; }
    const Mlp& target_actor() const { return target_actor_; }
    const Mlp& target_critic() const { return target_critic_; }
    const ObservationFilter& filter() const { return filter_; }

    void save_checkpoint(const std::string& prefix) const;
    void load_checkpoint(const std::string& prefix);

  private:
    void publish();
    std::vector<double> normalize_batch(const std::vector<Transition>& ts, bool next) const;
    std::vector<double> action_batch(const std::vector<Transition>& ts) const;

    ExperimentConfig cfg_;
    std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers_;
    SuccessPool* pool_;
    EventLog* events_;

    Mlp actor_, critic_, target_actor_, target_critic_;
    AdamState actor_adam_, critic_adam_;
    ObservationFilter filter_;
    long steps_ = 0;
    double last_critic_loss_ = 0.0;
    double last_actor_loss_ = 0.0;
    std::vector<long> selection_counts_;

    std::mt19937_64 select_rng_, sample_rng_, refresh_rng_;

    std::shared_ptr<const ParameterSnapshot> snapshot_;
    std::uint64_t version_ = 0;
    mutable std::mutex snapshot_mu_;

    std::vector<Observation> obs_queue_;
    std::mutex queue_mu_;
};

}  // namespace der

#endif  // DER_LEARNER_HPP_

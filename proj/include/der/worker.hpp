#ifndef DER_WORKER_HPP_
#define DER_WORKER_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "der/config.hpp"
#include "der/der.hpp"
#include "der/env.hpp"
#include "der/events.hpp"
#include "der/learner.hpp"
#include "der/mlp.hpp"
#include "der/replay.hpp"

namespace der {

/// Rollout actor: owns one env instance and its random streams, acts with
/// Gaussian exploration noise, ships whole episodes in fragments to one
/// uniformly chosen buffer, and reports successes to the pool.
class Worker {
  public:
    Worker(const ExperimentConfig& cfg, int id, std::unique_ptr<EnvBase> env,
           std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers, SuccessPool* pool,
           EventLog* events = nullptr);

    Episode run_episode(const ParameterSnapshot& snap);
    void ship_fragments(const Episode& episode);

    int id() const { return id_; }
    double sigma() const { return sigma_; }
    long episodes_run() const { return episodes_; }
    std::uint64_t transitions_shipped() const { return shipped_; }

  private:
    ExperimentConfig cfg_;
    int id_;
    std::unique_ptr<EnvBase> env_;
    std::vector<std::unique_ptr<PrioritizedBuffer>>* buffers_;
    SuccessPool* pool_;
    EventLog* events_;
    Mlp actor_;
    std::uint64_t actor_version_ = 0;
    double sigma_;
    std::mt19937_64 env_rng_, noise_rng_, route_rng_;
    long episodes_ = 0;
    std::uint64_t shipped_ = 0;
};

}  // namespace der

#endif  // DER_WORKER_HPP_

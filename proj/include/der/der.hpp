#ifndef DER_DER_HPP_
#define DER_DER_HPP_

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "der/config.hpp"
#include "der/replay.hpp"
#include "der/types.hpp"

namespace der {

/// Bounded FIFO of successful episodes; multi-producer safe.
class SuccessPool {
  public:
    explicit SuccessPool(std::size_t capacity) : capacity_(capacity) {}

    /// Rejects unsuccessful episodes with an exception.
    void add(const Episode& episode);

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::size_t capacity() const { return capacity_; }

    /// Uniform draw; nullopt when empty.
    std::optional<Episode> sample(std::mt19937_64& rng) const;

    /// Snapshot in insertion order (oldest first).
    std::vector<Episode> snapshot() const;

    void dump(std::ostream& out) const;

  private:
    std::size_t capacity_;
    std::deque<Episode> episodes_;
    mutable std::mutex mu_;
};

struct DerSchedule {
    long period = 500;  // trainer iterations between refreshes
    bool enabled = false;
};

/// Loads demonstrations into the buffers according to the Fig.-1-style
/// structure; demos are pinned at top priority iff DER is disabled.
void initialize_structure(const ExperimentConfig& config, const std::vector<Episode>& demos,
                          std::vector<std::unique_ptr<PrioritizedBuffer>>& buffers);

/// Each buffer independently draws one episode from the pool (with
/// replacement across buffers) and appends it to its demo zone. Empty pool
/// is a no-op.
void refresh_zones(const SuccessPool& pool, std::vector<std::unique_ptr<PrioritizedBuffer>>& buffers,
                   std::mt19937_64& rng);

}  // namespace der

#endif  // DER_DER_HPP_

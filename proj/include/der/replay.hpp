#ifndef DER_REPLAY_HPP_
#define DER_REPLAY_HPP_

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "der/types.hpp"

namespace der {

/// Binary indexed sum tree over non-negative leaf values; O(log n) update
/// and proportional sampling.
class SumTree {
  public:
    explicit SumTree(std::size_t leaves);

    void set(std::size_t i, double value);
    double get(std::size_t i) const;
    double total() const { return tree_[1]; }
    std::size_t leaves() const { return leaves_; }

    /// Index of the leaf whose prefix interval contains mass u in [0, total).
    std::size_t find(double u) const;

  private:
    std::size_t leaves_;
    std::size_t base_;  // power-of-two leaf count
    std::vector<double> tree_;
};

struct SampleBatch {
    std::vector<Transition> transitions;
    std::vector<std::size_t> indices;
    std::vector<std::uint64_t> generations;
    std::vector<double> weights;  // normalized so max weight = 1
    int buffer_id = 0;
};

struct SlotInfo {
    std::size_t index;
    bool in_zone;
    bool occupied;
    bool pinned;
    double priority;
};

/// Prioritized replay buffer with a reserved demonstration zone.
/// Slots [0, zone_capacity) are the zone (FIFO, optionally pinned at the
/// buffer max priority); slots [zone_capacity, capacity) are the main ring.
/// All public operations are serialized by an internal mutex.
class PrioritizedBuffer {
  public:
    PrioritizedBuffer(std::size_t capacity, std::size_t zone_capacity, double alpha, int id = 0);

    void insert_main(std::span<const Transition> fragment);

    /// Appends an episode's transitions to the demo zone FIFO at the current
    /// max priority. Episodes longer than the zone are truncated to their most
    /// recent zone_capacity transitions (with a stderr warning).
    void load_demo(const Episode& episode, bool pinned);

    /// Proportional sampling over p^alpha across both regions; importance
    /// weights (N_occupied * P(i))^{-beta}, max-normalized. Empty buffer
    /// returns nullopt.
    std::optional<SampleBatch> sample(std::size_t batch_size, double beta, std::mt19937_64& rng);

    /// priority_i = |td_i| + eps_p. Stale (overwritten) indices are skipped;
    /// pinned slots ignore the update and re-snap to the buffer max.
    void update_priorities(const std::vector<std::size_t>& indices,
                           const std::vector<std::uint64_t>& generations,
                           const std::vector<double>& td_errors);

    std::size_t size() const;
    std::size_t zone_size() const;
    std::size_t main_size() const;
    std::uint64_t total_inserted() const;
    double max_priority() const;
    double priority_at(std::size_t index) const;
    bool pinned_at(std::size_t index) const;
    const Transition& transition_at(std::size_t index) const;
    std::size_t zone_capacity() const { return zone_cap_; }
    std::size_t capacity() const { return capacity_; }
    int id() const { return id_; }

    double tree_total() const;
    double leaf_sum() const;  // direct O(n) sum, for consistency checks

    void dump(std::ostream& out) const;

    static constexpr double kPriorityEps = 1e-6;

  private:
    struct Slot {
        Transition t;
        double priority = 0.0;
        bool pinned = false;
        bool occupied = false;
        std::uint64_t generation = 0;
    };

    void place_locked(std::size_t index, const Transition& t, double priority, bool pinned);
    void bump_max_locked(double p);

    std::size_t capacity_;
    std::size_t zone_cap_;
    double alpha_;
    int id_;
    std::vector<Slot> slots_;
    SumTree tree_;
    double max_priority_ = 1.0;
    std::size_t zone_next_ = 0;  // ring position inside [0, zone_cap_)
    std::size_t zone_count_ = 0;
    std::size_t main_next_;  // ring position inside [zone_cap_, capacity_)
    std::size_t main_count_ = 0;
    std::vector<std::size_t> pinned_slots_;
    std::uint64_t inserted_ = 0;
    mutable std::mutex mu_;
};

}  // namespace der

#endif  // DER_REPLAY_HPP_

#include "der/replay.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace der {

SumTree::SumTree(std::size_t leaves) : leaves_(leaves) {
    if (leaves == 0) throw std::invalid_argument("SumTree: zero leaves");
    base_ = 1;
    while (base_ < leaves) base_ <<= 1;
    tree_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t i, double value) {
    if (i >= leaves_) throw std::out_of_range("SumTree::set");
    if (!(value >= 0.0)) throw std::invalid_argument("SumTree: negative or NaN value");
    std::size_t node = base_ + i;
    tree_[node] = value;
    for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

double SumTree::get(std::size_t i) const {
    if (i >= leaves_) throw std::out_of_range("SumTree::get");
    return tree_[base_ + i];
}

std::size_t SumTree::find(double u) const {
    std::size_t node = 1;
    while (node < base_) {
        double left = tree_[2 * node];
        if (u < left) {
            node = 2 * node;
        } else {
            u -= left;
            node = 2 * node + 1;
        }
    }
    std::size_t leaf = node - base_;
    return std::min(leaf, leaves_ - 1);
}

PrioritizedBuffer::PrioritizedBuffer(std::size_t capacity, std::size_t zone_capacity, double alpha,
                                     int id)
    : capacity_(capacity),
      zone_cap_(zone_capacity),
      alpha_(alpha),
      id_(id),
      slots_(capacity),
      tree_(capacity),
      main_next_(zone_capacity) {
    if (zone_capacity >= capacity)
        throw std::invalid_argument("PrioritizedBuffer: zone must be smaller than capacity");
}

void PrioritizedBuffer::place_locked(std::size_t index, const Transition& t, double priority,
                                     bool pinned) {
    Slot& s = slots_[index];
    s.t = t;
    s.priority = priority;
    s.pinned = pinned;
    s.occupied = true;
    ++s.generation;
    tree_.set(index, std::pow(priority, alpha_));
    ++inserted_;
}

void PrioritizedBuffer::bump_max_locked(double p) {
    if (p <= max_priority_) return;
    max_priority_ = p;
    double leaf = std::pow(p, alpha_);
    for (std::size_t idx : pinned_slots_) {
        slots_[idx].priority = p;
        tree_.set(idx, leaf);
    }
}

void PrioritizedBuffer::insert_main(std::span<const Transition> fragment) {
    std::lock_guard lock(mu_);
    const std::size_t main_cap = capacity_ - zone_cap_;
    for (const Transition& t : fragment) {
        t.check();
        place_locked(main_next_, t, max_priority_, false);
        main_next_ = main_next_ + 1 == capacity_ ? zone_cap_ : main_next_ + 1;
        main_count_ = std::min(main_count_ + 1, main_cap);
    }
}

void PrioritizedBuffer::load_demo(const Episode& episode, bool pinned) {
    std::lock_guard lock(mu_);
    std::size_t n = episode.length();
    std::size_t begin = 0;
    if (n > zone_cap_) {
        std::cerr << "buffer " << id_ << ": demo of " << n << " transitions truncated to zone capacity "
                  << zone_cap_ << "\n";
        begin = n - zone_cap_;
    }
    for (std::size_t i = begin; i < n; ++i) {
        std::size_t idx = zone_next_;
        if (slots_[idx].pinned) {
            // slot leaves the pinned set before being overwritten
            std::erase(pinned_slots_, idx);
        }
        place_locked(idx, episode.transitions[i], max_priority_, pinned);
        if (pinned) pinned_slots_.push_back(idx);
        zone_next_ = (zone_next_ + 1) % zone_cap_;
        zone_count_ = std::min(zone_count_ + 1, zone_cap_);
    }
}

std::optional<SampleBatch> PrioritizedBuffer::sample(std::size_t batch_size, double beta,
                                                     std::mt19937_64& rng) {
    std::lock_guard lock(mu_);
    const std::size_t occupied = zone_count_ + main_count_;
    if (occupied == 0) return std::nullopt;
    const double total = tree_.total();
    if (!(total > 0.0)) return std::nullopt;
    SampleBatch batch;
    batch.buffer_id = id_;
    batch.transitions.reserve(batch_size);
    batch.indices.reserve(batch_size);
    batch.generations.reserve(batch_size);
    batch.weights.reserve(batch_size);
    std::uniform_real_distribution<double> unif(0.0, total);
    double wmax = 0.0;
    for (std::size_t k = 0; k < batch_size; ++k) {
        std::size_t idx;
        do {
            idx = tree_.find(unif(rng));
        } while (!slots_[idx].occupied);
        double prob = tree_.get(idx) / total;
        double w = std::pow(static_cast<double>(occupied) * prob, -beta);
        batch.transitions.push_back(slots_[idx].t);
        batch.indices.push_back(idx);
        batch.generations.push_back(slots_[idx].generation);
        batch.weights.push_back(w);
        wmax = std::max(wmax, w);
    }
    for (double& w : batch.weights) w /= wmax;
    return batch;
}

void PrioritizedBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                          const std::vector<std::uint64_t>& generations,
                                          const std::vector<double>& td_errors) {
    if (indices.size() != td_errors.size() || indices.size() != generations.size())
        throw std::invalid_argument("update_priorities: size mismatch");
    std::lock_guard lock(mu_);
    double new_max = max_priority_;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        std::size_t idx = indices[k];
        if (idx >= capacity_) throw std::out_of_range("update_priorities: bad index");
        Slot& s = slots_[idx];
        if (!s.occupied || s.generation != generations[k]) continue;  // stale, slot overwritten
        if (s.pinned) continue;  // pinned slots stay at the buffer max
        double p = std::abs(td_errors[k]) + kPriorityEps;
        s.priority = p;
        tree_.set(idx, std::pow(p, alpha_));
        new_max = std::max(new_max, p);
    }
    bump_max_locked(new_max);
}

std::size_t PrioritizedBuffer::size() const {
    std::lock_guard lock(mu_);
    return zone_count_ + main_count_;
}

std::size_t PrioritizedBuffer::zone_size() const {
    std::lock_guard lock(mu_);
    return zone_count_;
}

std::size_t PrioritizedBuffer::main_size() const {
    std::lock_guard lock(mu_);
    return main_count_;
}

std::uint64_t PrioritizedBuffer::total_inserted() const {
    std::lock_guard lock(mu_);
    return inserted_;
}

double PrioritizedBuffer::max_priority() const {
    std::lock_guard lock(mu_);
    return max_priority_;
}

double PrioritizedBuffer::priority_at(std::size_t index) const {
    std::lock_guard lock(mu_);
    return slots_.at(index).priority;
}

bool PrioritizedBuffer::pinned_at(std::size_t index) const {
    std::lock_guard lock(mu_);
    return slots_.at(index).pinned;
}

const Transition& PrioritizedBuffer::transition_at(std::size_t index) const {
    std::lock_guard lock(mu_);
    if (!slots_.at(index).occupied) throw std::out_of_range("transition_at: empty slot");
    return slots_[index].t;
}

double PrioritizedBuffer::tree_total() const {
    std::lock_guard lock(mu_);
    return tree_.total();
}

double PrioritizedBuffer::leaf_sum() const {
    std::lock_guard lock(mu_);
    double s = 0.0;
    for (std::size_t i = 0; i < capacity_; ++i) s += tree_.get(i);
    return s;
}

void PrioritizedBuffer::dump(std::ostream& out) const {
    std::lock_guard lock(mu_);
    out << "# buffer " << id_ << " slot region priority pinned\n";
    for (std::size_t i = 0; i < capacity_; ++i) {
        if (!slots_[i].occupied) continue;
        out << i << ' ' << (i < zone_cap_ ? "zone" : "main") << ' ' << slots_[i].priority << ' '
            << (slots_[i].pinned ? 1 : 0) << '\n';
    }
}

}  // namespace der

#include "der/der.hpp"

#include <iostream>
#include <stdexcept>

namespace der {

void SuccessPool::add(const Episode& episode) {
    if (!episode.success) throw std::invalid_argument("SuccessPool: episode is not successful");
    std::lock_guard lock(mu_);
    episodes_.push_back(episode);
    if (episodes_.size() > capacity_) episodes_.pop_front();
}

std::size_t SuccessPool::size() const {
    std::lock_guard lock(mu_);
    return episodes_.size();
}

std::optional<Episode> SuccessPool::sample(std::mt19937_64& rng) const {
    std::lock_guard lock(mu_);
    if (episodes_.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> dist(0, episodes_.size() - 1);
    return episodes_[dist(rng)];
}

std::vector<Episode> SuccessPool::snapshot() const {
    std::lock_guard lock(mu_);
    return {episodes_.begin(), episodes_.end()};
}

void SuccessPool::dump(std::ostream& out) const {
    std::lock_guard lock(mu_);
    out << "# pool id length total_reward\n";
    std::size_t i = 0;
    for (const auto& e : episodes_) out << i++ << ' ' << e.length() << ' ' << e.total_reward << '\n';
}

void initialize_structure(const ExperimentConfig& config, const std::vector<Episode>& demos,
                          std::vector<std::unique_ptr<PrioritizedBuffer>>& buffers) {
    const bool pinned = !config.der_enabled;
    switch (config.structure_type) {
        case StructureType::NoDemos:
            break;
        case StructureType::OneShotAll:
            if (demos.empty()) throw std::invalid_argument("one_shot_all needs at least one demo");
            for (auto& b : buffers) b->load_demo(demos.front(), pinned);
            break;
        case StructureType::AllShotsAll:
            if (demos.empty()) throw std::invalid_argument("all_shots_all needs at least one demo");
            for (auto& b : buffers)
                for (const auto& d : demos) b->load_demo(d, pinned);
            break;
        case StructureType::OneShotEach:
            if (demos.size() < buffers.size())
                throw std::invalid_argument("one_shot_each needs one demo per buffer");
            for (std::size_t i = 0; i < buffers.size(); ++i) buffers[i]->load_demo(demos[i], pinned);
            break;
    }
}

void refresh_zones(const SuccessPool& pool, std::vector<std::unique_ptr<PrioritizedBuffer>>& buffers,
                   std::mt19937_64& rng) {
    for (auto& b : buffers) {
        auto ep = pool.sample(rng);
        if (!ep) return;  // empty pool, nothing to refresh
        b->load_demo(*ep, false);
    }
}

}  // namespace der

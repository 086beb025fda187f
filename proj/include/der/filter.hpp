#ifndef DER_FILTER_HPP_
#define DER_FILTER_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "der/types.hpp"

namespace der {

/// Running mean/std over observations, Welford form. Single writer,
/// value-copied snapshots for readers.
struct ObservationFilter {
    std::uint64_t count = 0;
    std::array<double, kObsDim> mean{};
    std::array<double, kObsDim> m2{};  // sum of squared deviations

    void update(const Observation& obs) {
        if (!obs.finite()) throw std::invalid_argument("filter update: non-finite observation");
        ++count;
        for (std::size_t i = 0; i < kObsDim; ++i) {
            double delta = obs.data[i] - mean[i];
            mean[i] += delta / static_cast<double>(count);
            m2[i] += delta * (obs.data[i] - mean[i]);
        }
    }

    double variance(std::size_t i) const {
        if (count < 2) return 1.0;
        return m2[i] / static_cast<double>(count - 1);
    }

    double stddev(std::size_t i) const { return std::sqrt(variance(i)); }

    /// (obs - mean) / max(std, 1e-8); count < 2 falls back to std = 1.
    Observation apply(const Observation& obs) const {
        Observation out = obs;
        for (std::size_t i = 0; i < kObsDim; ++i) {
            double sd = count < 2 ? 1.0 : stddev(i);
            out.data[i] = (obs.data[i] - mean[i]) / std::max(sd, 1e-8);
        }
        return out;
    }

    void merge(const ObservationFilter& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        std::uint64_t n = count + other.count;
        for (std::size_t i = 0; i < kObsDim; ++i) {
            double delta = other.mean[i] - mean[i];
            double na = static_cast<double>(count), nb = static_cast<double>(other.count);
            mean[i] += delta * nb / static_cast<double>(n);
            m2[i] += other.m2[i] + delta * delta * na * nb / static_cast<double>(n);
        }
        count = n;
    }
};

}  // namespace der

#endif  // DER_FILTER_HPP_

#include "dreg/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace dreg::kernels {

namespace {

std::vector<std::size_t> compact(const std::vector<std::uint8_t>& mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            out.push_back(i);
        }
    }
    return out;
}

inline bool rigid_pair(const Correspondence& c, const Correspondence& a, double two_xi) {
    return std::abs((c.y - a.y).norm() - (c.x - a.x).norm()) <= two_xi;
}

}  // namespace

std::vector<std::size_t> rigidity_candidates_serial(std::span<const Correspondence> set, std::size_t anchor,
                                                    double xi) {
    const Correspondence& a = set[anchor];
    const double two_xi = 2.0 * xi;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i != anchor && rigid_pair(set[i], a, two_xi)) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> rigidity_candidates_omp(std::span<const Correspondence> set, std::size_t anchor,
                                                 double xi) {
    const Correspondence& a = set[anchor];
    const double two_xi = 2.0 * xi;
    const auto n = static_cast<std::int64_t>(set.size());
    std::vector<std::uint8_t> mask(set.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        mask[u] = u != anchor && rigid_pair(set[u], a, two_xi);
    }
    return compact(mask);
}

std::vector<std::size_t> consensus_serial(std::span<const Correspondence> set, const RigidTransform& tf,
                                          double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (residual(set[i], tf) <= threshold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> consensus_omp(std::span<const Correspondence> set, const RigidTransform& tf,
                                       double threshold) {
    const auto n = static_cast<std::int64_t>(set.size());
    std::vector<std::uint8_t> mask(set.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        mask[u] = residual(set[u], tf) <= threshold;
    }
    return compact(mask);
}

std::vector<std::size_t> consensus_subset_serial(std::span<const Correspondence> set,
                                                 std::span<const std::size_t> subset, const RigidTransform& tf,
                                                 double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t p : subset) {
        if (residual(set[p], tf) <= threshold) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<std::size_t> consensus_subset_omp(std::span<const Correspondence> set,
                                              std::span<const std::size_t> subset, const RigidTransform& tf,
                                              double threshold) {
    const auto n = static_cast<std::int64_t>(subset.size());
    std::vector<std::uint8_t> mask(subset.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        mask[u] = residual(set[subset[u]], tf) <= threshold;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            out.push_back(subset[i]);
        }
    }
    return out;
}

std::size_t consensus_count_serial(std::span<const Correspondence> set, const RigidTransform& tf,
                                   double threshold) {
    std::size_t count = 0;
    for (const auto& c : set) {
        count += residual(c, tf) <= threshold ? 1 : 0;
    }
    return count;
}

std::size_t consensus_count_omp(std::span<const Correspondence> set, const RigidTransform& tf, double threshold) {
    const auto n = static_cast<std::int64_t>(set.size());
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t i = 0; i < n; ++i) {
        count += residual(set[static_cast<std::size_t>(i)], tf) <= threshold ? 1 : 0;
    }
    return static_cast<std::size_t>(count);
}

}  // namespace dreg::kernels

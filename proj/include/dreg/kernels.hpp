#pragma once

// Data-parallel scans shared by the solvers. Each kernel has a serial
// reference and an OpenMP variant; both return positions in ascending order,
// so their outputs are identical element for element.

#include <cstddef>
#include <span>
#include <vector>

#include "dreg/solvers.hpp"

namespace dreg::kernels {

enum class Exec { Serial, OpenMP };

/// Positions i != anchor with | ||y_i - y_a|| - ||x_i - x_a|| | <= 2 xi.
std::vector<std::size_t> rigidity_candidates_serial(std::span<const Correspondence> set, std::size_t anchor,
                                                    double xi);
std::vector<std::size_t> rigidity_candidates_omp(std::span<const Correspondence> set, std::size_t anchor,
                                                 double xi);

/// Positions of `set` with residual <= threshold.
std::vector<std::size_t> consensus_serial(std::span<const Correspondence> set, const RigidTransform& tf,
                                          double threshold);
std::vector<std::size_t> consensus_omp(std::span<const Correspondence> set, const RigidTransform& tf,
                                       double threshold);

/// Members of `subset` (positions into `set`) with residual <= threshold.
std::vector<std::size_t> consensus_subset_serial(std::span<const Correspondence> set,
                                                 std::span<const std::size_t> subset, const RigidTransform& tf,
                                                 double threshold);
std::vector<std::size_t> consensus_subset_omp(std::span<const Correspondence> set,
                                              std::span<const std::size_t> subset, const RigidTransform& tf,
                                              double threshold);

std::size_t consensus_count_serial(std::span<const Correspondence> set, const RigidTransform& tf,
                                   double threshold);
std::size_t consensus_count_omp(std::span<const Correspondence> set, const RigidTransform& tf, double threshold);

inline std::vector<std::size_t> rigidity_candidates(Exec e, std::span<const Correspondence> set,
                                                    std::size_t anchor, double xi) {
    return e == Exec::OpenMP ? rigidity_candidates_omp(set, anchor, xi)
                             : rigidity_candidates_serial(set, anchor, xi);
}

inline std::vector<std::size_t> consensus(Exec e, std::span<const Correspondence> set, const RigidTransform& tf,
                                          double threshold) {
    return e == Exec::OpenMP ? consensus_omp(set, tf, threshold) : consensus_serial(set, tf, threshold);
}

inline std::vector<std::size_t> consensus_subset(Exec e, std::span<const Correspondence> set,
                                                 std::span<const std::size_t> subset, const RigidTransform& tf,
                                                 double threshold) {
    return e == Exec::OpenMP ? consensus_subset_omp(set, subset, tf, threshold)
                             : consensus_subset_serial(set, subset, tf, threshold);
}

inline std::size_t consensus_count(Exec e, std::span<const Correspondence> set, const RigidTransform& tf,
                                   double threshold) {
    return e == Exec::OpenMP ? consensus_count_omp(set, tf, threshold)
                             : consensus_count_serial(set, tf, threshold);
}

}  // namespace dreg::kernels

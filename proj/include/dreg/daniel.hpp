#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dreg/kernels.hpp"
#include "dreg/result.hpp"
#include "dreg/rng.hpp"
#include "dreg/solvers.hpp"

namespace dreg {

/// Noise scale and the thresholds derived from it (meters).
struct NoiseModel {
    double sigma = 0.01;
    double xi = 0.06;                   // inlier threshold, used by the rigidity test
    double xi_t = 0.05;                 // translation noise bound
    double consensus_threshold = 0.05;  // residual bound when building consensus sets

    /// xi = xi_factor * sigma, xi_t = 5 sigma, consensus threshold = 5 sigma.
    static NoiseModel from_sigma(double sigma, double xi_factor = 6.0);
    /// Throws std::invalid_argument on non-positive or non-finite fields.
    void validate() const;
};

/// Per-element thresholds of the compatibility staircase.
struct CompatibilityThresholds {
    double theta_r = 0.0;  // each of the 9 rotation entries
    double theta_t = 0.0;  // each of the 3 translation entries, meters
    double mu = 1.2;
    double s_scale = 0.0;  // rotation noise scale, radians
    double d_tilde = 1.0;  // mean axis diameter of the source cloud, meters

    /// theta_t = (2 mu / sqrt 3) xi_t, S = 10 sigma / D, theta_r = mu * 2 sqrt2 sin(S) / 3.
    static CompatibilityThresholds make(const NoiseModel& noise, double mu, double d_tilde);
};

/// Mean of the axis-aligned bounding-box extents of the source points.
double mean_axis_diameter(std::span<const Correspondence> set);

/// (vec(R) column-major, t): the 12 stacked model parameters.
using ModelVector = std::array<double, 12>;

ModelVector to_model_vector(const RigidTransform& tf);
RigidTransform from_model_vector(const ModelVector& v);

/// Append-only store of minimal models for one second-layer run. Parameters
/// are kept column-wise (one array per element) so that the first staircase
/// step over all stored models is a contiguous scan.
class ModelStore {
public:
    void clear() {
        for (auto& c : columns_) {
            c.clear();
        }
        models_.clear();
    }
    void push(const RigidTransform& tf) {
        const ModelVector v = to_model_vector(tf);
        for (std::size_t k = 0; k < 12; ++k) {
            columns_[k].push_back(v[k]);
        }
        models_.push_back(tf);
    }
    std::size_t size() const { return models_.size(); }
    bool empty() const { return models_.empty(); }
    ModelVector vector(std::size_t i) const {
        ModelVector v{};
        for (std::size_t k = 0; k < 12; ++k) {
            v[k] = columns_[k][i];
        }
        return v;
    }
    /// Element k of every stored model.
    std::span<const double> column(std::size_t k) const { return columns_[k]; }
    const RigidTransform& model(std::size_t i) const { return models_[i]; }

private:
    std::array<std::vector<double>, 12> columns_;
    std::vector<RigidTransform> models_;
};

struct StaircaseOutcome {
    bool compatible = false;
    int comparisons = 0;  // element checks performed before stopping
};

/// Element-wise check |a(k) - b(k)| <= theta(k), k = 1..12, stopping at the first violation.
StaircaseOutcome staircase(const ModelVector& a, const ModelVector& b, const CompatibilityThresholds& thr);

bool compatibility_staircase(const RigidTransform& a, const RigidTransform& b, const CompatibilityThresholds& thr);

/// Staircase of stored model `z` against `fresh`, reading the store's columns.
StaircaseOutcome staircase(const ModelStore& store, std::size_t z, const ModelVector& fresh,
                           const CompatibilityThresholds& thr);

/// Pairwise length preservation: | ||y_a - y_b|| - ||x_a - x_b|| | <= 2 xi.
bool rigidity_ok(const Correspondence& a, const Correspondence& b, double xi);

/// Positions i != anchor that pass rigidity_ok against the anchor, in input order.
std::vector<std::size_t> first_layer_candidates(std::span<const Correspondence> set, std::size_t anchor, double xi);

/// max(5, ceil(0.01 N))
std::size_t min_inliers(std::size_t n);

/// ceil(log(1 - 0.99) / log(1 - best/N)); 1 when best == N.
std::size_t update_max_itr_1(std::size_t best_size, std::size_t n);

/// ceil(2 log(1 - 0.995) / log(1 - (estimate/c)^2)); 2 when estimate == c.
std::size_t update_max_itr_2(std::size_t inlier_estimate, std::size_t c_size);

/// Initial layer-1 budget: the 1%-inlier bound.
inline constexpr std::size_t kInitialMaxItr1 = 459;

struct TerminationState {
    std::size_t max_itr_1 = kInitialMaxItr1;
    std::size_t max_itr_2 = 0;
    std::size_t samp_1 = 0;
    std::size_t samp_2 = 0;
    std::size_t best_size_1 = 0;
    std::size_t best_size_2 = 0;
    std::size_t i_min = 5;
};

struct SecondLayerResult {
    std::vector<std::size_t> best;  // positions into the full set
    std::size_t samples = 0;
    std::size_t models = 0;
    std::size_t compat_checks = 0;
    std::size_t consensus_builds = 0;
};

struct DanielOptions {
    NoiseModel noise;
    double mu = 1.2;
    /// Overrides the mean axis diameter computed from the source points.
    std::optional<double> d_tilde;
    /// Serial by default: one solve is single-threaded.
    kernels::Exec exec = kernels::Exec::Serial;
};

/**
 * Two-point sampling inside the candidate set of one anchor.
 *
 * Resets the store and the layer-2 counters in `term`, then samples pairs
 * {a, b} from `cands` until samp_2 exceeds max_itr_2. Each rigid pair yields
 * a minimal model on {anchor, a, b} that is staircase-checked against every
 * earlier model; each compatible partner is averaged with it and scored over
 * `cands`. The largest (latest on ties) consensus is returned.
 */
SecondLayerResult second_layer(std::span<const Correspondence> set, std::span<const std::size_t> cands,
                               std::size_t anchor, const NoiseModel& noise, const CompatibilityThresholds& thr,
                               TerminationState& term, Rng& rng, ModelStore& store,
                               kernels::Exec exec = kernels::Exec::Serial);

/// Full double-layer solve. Deterministic in (set, options, seed).
/// Throws NoConsensusFound when no model reaches the minimum support.
SolverResult solve_daniel(std::span<const Correspondence> set, const DanielOptions& options, std::uint64_t seed);

inline SolverResult solve_daniel(std::span<const Correspondence> set, const NoiseModel& noise, std::uint64_t seed) {
    DanielOptions options;
    options.noise = noise;
    return solve_daniel(set, options, seed);
}

}  // namespace dreg

#include "dreg/daniel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dreg/errors.hpp"

namespace dreg {

namespace {

constexpr double kConfidence1 = 0.99;
constexpr double kConfidence2 = 0.995;

// Ceiling that ignores rounding noise: 1.0000000000000002 counts as 1.
std::size_t ceil_count(double value) { return static_cast<std::size_t>(std::ceil(value - 1e-9)); }

}  // namespace

bool SolverResult::same_outcome(const SolverResult& o) const {
    return transform.rot.matrix() == o.transform.rot.matrix() && transform.tra == o.transform.tra &&
           inliers == o.inliers && iterations_layer1 == o.iterations_layer1 &&
           total_layer2_samples == o.total_layer2_samples && compat_checks == o.compat_checks &&
           consensus_builds == o.consensus_builds;
}

NoiseModel NoiseModel::from_sigma(double sigma, double xi_factor) {
    NoiseModel m{sigma, xi_factor * sigma, 5.0 * sigma, 5.0 * sigma};
    m.validate();
    return m;
}

void NoiseModel::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(sigma) || !positive(xi) || !positive(xi_t) || !positive(consensus_threshold)) {
        throw std::invalid_argument("noise model fields must be positive and finite");
    }
}

CompatibilityThresholds CompatibilityThresholds::make(const NoiseModel& noise, double mu, double d_tilde) {
    if (!(mu >= 1.0)) {
        throw std::invalid_argument("mu must be >= 1");
    }
    if (!(d_tilde > 0.0) || !std::isfinite(d_tilde)) {
        throw std::invalid_argument("mean axis diameter must be positive");
    }
    CompatibilityThresholds t;
    t.mu = mu;
    t.d_tilde = d_tilde;
    t.theta_t = 2.0 * mu / std::sqrt(3.0) * noise.xi_t;
    t.s_scale = 10.0 * noise.sigma / d_tilde;
    t.theta_r = mu * 2.0 * std::sqrt(2.0) * std::sin(t.s_scale) / 3.0;
    return t;
}

double mean_axis_diameter(std::span<const Correspondence> set) {
    if (set.empty()) {
        return 0.0;
    }
    Vec3 lo = set.front().x;
    Vec3 hi = set.front().x;
    for (const auto& c : set) {
        lo = lo.cwiseMin(c.x);
        hi = hi.cwiseMax(c.x);
    }
    return (hi - lo).mean();
}

ModelVector to_model_vector(const RigidTransform& tf) {
    ModelVector v{};
    const auto r = tf.rot.vec();
    std::copy(r.begin(), r.end(), v.begin());
    v[9] = tf.tra.x();
    v[10] = tf.tra.y();
    v[11] = tf.tra.z();
    return v;
}

RigidTransform from_model_vector(const ModelVector& v) {
    Mat3 m;
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r) {
            m(r, c) = v[static_cast<std::size_t>(3 * c + r)];
        }
    }
    return {Rotation::from_matrix_unchecked(m), Vec3(v[9], v[10], v[11])};
}

StaircaseOutcome staircase(const ModelVector& a, const ModelVector& b, const CompatibilityThresholds& thr) {
    for (int k = 0; k < 12; ++k) {
        const double limit = k < 9 ? thr.theta_r : thr.theta_t;
        const auto u = static_cast<std::size_t>(k);
        if (std::abs(a[u] - b[u]) > limit) {
            return {false, k + 1};
        }
    }
    return {true, 12};
}

StaircaseOutcome staircase(const ModelStore& store, std::size_t z, const ModelVector& fresh,
                           const CompatibilityThresholds& thr) {
    for (std::size_t k = 0; k < 12; ++k) {
        const double limit = k < 9 ? thr.theta_r : thr.theta_t;
        if (std::abs(store.column(k)[z] - fresh[k]) > limit) {
            return {false, static_cast<int>(k) + 1};
        }
    }
    return {true, 12};
}

bool compatibility_staircase(const RigidTransform& a, const RigidTransform& b, const CompatibilityThresholds& thr) {
    return staircase(to_model_vector(a), to_model_vector(b), thr).compatible;
}

bool rigidity_ok(const Correspondence& a, const Correspondence& b, double xi) {
    return std::abs((a.y - b.y).norm() - (a.x - b.x).norm()) <= 2.0 * xi;
}

std::vector<std::size_t> first_layer_candidates(std::span<const Correspondence> set, std::size_t anchor,
                                                double xi) {
    if (anchor >= set.size()) {
        throw std::out_of_range("anchor position outside the correspondence set");
    }
    return kernels::rigidity_candidates_serial(set, anchor, xi);
}

std::size_t min_inliers(std::size_t n) {
    return std::max<std::size_t>(5, ceil_count(0.01 * static_cast<double>(n)));
}

std::size_t update_max_itr_1(std::size_t best_size, std::size_t n) {
    if (best_size == 0 || best_size > n) {
        throw std::invalid_argument("update_max_itr_1 requires 0 < best_size <= N");
    }
    if (best_size == n) {
        return 1;
    }
    const double ratio = static_cast<double>(best_size) / static_cast<double>(n);
    return ceil_count(std::log(1.0 - kConfidence1) / std::log1p(-ratio));
}

std::size_t update_max_itr_2(std::size_t inlier_estimate, std::size_t c_size) {
    if (inlier_estimate == 0 || inlier_estimate > c_size) {
        throw std::invalid_argument("update_max_itr_2 requires 0 < estimate <= |C|");
    }
    if (inlier_estimate == c_size) {
        return 2;
    }
    const double ratio = static_cast<double>(inlier_estimate) / static_cast<double>(c_size);
    return ceil_count(2.0 * std::log(1.0 - kConfidence2) / std::log1p(-ratio * ratio));
}

SecondLayerResult second_layer(std::span<const Correspondence> set, std::span<const std::size_t> cands,
                               std::size_t anchor, const NoiseModel& noise, const CompatibilityThresholds& thr,
                               TerminationState& term, Rng& rng, ModelStore& store, kernels::Exec exec) {
    SecondLayerResult out;
    store.clear();
    term.best_size_2 = 0;
    term.samp_2 = 0;
    if (cands.size() < std::max<std::size_t>(term.i_min, 2)) {
        return out;
    }
    term.max_itr_2 = update_max_itr_2(term.i_min, cands.size());

    const Correspondence& n = set[anchor];
    while (term.samp_2 <= term.max_itr_2) {
        const auto [ia, ib] = rng.distinct_pair(cands.size());
        ++term.samp_2;
        const Correspondence& a = set[cands[ia]];
        const Correspondence& b = set[cands[ib]];
        if (!rigidity_ok(a, b, noise.xi)) {
            continue;
        }
        const auto model = try_solve_minimal_triad(n, a, b);
        if (!model) {
            continue;
        }
        store.push(*model);
        const std::size_t newest = store.size() - 1;
        const ModelVector fresh = store.vector(newest);
        const std::span<const double> first = store.column(0);
        out.compat_checks += newest;
        for (std::size_t z = 0; z < newest; ++z) {
            // First stair inline; the remaining eleven only for survivors.
            if (std::abs(first[z] - fresh[0]) > thr.theta_r || !staircase(store, z, fresh, thr).compatible) {
                continue;
            }
            RigidTransform averaged;
            try {
                averaged = {average_rotation(store.model(z).rot, model->rot),
                            average_translation(store.model(z).tra, model->tra)};
            } catch (const DegenerateAverage&) {
                continue;
            }
            ++out.consensus_builds;
            auto support = kernels::consensus_subset(exec, set, cands, averaged, noise.consensus_threshold);
            if (support.size() >= term.best_size_2) {
                term.best_size_2 = support.size();
                out.best = std::move(support);
                term.max_itr_2 = update_max_itr_2(std::max(term.i_min, term.best_size_2), cands.size());
            }
        }
    }
    out.samples = term.samp_2;
    out.models = store.size();
    return out;
}

SolverResult solve_daniel(std::span<const Correspondence> set, const DanielOptions& options, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    if (set.size() < 3) {
        throw DegenerateSet("at least 3 correspondences are required");
    }
    const NoiseModel& noise = options.noise;
    noise.validate();
    const double d_tilde = options.d_tilde.value_or(mean_axis_diameter(set));
    if (!(d_tilde > 0.0)) {
        throw DegenerateSet("source points have zero extent");
    }
    const CompatibilityThresholds thr = CompatibilityThresholds::make(noise, options.mu, d_tilde);
    const kernels::Exec exec = options.exec;
    const std::size_t n_total = set.size();

    TerminationState term;
    term.i_min = min_inliers(n_total);
    term.max_itr_1 = kInitialMaxItr1;

    SolverResult result;
    ModelStore store;
    std::vector<std::size_t> best_support;  // N_best, positions

    while (term.samp_1 <= term.max_itr_1) {
        Rng rng(child_seed(seed, term.samp_1));
        const std::size_t anchor = rng.index(n_total);
        ++term.samp_1;

        const auto cands = kernels::rigidity_candidates(exec, set, anchor, noise.xi);
        if (cands.size() < term.i_min) {
            continue;
        }
        SecondLayerResult layer2 = second_layer(set, cands, anchor, noise, thr, term, rng, store, exec);
        result.total_layer2_samples += layer2.samples;
        result.compat_checks += layer2.compat_checks;
        result.consensus_builds += layer2.consensus_builds;

        if (term.best_size_2 < term.best_size_1 || layer2.best.size() < 3) {
            continue;
        }
        RigidTransform refit;
        try {
            refit = solve_svd(set, layer2.best);
        } catch (const DegenerateSet&) {
            continue;
        }
        ++result.consensus_builds;
        auto support = kernels::consensus(exec, set, refit, noise.consensus_threshold);
        // Keep the larger of the old and new full-set consensus.
        if (support.size() < 3 || support.size() < term.best_size_1) {
            continue;
        }
        term.best_size_1 = support.size();
        best_support = std::move(support);
        term.max_itr_1 = update_max_itr_1(std::max(term.i_min, term.best_size_1), n_total);
    }
    result.iterations_layer1 = term.samp_1;

    if (term.best_size_1 == 0) {
        throw NoConsensusFound("no model reached the minimum inlier support");
    }

    // Final refinement: fit on N_best, rebuild consensus, fit again.
    RigidTransform fit = solve_svd(set, best_support);
    std::vector<std::size_t> star = kernels::consensus(exec, set, fit, noise.consensus_threshold);
    if (star.size() >= 3) {
        try {
            fit = solve_svd(set, star);
        } catch (const DegenerateSet&) {
        }
    }
    std::erase_if(star, [&](std::size_t p) { return residual(set[p], fit) > noise.consensus_threshold; });
    if (star.empty()) {
        throw NoConsensusFound("final refinement left no supporting correspondences");
    }

    result.transform = fit;
    result.inliers.reserve(star.size());
    for (std::size_t p : star) {
        result.inliers.push_back(set[p].index);
    }
    result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace dreg

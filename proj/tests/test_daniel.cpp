#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dreg/daniel.hpp"
#include "dreg/errors.hpp"
#include "dreg/synthetic.hpp"
#include "support.hpp"

using namespace dreg;

namespace {

// Independent evaluation of the iteration formulas in long double. Values that
// are integers in exact arithmetic (ratio 0.9 gives exactly 2) are snapped first.
long double snap_ceil(long double x) { return std::ceil(x - 1e-12L); }
long double itr1_oracle(long double ratio) { return snap_ceil(std::log(0.01L) / std::log(1.0L - ratio)); }
long double itr2_oracle(long double ratio) {
    return snap_ceil(2.0L * std::log(0.005L) / std::log(1.0L - ratio * ratio));
}

CompatibilityThresholds default_thresholds(double d_tilde = 1.0) {
    return CompatibilityThresholds::make(NoiseModel::from_sigma(0.01), 1.2, d_tilde);
}

std::size_t truth_hits(const SolverResult& r, const SyntheticProblem& p) {
    std::size_t hits = 0;
    for (std::size_t i : r.inliers) {
        hits += p.truth.inlier_mask[i] ? 1 : 0;
    }
    return hits;
}

}  // namespace

TEST_CASE("noise model defaults") {
    const NoiseModel m = NoiseModel::from_sigma(0.01);
    CHECK(m.xi == doctest::Approx(0.06));
    CHECK(m.xi_t == doctest::Approx(0.05));
    CHECK(m.consensus_threshold == doctest::Approx(0.05));
    CHECK(NoiseModel::from_sigma(0.01, 5.0).xi == doctest::Approx(0.05));
    CHECK_THROWS_AS(NoiseModel::from_sigma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseModel::from_sigma(-1.0), std::invalid_argument);
}

TEST_CASE("compatibility thresholds") {
    const auto t = default_thresholds(1.0);
    CHECK(t.theta_t == doctest::Approx(2.0 * 1.2 / std::sqrt(3.0) * 0.05).epsilon(1e-14));
    CHECK(t.s_scale == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(t.theta_r == doctest::Approx(1.2 * 2.0 * std::sqrt(2.0) * std::sin(0.1) / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(CompatibilityThresholds::make(NoiseModel{}, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CompatibilityThresholds::make(NoiseModel{}, 1.2, 0.0), std::invalid_argument);
}

TEST_CASE("mean axis diameter") {
    CorrespondenceSet set{{0, Vec3(0, 0, 0), Vec3::Zero()}, {1, Vec3(1, 2, 3), Vec3::Zero()},
                          {2, Vec3(-1, 0, 0), Vec3::Zero()}};
    CHECK(mean_axis_diameter(set) == doctest::Approx((2.0 + 2.0 + 3.0) / 3.0));
}

TEST_CASE("model vector round trip") {
    Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform tf = testing::random_transform(rng);
        const RigidTransform back = from_model_vector(to_model_vector(tf));
        CHECK(back.rot.matrix() == tf.rot.matrix());
        CHECK(back.tra == tf.tra);
    }
    ModelStore store;
    const RigidTransform tf = testing::random_transform(rng);
    store.push(tf);
    CHECK(store.vector(0) == to_model_vector(tf));
    CHECK(store.model(0).tra == tf.tra);
    store.clear();
    CHECK(store.empty());
}

TEST_CASE("rigidity_ok") {
    Rng rng(42);
    const RigidTransform tf = testing::random_transform(rng);
    const auto a = testing::make_pair(0, tf, testing::random_point(rng));
    const auto b = testing::make_pair(1, tf, testing::random_point(rng));
    CHECK(rigidity_ok(a, b, 1e-9));
    CHECK(rigidity_ok(a, a, 1e-9));

    const Correspondence p{0, Vec3(0, 0, 0), Vec3(0, 0, 0)};
    const Correspondence q{1, Vec3(1, 0, 0), Vec3(1.5, 0, 0)};
    CHECK_FALSE(rigidity_ok(p, q, 0.05));
    // Inclusive at exactly 2 xi.
    const Correspondence r{1, Vec3(1, 0, 0), Vec3(1.5, 0, 0)};
    CHECK(rigidity_ok(p, r, 0.25));
}

TEST_CASE("rigidity soundness for bounded noise") {
    Rng rng(43);
    const double xi = 0.06;
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const RigidTransform tf = testing::random_transform(rng);
        const auto a = testing::make_pair(0, tf, testing::random_point(rng),
                                          testing::random_unit(rng) * rng.uniform(0.0, xi));
        const auto b = testing::make_pair(1, tf, testing::random_point(rng),
                                          testing::random_unit(rng) * rng.uniform(0.0, xi));
        failures += rigidity_ok(a, b, xi) ? 0 : 1;
    }
    CHECK(failures == 0);
}

TEST_CASE("first_layer_candidates") {
    Rng rng(44);
    const RigidTransform tf = testing::random_transform(rng);
    const auto clean = testing::inlier_set(rng, tf, 20);
    const auto all = first_layer_candidates(clean, 5, 0.06);
    CHECK(all.size() == 19);
    CHECK(std::find(all.begin(), all.end(), 5u) == all.end());
    CHECK_THROWS_AS(first_layer_candidates(clean, 20, 0.06), std::out_of_range);

    // Only the anchor and position 3 are inliers; every outlier breaks rigidity
    // with the anchor by construction.
    CorrespondenceSet mixed{testing::make_pair(0, tf, testing::random_point(rng))};
    for (std::size_t i = 1; i < 12; ++i) {
        const Vec3 x = testing::random_point(rng);
        Vec3 y = tf.apply(x);
        if (i != 3) {
            // Push the target 1 m further from the anchor's target.
            y += (y - mixed[0].y).normalized();
        }
        mixed.push_back({i, x, y});
    }
    std::vector<std::size_t> brute;
    for (std::size_t i = 1; i < mixed.size(); ++i) {
        const double dy = (mixed[i].y - mixed[0].y).norm();
        const double dx = (mixed[i].x - mixed[0].x).norm();
        if (std::abs(dy - dx) <= 0.12) {
            brute.push_back(i);
        }
    }
    CHECK(brute == std::vector<std::size_t>{3});
    CHECK(first_layer_candidates(mixed, 0, 0.06) == brute);
}

TEST_CASE("far outlier anchors fail the minimum inlier gate") {
    // Anchors whose target is displaced well beyond the cloud: every pair
    // length changes by far more than 2 xi.
    std::size_t below = 0;
    std::size_t anchors = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        SyntheticSpec spec;
        spec.outlier_ratio = 0.99;
        spec.seed = 4400 + s;
        auto p = generate_problem(spec);
        auto& set = p.correspondences;
        Rng rng(s);
        for (int k = 0; k < 10; ++k) {
            const std::size_t i = rng.index(set.size());
            const Vec3 saved = set[i].y;
            set[i].y = p.truth.transform.apply(set[i].x) + testing::random_unit(rng) * rng.uniform(3.0, 6.0);
            ++anchors;
            below += first_layer_candidates(set, i, 0.06).size() < min_inliers(set.size()) ? 1 : 0;
            set[i].y = saved;
        }
    }
    CHECK(double(below) / double(anchors) >= 0.9);
}

TEST_CASE("outliers inside the sphere keep large candidate sets") {
    // Generator outliers share the scale of the cloud, so their candidate sets
    // stay above the gate; the second layer is what rejects them.
    SyntheticSpec spec;
    spec.outlier_ratio = 0.99;
    spec.seed = 4420;
    const auto p = generate_problem(spec);
    std::size_t above = 0;
    std::size_t outliers = 0;
    for (std::size_t i = 0; i < p.correspondences.size(); i += 10) {
        if (p.truth.inlier_mask[i]) {
            continue;
        }
        ++outliers;
        above += first_layer_candidates(p.correspondences, i, 0.06).size() >= 10 ? 1 : 0;
    }
    CHECK(above > outliers / 2);
}

TEST_CASE("staircase: identical models and the short-circuit counter") {
    const auto thr = default_thresholds();
    Rng rng(45);
    const RigidTransform a = testing::random_transform(rng);
    CHECK(compatibility_staircase(a, a, thr));
    CHECK(staircase(to_model_vector(a), to_model_vector(a), thr).comparisons == 12);

    RigidTransform b = a;
    b.tra.x() += 2.0 * thr.theta_t;
    const auto out = staircase(to_model_vector(a), to_model_vector(b), thr);
    CHECK_FALSE(out.compatible);
    CHECK(out.comparisons == 10);

    // Comparisons equal the index of the first failing element.
    for (int k = 0; k < 12; ++k) {
        ModelVector va = to_model_vector(a);
        ModelVector vb = va;
        vb[std::size_t(k)] += 3.0 * std::max(thr.theta_r, thr.theta_t);
        const auto o = staircase(va, vb, thr);
        CHECK_FALSE(o.compatible);
        CHECK(o.comparisons == k + 1);
    }

    // The column-store overload agrees with the vector form.
    ModelStore store;
    store.push(a);
    store.push(b);
    CHECK(staircase(store, 1, to_model_vector(a), thr).comparisons == 10);
    CHECK(staircase(store, 0, to_model_vector(a), thr).compatible);
}

TEST_CASE("staircase: exact models from disjoint triples are compatible") {
    const auto thr = default_thresholds();
    Rng rng(46);
    for (int i = 0; i < 1000; ++i) {
        const RigidTransform tf = testing::random_transform(rng);
        const auto set = testing::inlier_set(rng, tf, 6);
        const auto m1 = solve_minimal_triad(set[0], set[1], set[2]);
        const auto m2 = solve_minimal_triad(set[3], set[4], set[5]);
        CHECK(compatibility_staircase(m1, m2, thr));
    }
}

TEST_CASE("staircase: element-wise pass implies holistic bounds") {
    const auto thr = default_thresholds();
    const double mu = thr.mu;
    Rng rng(47);
    int passing = 0;
    for (int i = 0; i < 20000; ++i) {
        const RigidTransform a = testing::random_transform(rng);
        const RigidTransform b{a.rot * exp_map(testing::random_unit(rng) * rng.uniform(0.0, 0.15)),
                               a.tra + testing::random_unit(rng) * rng.uniform(0.0, 0.15)};
        if (!compatibility_staircase(a, b, thr)) {
            continue;
        }
        ++passing;
        CHECK((a.tra - b.tra).norm() <= 2.0 * mu * 0.05 + 1e-12);
        CHECK(chordal_distance(a.rot, b.rot) <= mu * 2.0 * std::sqrt(2.0) * std::sin(thr.s_scale) + 1e-12);
    }
    CHECK(passing > 100);
}

TEST_CASE("minimum inliers") {
    CHECK(min_inliers(10) == 5);
    CHECK(min_inliers(500) == 5);
    CHECK(min_inliers(1000) == 10);
    CHECK(min_inliers(1001) == 11);
}

TEST_CASE("update_max_itr_1") {
    CHECK(update_max_itr_1(10, 1000) == 459);
    CHECK(update_max_itr_1(100, 1000) == 44);
    CHECK(update_max_itr_1(1000, 1000) == 1);
    // log(0.01) / log(0.1) = 2 and log(0.01) / log(0.01) = 1 exactly.
    CHECK(update_max_itr_1(900, 1000) == 2);
    CHECK(update_max_itr_1(990, 1000) == 1);
    CHECK_THROWS_AS(update_max_itr_1(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(update_max_itr_1(11, 10), std::invalid_argument);
    std::size_t prev = update_max_itr_1(1, 1000);
    for (std::size_t b = 1; b < 1000; ++b) {
        const std::size_t v = update_max_itr_1(b, 1000);
        CHECK(static_cast<long double>(v) == itr1_oracle(static_cast<long double>(b) / 1000.0L));
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("update_max_itr_2") {
    CHECK(update_max_itr_2(10, 100) == 1055);
    CHECK(update_max_itr_2(50, 100) == 37);
    CHECK(update_max_itr_2(100, 100) == 2);
    CHECK_THROWS_AS(update_max_itr_2(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(update_max_itr_2(11, 10), std::invalid_argument);
    for (std::size_t e = 1; e < 300; ++e) {
        CHECK(static_cast<long double>(update_max_itr_2(e, 300)) ==
              itr2_oracle(static_cast<long double>(e) / 300.0L));
    }
}

TEST_CASE("second layer on an exact inlier candidate set") {
    Rng rng(48);
    const RigidTransform tf = testing::random_transform(rng);
    const auto set = testing::inlier_set(rng, tf, 40);
    const NoiseModel noise = NoiseModel::from_sigma(0.01);
    const auto thr = CompatibilityThresholds::make(noise, 1.2, mean_axis_diameter(set));
    std::vector<std::size_t> cands(39);
    for (std::size_t i = 0; i < 39; ++i) {
        cands[i] = i + 1;
    }
    TerminationState term;
    term.i_min = 5;
    ModelStore store;
    Rng layer_rng(1);
    const auto out = second_layer(set, cands, 0, noise, thr, term, layer_rng, store);
    CHECK(out.best == cands);
    CHECK(out.models >= 2);
    CHECK(out.samples == term.samp_2);
    CHECK(term.best_size_2 == 39);
}

TEST_CASE("second layer without rigid inlier pairs returns nothing") {
    // Candidates are pairwise far from rigid: every pair breaks the length test.
    CorrespondenceSet set;
    set.push_back({0, Vec3::Zero(), Vec3::Zero()});
    for (std::size_t i = 1; i <= 12; ++i) {
        const double s = double(i);
        set.push_back({i, Vec3(s, 0, 0), Vec3(s * s * 3.0, 0, 0)});
    }
    std::vector<std::size_t> cands;
    for (std::size_t i = 1; i <= 12; ++i) {
        cands.push_back(i);
    }
    const NoiseModel noise = NoiseModel::from_sigma(0.01);
    const auto thr = CompatibilityThresholds::make(noise, 1.2, 1.0);
    TerminationState term;
    term.i_min = 5;
    ModelStore store;
    Rng rng(2);
    const auto out = second_layer(set, cands, 0, noise, thr, term, rng, store);
    CHECK(out.best.empty());
    CHECK(out.models == 0);
    CHECK(out.samples == update_max_itr_2(5, 12) + 1);
}

TEST_CASE("second layer recovers the inliers from an inlier anchor at 90% outliers") {
    const NoiseModel noise = NoiseModel::from_sigma(0.01);
    int good = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        SyntheticSpec spec;
        spec.outlier_ratio = 0.9;
        spec.seed = 4800 + s;
        const auto p = generate_problem(spec);
        const auto& set = p.correspondences;
        std::vector<std::size_t> truth;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (p.truth.inlier_mask[i]) {
                truth.push_back(i);
            }
        }
        Rng rng(child_seed(s, 7));
        const std::size_t anchor = truth[rng.index(truth.size())];
        const auto cands = first_layer_candidates(set, anchor, noise.xi);
        const auto thr = CompatibilityThresholds::make(noise, 1.2, mean_axis_diameter(set));
        TerminationState term;
        term.i_min = min_inliers(set.size());
        ModelStore store;
        const auto out = second_layer(set, cands, anchor, noise, thr, term, rng, store);
        const std::set<std::size_t> got(out.best.begin(), out.best.end());
        std::size_t covered = 0;
        for (std::size_t t : truth) {
            covered += got.count(t);
        }
        // The anchor is never its own candidate.
        good += double(covered) >= 0.95 * double(truth.size() - 1) ? 1 : 0;
    }
    CHECK(good >= 95);
}

TEST_CASE("solve: noise-free problem is recovered exactly") {
    Rng rng(49);
    const RigidTransform tf = testing::random_transform(rng);
    const auto set = testing::inlier_set(rng, tf, 200);
    const auto r = solve_daniel(set, NoiseModel::from_sigma(0.01), 3);
    CHECK(testing::precise_angle(r.transform.rot, tf.rot) < 1e-9);
    CHECK((r.transform.tra - tf.tra).norm() < 1e-9);
    CHECK(r.inliers.size() == 200);
    CHECK(std::is_sorted(r.inliers.begin(), r.inliers.end()));
}

TEST_CASE("solve: inputs below three correspondences") {
    CorrespondenceSet two(2);
    CHECK_THROWS_AS(solve_daniel(two, NoiseModel::from_sigma(0.01), 0), DegenerateSet);
}

TEST_CASE("solve: pure outliers give no consensus") {
    Rng rng(50);
    CorrespondenceSet set;
    for (std::size_t i = 0; i < 300; ++i) {
        set.push_back({i, testing::random_point(rng), testing::random_point(rng, 5.0)});
    }
    CHECK_THROWS_AS(solve_daniel(set, NoiseModel::from_sigma(0.001), 0), NoConsensusFound);
}

TEST_CASE("solve: 99% outliers, two seeds agree") {
    SyntheticSpec spec;
    spec.outlier_ratio = 0.99;
    spec.seed = 51;
    const auto p = generate_problem(spec);
    REQUIRE(p.truth.inlier_count() == 10);
    const NoiseModel noise = NoiseModel::from_sigma(0.01);
    const auto r1 = solve_daniel(p.correspondences, noise, 1);
    const auto r2 = solve_daniel(p.correspondences, noise, 2);
    for (const auto* r : {&r1, &r2}) {
        CHECK(rotation_error_deg(p.truth.transform.rot, r->transform.rot) < 2.0);
        CHECK(translation_error(p.truth.transform.tra, r->transform.tra) < 0.05);
        CHECK(truth_hits(*r, p) >= 9);
        // Every returned inlier satisfies the consensus threshold.
        for (std::size_t i : r->inliers) {
            CHECK(residual(p.correspondences[i], r->transform) <= noise.consensus_threshold);
        }
    }
}

TEST_CASE("solve: deterministic and identical across execution modes") {
    SyntheticSpec spec;
    spec.outlier_ratio = 0.8;
    spec.seed = 52;
    const auto p = generate_problem(spec);
    DanielOptions serial;
    serial.noise = NoiseModel::from_sigma(0.01);
    DanielOptions parallel = serial;
    parallel.exec = kernels::Exec::OpenMP;
    const auto a = solve_daniel(p.correspondences, serial, 9);
    const auto b = solve_daniel(p.correspondences, serial, 9);
    const auto c = solve_daniel(p.correspondences, parallel, 9);
    CHECK(a.same_outcome(b));
    CHECK(a.same_outcome(c));
    CHECK(a.iterations_layer1 >= 1);
    CHECK(a.total_layer2_samples > 0);
    CHECK(a.consensus_builds > 0);
}

#include "dreg/campaign.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <omp.h>

#include <json.hpp>

#include "dreg/daniel.hpp"
#include "dreg/errors.hpp"
#include "dreg/io.hpp"
#include "dreg/ransac.hpp"
#include "dreg/synthetic.hpp"

namespace dreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Job {
    std::size_t ratio_index;
    std::size_t trial;
};

TrialRecord run_solver(SolverKind kind, const SyntheticProblem& problem, double ratio, std::size_t trial,
                       std::uint64_t seed, const CampaignConfig& cfg) {
    TrialRecord rec;
    rec.solver = kind;
    rec.ratio = ratio;
    rec.trial = trial;
    rec.e_rot_deg = kNaN;
    rec.e_tran_m = kNaN;
    rec.precision = kNaN;
    rec.recall = kNaN;

    const auto& set = problem.correspondences;
    const NoiseModel noise = NoiseModel::from_sigma(cfg.sigma, cfg.xi_factor);
    SolverResult res;
    try {
        if (kind == SolverKind::Daniel) {
            DanielOptions options;
            options.noise = noise;
            options.mu = cfg.mu;
            res = solve_daniel(set, options, seed);
        } else {
            RansacConfig rc;
            rc.inlier_threshold = noise.xi;
            rc.max_iterations_cap = cfg.ransac_cap;
            res = solve_ransac(set, rc, seed);
        }
    } catch (const NoConsensusFound&) {
        rec.status = TrialStatus::NoConsensus;
        return rec;
    } catch (const std::exception&) {
        rec.status = TrialStatus::Error;
        return rec;
    }

    const GroundTruth& gt = problem.truth;
    rec.e_rot_deg = rotation_error_deg(gt.transform.rot, res.transform.rot);
    rec.e_tran_m = translation_error(gt.transform.tra, res.transform.tra);
    rec.runtime_s = res.elapsed;
    rec.iters_l1 = res.iterations_layer1;
    rec.samples_l2 = res.total_layer2_samples;
    std::size_t hits = 0;
    for (std::size_t idx : res.inliers) {
        hits += gt.inlier_mask[idx] ? 1 : 0;
    }
    rec.precision = res.inliers.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(res.inliers.size());
    rec.recall = static_cast<double>(hits) / static_cast<double>(gt.inlier_count());
    return rec;
}

void run_job(const Job& job, std::span<const double> ratios, std::span<const SolverKind> solvers,
             std::uint64_t base_seed, const CampaignConfig& cfg, std::span<TrialRecord> out) {
    const double ratio = ratios[job.ratio_index];
    const std::uint64_t seed = trial_seed(base_seed, ratio, job.trial);
    SyntheticSpec spec;
    spec.n = cfg.n;
    spec.sigma = cfg.sigma;
    spec.outlier_ratio = ratio;
    spec.seed = seed;
    const SyntheticProblem problem = generate_problem(spec, cfg.cloud);
    const std::uint64_t solver_seed = child_seed(seed, 1);
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        out[s] = run_solver(solvers[s], problem, ratio, job.trial, solver_seed, cfg);
    }
}

}  // namespace

std::string_view to_string(SolverKind kind) { return kind == SolverKind::Daniel ? "daniel" : "ransac"; }

SolverKind parse_solver_kind(std::string_view name) {
    if (name == "daniel") {
        return SolverKind::Daniel;
    }
    if (name == "ransac") {
        return SolverKind::Ransac;
    }
    throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(TrialStatus status) {
    switch (status) {
        case TrialStatus::Ok:
            return "ok";
        case TrialStatus::NoConsensus:
            return "no_consensus";
        case TrialStatus::Error:
            return "error";
    }
    return "error";
}

bool trial_succeeded(const TrialRecord& r, double max_rot_deg, double max_tran_m) {
    return r.status == TrialStatus::Ok && r.e_rot_deg < max_rot_deg && r.e_tran_m < max_tran_m;
}

std::uint64_t trial_seed(std::uint64_t base_seed, double ratio, std::size_t trial) {
    return child_seed(base_seed, std::bit_cast<std::uint64_t>(ratio), trial);
}

std::vector<TrialRecord> run_campaign(std::span<const double> ratios, std::size_t trials,
                                      std::span<const SolverKind> solvers, std::uint64_t base_seed,
                                      const CampaignConfig& config) {
    if (trials < 1) {
        throw std::invalid_argument("at least one trial is required");
    }
    if (solvers.empty()) {
        throw std::invalid_argument("at least one solver is required");
    }
    std::vector<Job> jobs;
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        for (std::size_t t = 0; t < trials; ++t) {
            jobs.push_back({r, t});
        }
    }
    std::vector<TrialRecord> records(jobs.size() * solvers.size());
    const std::span<TrialRecord> all(records);

    if (config.threads == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            run_job(jobs[j], ratios, solvers, base_seed, config, all.subspan(j * solvers.size(), solvers.size()));
        }
        return records;
    }

    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(jobs.size());
    // Problem generation can throw SpecInvalid; rethrow the first one after the region.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t j = 0; j < count; ++j) {
        const auto u = static_cast<std::size_t>(j);
        try {
            run_job(jobs[u], ratios, solvers, base_seed, config, all.subspan(u * solvers.size(), solvers.size()));
        } catch (...) {
#pragma omp critical(dreg_campaign_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return records;
}

double median(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    if (values.empty()) {
        return kNaN;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<RatioSummary> summarize(std::span<const TrialRecord> records) {
    std::vector<RatioSummary> out;
    std::vector<std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const RatioSummary& s) { return s.solver == r.solver && s.ratio == r.ratio; });
        if (it == out.end()) {
            out.push_back({r.solver, r.ratio});
            groups.emplace_back();
            it = out.end() - 1;
        }
        groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        std::vector<double> rot;
        std::vector<double> tran;
        std::vector<double> time;
        for (const TrialRecord* r : groups[g]) {
            rot.push_back(r->e_rot_deg);
            tran.push_back(r->e_tran_m);
            time.push_back(r->runtime_s);
            out[g].failures += trial_succeeded(*r) ? 0 : 1;
        }
        out[g].trials = groups[g].size();
        out[g].median_e_rot_deg = median(std::move(rot));
        out[g].median_e_tran_m = median(std::move(tran));
        out[g].median_runtime_s = median(std::move(time));
    }
    return out;
}

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << kTrialCsvHeader << '\n';
    for (const auto& r : records) {
        os << to_string(r.solver) << ',' << format_double(r.ratio) << ',' << r.trial << ','
           << format_double(r.e_rot_deg) << ',' << format_double(r.e_tran_m) << ',' << format_double(r.runtime_s)
           << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ',' << r.iters_l1 << ','
           << r.samples_l2 << ',' << to_string(r.status) << '\n';
    }
}

void write_trials_json(std::ostream& os, std::span<const TrialRecord> records) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) {
            return v;
        }
        return nullptr;
    };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"schema", kTrialJsonSchema},
                       {"solver", to_string(r.solver)},
                       {"ratio", r.ratio},
                       {"trial", r.trial},
                       {"e_rot_deg", num(r.e_rot_deg)},
                       {"e_tran_m", num(r.e_tran_m)},
                       {"runtime_s", r.runtime_s},
                       {"precision", num(r.precision)},
                       {"recall", num(r.recall)},
                       {"iters_l1", r.iters_l1},
                       {"samples_l2", r.samples_l2},
                       {"status", to_string(r.status)}});
    }
    os << arr.dump(2) << '\n';
}

}  // namespace dreg

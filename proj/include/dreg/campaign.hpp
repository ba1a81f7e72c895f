#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dreg/geom.hpp"

namespace dreg {

enum class SolverKind { Daniel, Ransac };

std::string_view to_string(SolverKind kind);
/// Accepts "daniel" and "ransac"; throws std::invalid_argument otherwise.
SolverKind parse_solver_kind(std::string_view name);

enum class TrialStatus { Ok, NoConsensus, Error };

std::string_view to_string(TrialStatus status);

struct TrialRecord {
    SolverKind solver = SolverKind::Daniel;
    double ratio = 0.0;
    std::size_t trial = 0;
    double e_rot_deg = 0.0;   // NaN unless status == Ok
    double e_tran_m = 0.0;    // NaN unless status == Ok
    double runtime_s = 0.0;
    double precision = 0.0;   // estimated inliers that are true inliers
    double recall = 0.0;      // true inliers that were recovered
    std::size_t iters_l1 = 0;
    std::size_t samples_l2 = 0;
    TrialStatus status = TrialStatus::Ok;
};

/// Registration thresholds used to call a trial a success.
inline constexpr double kSuccessRotDeg = 2.0;
inline constexpr double kSuccessTranM = 0.05;

bool trial_succeeded(const TrialRecord& r, double max_rot_deg = kSuccessRotDeg, double max_tran_m = kSuccessTranM);

struct CampaignConfig {
    std::size_t n = 1000;
    double sigma = 0.01;
    double xi_factor = 6.0;
    double mu = 1.2;
    std::optional<std::size_t> ransac_cap = 10000;
    /// Optional source cloud; uniform box points when empty.
    std::vector<Vec3> cloud;
    /// 0 lets OpenMP choose; 1 runs the serial reference loop.
    int threads = 0;
};

/// Problem seed of trial `trial` at outlier ratio `ratio`.
std::uint64_t trial_seed(std::uint64_t base_seed, double ratio, std::size_t trial);

/**
 * Runs every solver on the identical problem for each (ratio, trial).
 * Records are ordered by ratio, then trial, then solver, regardless of the
 * thread count. Solver errors are captured in the record status.
 */
std::vector<TrialRecord> run_campaign(std::span<const double> ratios, std::size_t trials,
                                      std::span<const SolverKind> solvers, std::uint64_t base_seed,
                                      const CampaignConfig& config = {});

struct RatioSummary {
    SolverKind solver = SolverKind::Daniel;
    double ratio = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;  // not Ok, or outside the success thresholds
    double median_e_rot_deg = 0.0;
    double median_e_tran_m = 0.0;
    double median_runtime_s = 0.0;
};

/// One summary per (solver, ratio), in first-appearance order.
std::vector<RatioSummary> summarize(std::span<const TrialRecord> records);

/// Median of the finite values; NaN when there are none.
double median(std::vector<double> values);

inline constexpr std::string_view kTrialCsvHeader =
    "solver,ratio,trial,e_rot_deg,e_tran_m,runtime_s,precision,recall,iters_l1,samples_l2,status";
inline constexpr std::string_view kTrialJsonSchema = "daniel-trial/1";

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records);
void write_trials_json(std::ostream& os, std::span<const TrialRecord> records);

}  // namespace dreg

#include "dreg/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dreg/campaign.hpp"
#include "dreg/daniel.hpp"
#include "dreg/errors.hpp"
#include "dreg/io.hpp"
#include "dreg/ransac.hpp"
#include "dreg/synthetic.hpp"

namespace dreg::cli {

namespace {

struct RegisterArgs {
    std::string corr_path;
    double sigma = 0.0;
    double xi_factor = 6.0;
    double mu = 1.2;
    std::uint64_t seed = 0;
    std::string solver = "daniel";
    std::string out_path;
    std::size_t ransac_cap = 10000;
};

struct BenchArgs {
    std::vector<double> ratios{0.2, 0.5, 0.8, 0.9, 0.95, 0.99};
    std::size_t trials = 50;
    std::size_t n = 1000;
    double sigma = 0.01;
    std::vector<std::string> solvers{"daniel", "ransac"};
    std::uint64_t seed = 0;
    std::string csv_path = "bench.csv";
    std::string json_path;
    std::string cloud_path;
    int threads = 0;
    std::size_t ransac_cap = 10000;
};

struct GenerateArgs {
    std::size_t n = 1000;
    double ratio = 0.0;
    double sigma = 0.01;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string truth_path;
    std::string cloud_path;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot write '" + path + "'");
    }
    return os;
}

int cmd_register(const RegisterArgs& a, std::ostream& out) {
    const CorrespondenceSet set = read_correspondences(std::filesystem::path(a.corr_path));
    const NoiseModel noise = NoiseModel::from_sigma(a.sigma, a.xi_factor);
    const SolverKind kind = parse_solver_kind(a.solver);

    SolverResult res;
    if (kind == SolverKind::Daniel) {
        DanielOptions options;
        options.noise = noise;
        options.mu = a.mu;
        res = solve_daniel(set, options, a.seed);
    } else {
        RansacConfig cfg;
        cfg.inlier_threshold = noise.xi;
        cfg.max_iterations_cap = a.ransac_cap == 0 ? std::nullopt : std::optional<std::size_t>(a.ransac_cap);
        res = solve_ransac(set, cfg, a.seed);
    }

    if (!a.out_path.empty()) {
        auto os = open_output(a.out_path);
        os << result_to_json(res, to_string(kind)).dump(2) << '\n';
    }

    const Mat3& r = res.transform.rot.matrix();
    out << "solver: " << to_string(kind) << '\n'
        << "correspondences: " << set.size() << '\n'
        << "inliers: " << res.inliers.size() << '\n'
        << "rotation:\n";
    for (int i = 0; i < 3; ++i) {
        out << "  " << format_double(r(i, 0)) << ' ' << format_double(r(i, 1)) << ' ' << format_double(r(i, 2))
            << '\n';
    }
    const Vec3& t = res.transform.tra;
    out << "translation: " << format_double(t.x()) << ' ' << format_double(t.y()) << ' ' << format_double(t.z())
        << '\n'
        << "iterations: " << res.iterations_layer1 << " (layer-2 samples " << res.total_layer2_samples << ")\n"
        << "elapsed_s: " << res.elapsed << '\n';
    return kOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    std::vector<SolverKind> solvers;
    for (const auto& s : a.solvers) {
        solvers.push_back(parse_solver_kind(s));
    }
    CampaignConfig cfg;
    cfg.n = a.n;
    cfg.sigma = a.sigma;
    cfg.threads = a.threads;
    cfg.ransac_cap = a.ransac_cap == 0 ? std::nullopt : std::optional<std::size_t>(a.ransac_cap);
    if (!a.cloud_path.empty()) {
        cfg.cloud = parse_ply(std::filesystem::path(a.cloud_path));
    }

    const auto records = run_campaign(a.ratios, a.trials, solvers, a.seed, cfg);
    {
        auto os = open_output(a.csv_path);
        write_trials_csv(os, records);
    }
    std::string json_path = a.json_path;
    if (json_path.empty()) {
        json_path = std::filesystem::path(a.csv_path).replace_extension(".json").string();
    }
    {
        auto os = open_output(json_path);
        write_trials_json(os, records);
    }

    out << std::left << std::setw(8) << "solver" << std::setw(8) << "ratio" << std::setw(8) << "trials"
        << std::setw(10) << "failures" << std::setw(14) << "E_rot[deg]" << std::setw(14) << "E_tran[m]"
        << "runtime[s]\n";
    for (const auto& s : summarize(records)) {
        char line[160];
        std::snprintf(line, sizeof line, "%-8s%-8.2f%-8zu%-10zu%-14.4f%-14.5f%.5f\n",
                      std::string(to_string(s.solver)).c_str(), s.ratio, s.trials, s.failures, s.median_e_rot_deg,
                      s.median_e_tran_m, s.median_runtime_s);
        out << line;
    }
    out << "wrote " << records.size() << " records to " << a.csv_path << " and " << json_path << '\n';
    return kOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    SyntheticSpec spec;
    spec.n = a.n;
    spec.outlier_ratio = a.ratio;
    spec.sigma = a.sigma;
    spec.seed = a.seed;
    std::vector<Vec3> cloud;
    if (!a.cloud_path.empty()) {
        cloud = parse_ply(std::filesystem::path(a.cloud_path));
    }
    const SyntheticProblem problem = generate_problem(spec, cloud);
    {
        auto os = open_output(a.out_path);
        write_correspondences(os, problem.correspondences);
    }
    if (!a.truth_path.empty()) {
        SolverResult truth;
        truth.transform = problem.truth.transform;
        for (std::size_t i = 0; i < problem.truth.inlier_mask.size(); ++i) {
            if (problem.truth.inlier_mask[i]) {
                truth.inliers.push_back(i);
            }
        }
        auto os = open_output(a.truth_path);
        os << result_to_json(truth, "ground_truth").dump(2) << '\n';
    }
    out << "wrote " << problem.correspondences.size() << " correspondences (" << problem.truth.inlier_count()
        << " inliers) to " << a.out_path << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust correspondence-based rigid registration"};
    app.require_subcommand(1);

    RegisterArgs reg;
    auto* sub_reg = app.add_subcommand("register", "Estimate the rigid transform of a correspondence file");
    sub_reg->add_option("correspondences", reg.corr_path, "Rows of x1 x2 x3 y1 y2 y3")->required();
    sub_reg->add_option("--sigma", reg.sigma, "Noise standard deviation (m)")->required()->check(CLI::PositiveNumber);
    sub_reg->add_option("--xi-factor", reg.xi_factor, "Inlier threshold in units of sigma")->capture_default_str();
    sub_reg->add_option("--mu", reg.mu, "Compatibility slack factor (>= 1)")->capture_default_str();
    sub_reg->add_option("--seed", reg.seed, "Random seed")->capture_default_str();
    sub_reg->add_option("--solver", reg.solver, "daniel or ransac")
        ->check(CLI::IsMember({"daniel", "ransac"}))
        ->capture_default_str();
    sub_reg->add_option("--out", reg.out_path, "Write the result JSON here");
    sub_reg->add_option("--ransac-cap", reg.ransac_cap, "RANSAC iteration cap, 0 = unbounded")->capture_default_str();

    BenchArgs bench;
    auto* sub_bench = app.add_subcommand("bench", "Run a semi-synthetic Monte Carlo campaign");
    sub_bench->add_option("--ratios", bench.ratios, "Outlier ratios")->delimiter(',')->capture_default_str();
    sub_bench->add_option("--trials", bench.trials, "Trials per ratio")->check(CLI::PositiveNumber)->capture_default_str();
    sub_bench->add_option("--n", bench.n, "Correspondences per problem")->capture_default_str();
    sub_bench->add_option("--sigma", bench.sigma, "Noise standard deviation (m)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_bench->add_option("--solvers", bench.solvers, "Solvers to run")
        ->delimiter(',')
        ->check(CLI::IsMember({"daniel", "ransac"}))
        ->capture_default_str();
    sub_bench->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
    sub_bench->add_option("--csv", bench.csv_path, "CSV output path")->capture_default_str();
    sub_bench->add_option("--json", bench.json_path, "JSON output path (default: CSV path with .json)");
    sub_bench->add_option("--cloud", bench.cloud_path, "ASCII PLY source cloud");
    sub_bench->add_option("--threads", bench.threads, "Worker threads, 0 = OpenMP default")->capture_default_str();
    sub_bench->add_option("--ransac-cap", bench.ransac_cap, "RANSAC iteration cap, 0 = unbounded")
        ->capture_default_str();

    GenerateArgs gen;
    auto* sub_gen = app.add_subcommand("generate", "Write a synthetic correspondence file");
    sub_gen->add_option("--n", gen.n, "Correspondences")->capture_default_str();
    sub_gen->add_option("--ratio", gen.ratio, "Outlier ratio")->capture_default_str();
    sub_gen->add_option("--sigma", gen.sigma, "Noise standard deviation (m)")->capture_default_str();
    sub_gen->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    sub_gen->add_option("--out", gen.out_path, "Correspondence file")->required();
    sub_gen->add_option("--truth", gen.truth_path, "Ground-truth JSON");
    sub_gen->add_option("--cloud", gen.cloud_path, "ASCII PLY source cloud");

    if (!args.empty()) {
        app.name(std::filesystem::path(args.front()).filename().string());
    }
    // CLI11 consumes a reversed vector without the program name.
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) {
        rest.pop_back();
    }
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (sub_reg->parsed()) {
            return cmd_register(reg, out);
        }
        if (sub_bench->parsed()) {
            return cmd_bench(bench, out);
        }
        return cmd_generate(gen, out);
    } catch (const NoConsensusFound& e) {
        err << "error: " << e.what() << '\n';
        return kNoConsensus;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace dreg::cli

#pragma once

#include "edgelab/config.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace edgelab {

/// One CSV line: task,n,N,target,metric,value,se,verdict,seed_path.
/// NaN value/se are written as empty cells. `message` goes to JSON only.
struct ResultRow {
    std::string task;
    std::size_t n = 0;
    std::size_t N = 0;
    std::string target;
    std::string metric;
    double value = std::nan("");
    double se = std::nan("");
    std::string verdict;  // pass | fail | info | flag | error
    std::string seed_path;
    std::string message;
};

struct PricingRow {
    double K = 0.0;
    std::size_t n = 0;
    std::string mode;  // mc | gaussian | edgeworth-classical | edgeworth-literal
    double price = 0.0;
    double se = std::nan("");
    /// price minus the Gaussian closed form.
    double oracle_gap = 0.0;
};

struct SlopeRow {
    std::string target;
    std::string metric;
    double slope = 0.0;
    /// Spread of per-batch slopes divided by sqrt(batches).
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::vector<double> errors;  // full-sample error per n
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<PricingRow> pricing;
    std::vector<SlopeRow> slopes;
    std::size_t errors = 0;
    std::size_t assumption_failures = 0;
};

/// Runs every requested task for every n. Task failures become error rows;
/// nothing is written to disk.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Per target (gaussian, edgeworth-classical, surrogate) and metric
/// (kolmogorov, wasserstein1): least-squares slope of log error against log n,
/// with a normal-theory interval from contiguous replicate batches.
/// samples[i] holds the unsorted replicates for n_list[i].
std::vector<SlopeRow> convergence_from_samples(std::span<const std::vector<double>> samples,
                                               std::span<const std::size_t> n_list,
                                               std::size_t batches, std::size_t workers = 1);

/// Simulates the replicates for every n and calls convergence_from_samples.
/// ParameterError unless n_list has at least 3 entries.
std::vector<SlopeRow> convergence_study(const ExperimentConfig& cfg);

std::string format_number(double x);
std::string to_csv(std::span<const ResultRow> rows);
std::string pricing_to_csv(std::span<const PricingRow> rows);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                               int exit_code);

/// 0 success, 1 errors, 2 failed assumption checks (0 under warn_only).
int exit_code(const ExperimentConfig& cfg, const ExperimentResult& res);

/// Runs and writes the CSV, pricing CSV (when priced) and JSON report into
/// cfg.out_dir. Returns the exit code.
int run_and_write(const ExperimentConfig& cfg);

}  // namespace edgelab

#pragma once

#include "edgelab/edgeworth.hpp"
#include "edgelab/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edgelab {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Task { cumulants, edgeworth, wasserstein, dependence, assumptions, cf_scan,
                  be_characteristic, price };

std::string to_string(Task t);

struct CumulantsParams {
    /// Path length for the long-run variance diagnostic (0 disables it).
    std::size_t lrv_length = 1 << 16;
};

struct EdgeworthParams {
    std::vector<EdgeworthMode> modes{EdgeworthMode::classical};
    std::size_t refine = 8;
};

struct WassersteinParams {
    /// Sub-samples used for the slope confidence interval of the convergence study.
    std::size_t batches = 8;
};

struct DependenceParams {
    double p = 2.0;
    std::vector<std::size_t> lags;
    std::size_t N = 20000;
};

struct AssumptionsParams {
    double delta = 0.1;
    std::vector<double> xi{0.5, 1.0, 2.0, 3.14159265358979323846};
    std::size_t N_outer = 2000;
    std::size_t N_inner = 2000;
};

struct CfScanParams {
    double a = 1.0;
    double b = 5.0;
    std::size_t grid_size = 128;
};

struct BeCharacteristicParams {
    double a = 1.0;
    /// b runs over 2^j a, j = 0..max_doublings.
    std::size_t max_doublings = 6;
    std::size_t x_points = 129;
    /// Replicates used to tabulate the empirical characteristic function.
    std::size_t max_sample = 20000;
};

struct PriceParams {
    std::vector<double> K;
    std::size_t N = 100000;
    std::vector<EdgeworthMode> modes{EdgeworthMode::classical};
    std::optional<double> drift;
};

struct ExperimentConfig {
    ModelConfig model;
    std::vector<std::size_t> n_list;
    std::size_t N = 100000;
    std::uint64_t seed = 0;
    std::vector<Task> tasks;
    std::string out_dir = ".";
    std::string csv_name = "results.csv";
    std::string json_name = "report.json";
    std::string pricing_csv_name = "pricing.csv";
    std::size_t workers = 0;
    bool warn_only = false;
    /// Draws used to estimate E f(Y) when it is not analytically zero.
    std::size_t centering_N = 100000;

    CumulantsParams cumulants;
    EdgeworthParams edgeworth;
    WassersteinParams wasserstein;
    DependenceParams dependence;
    AssumptionsParams assumptions;
    CfScanParams cf_scan;
    BeCharacteristicParams be_characteristic;
    PriceParams price;

    bool has(Task t) const;
};

/// Throws ConfigError whose field() is a dotted path such as "price.K" or
/// "model.family.c[0].b".
ModelConfig model_from_json(const nlohmann::json& j, const std::string& path = "model");
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& file);

nlohmann::ordered_json model_to_json(const ModelConfig& cfg);

}  // namespace edgelab

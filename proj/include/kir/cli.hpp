#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kir/points.hpp"

namespace kir {

// Fully resolved run configuration. Every report embeds it, together with
// the seed, which is sufficient to reproduce the run bit-for-bit.
struct RunConfig {
    std::string subcommand;

    std::string input_path;  // exactly one of input_path / scenario
    std::string scenario;

    std::vector<std::string> x_cols;
    std::vector<std::string> y_cols;
    std::string y_kind = "real";  // real | so3
    bool standardize = false;

    std::string method = "knn";  // knn | rkhs | xi | eta-knn | eta-rkhs
    std::string kernel_x = "gaussian";
    std::string kernel_y = "gaussian";
    std::string bandwidth = "median";  // "median" or a float literal
    std::size_t k = 5;
    double epsilon = 1e-4;

    std::size_t permutations = 1000;
    std::size_t replications = 500;
    double alpha = 0.05;
    double lambda = 0.0;
    std::vector<double> lambda_grid;

    std::vector<std::size_t> n_values;  // scenario size; bench accepts a grid

    std::uint64_t seed = 0;
    std::string output_path;    // empty = stdout
    std::string format = "json";  // json | csv (power curves)
};

void validate_config(const RunConfig& config);

nlohmann::json run_estimate(const RunConfig& config);
nlohmann::json run_test(const RunConfig& config);
nlohmann::json run_power(const RunConfig& config);
nlohmann::json run_bench(const RunConfig& config);
nlohmann::json run_oracle(const RunConfig& config);

// Dispatches on config.subcommand.
nlohmann::json run(const RunConfig& config);

// Power curves as "lambda,statistic,power,se" rows for external plotting.
std::string power_report_csv(const nlohmann::json& report);

// Serialized report: JSON (default) or CSV where supported.
std::string render_report(const RunConfig& config, const nlohmann::json& report);

}  // namespace kir

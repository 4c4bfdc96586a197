#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "drmv/dro.hpp"
#include "drmv/riccati.hpp"
#include "drmv/tabular.hpp"

// vendored nlohmann/json ships as a single header without the fwd header
#include "json.hpp"

namespace drmv {

// Sweep configuration for the pendulum-style experiments. Matrices are
// nested numeric arrays; everything is plain JSON for inspectability.
struct ExperimentConfig {
    LqSystem system;
    std::vector<double> gamma_sweep;
    std::vector<Eigen::VectorXd> x0_list;
    std::uint64_t seed = 0;
    double riccati_tol = 1e-12;
    double bellman_tol = 1e-10;
    int max_iter = 100000;
    // rollout section (simulate command)
    int horizon = 2000;
    int num_samples = 1000;
    int num_trajectories = 10;
};

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& name);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

FiniteDistribution finite_distribution_from_json(const nlohmann::json& j);
DroInstance dro_instance_from_json(const nlohmann::json& j);
nlohmann::json worst_case_to_json(const WorstCaseResult& result);

LqSystem lq_system_from_json(const nlohmann::json& j);
nlohmann::json lq_system_to_json(const LqSystem& sys);

// Scalar-linear family: f(x,u,xi) = a x + b u + xi with cost q x^2 + r u^2.
TabularModel tabular_model_from_json(const nlohmann::json& j);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// 17 significant digits: parses back to the identical double.
std::string format_float(double v);

class CsvWriter {
  public:
    CsvWriter(std::string path, std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    void flush();

  private:
    std::string path_;
    std::string buffer_;
    std::size_t columns_;
};

}  // namespace drmv

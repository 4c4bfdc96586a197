#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drmv/riccati.hpp"

namespace drmv {

// Closed-loop simulation setup. Disturbances come from the system's Gaussian
// reference N(0, Sigma) unless finite_noise is set. Each trajectory runs on
// its own derived random stream, so reports are bit-identical for a fixed
// seed regardless of evaluation order.
struct RolloutConfig {
    LqSystem system;
    Eigen::MatrixXd gain;  // u = -gain * x
    Eigen::VectorXd x0;
    int horizon = 2000;
    int num_samples = 1000;  // fresh draws per step for the margin check
    int num_trajectories = 10;
    std::uint64_t seed = 0;
    std::optional<FiniteDistribution> finite_noise;

    void validate() const;
};

struct RolloutReport {
    std::vector<double> discounted_costs;  // one realized cost per trajectory
    double assumption_fraction = 0.0;      // share of (trajectory, step) checks with margin > 0
    double mean_cost = 0.0;
    double cost_stddev = 0.0;
    long checks_total = 0;
    long checks_satisfied = 0;
};

// Simulates the closed loop. At each step, draws num_samples fresh
// disturbances and counts the step as satisfied iff
//   min_k alpha V(f(x,u,xi_k)) - alpha mean_k V(f(x,u,xi_k)) + 2 gamma > 0,
// with the expectation replaced by the sample mean over the same draws.
// The transition then uses one further independent draw.
RolloutReport rollout(const RolloutConfig& config, const QuadraticValue& value);

struct BoundComparison {
    double mean_cost;
    double cost_stddev;
    double standard_error;
    double bound;  // V(x0) under the supplied value function
    bool within_bound;
};

// Plays the reference distribution (one feasible adversary with zero
// penalty) and compares the realized mean discounted cost against the
// theoretical worst-case value V(x0). The mean must not exceed the bound
// beyond three standard errors.
BoundComparison empirical_vs_theoretical(const RolloutConfig& config, const QuadraticValue& value);

}  // namespace drmv

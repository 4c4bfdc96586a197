#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "drmv/errors.hpp"

namespace drmv {

// Finitely supported reference distribution: atom i carries weight
// weights[i] > 0, and the weights sum to one. Zero-mass atoms are rejected
// at construction because the divergence below divides by them.
class FiniteDistribution {
  public:
    FiniteDistribution(std::vector<Eigen::VectorXd> atoms, std::vector<double> weights);

    int size() const { return static_cast<int>(atoms_.size()); }
    Eigen::Index dim() const { return atoms_.empty() ? 0 : atoms_.front().size(); }
    const std::vector<Eigen::VectorXd>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    const Eigen::VectorXd& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

    Eigen::VectorXd mean() const;

  private:
    std::vector<Eigen::VectorXd> atoms_;
    std::vector<double> weights_;
};

// Streaming draws from a FiniteDistribution by inverse-CDF lookup on
// deterministic uniforms. Bit-reproducible under a fixed seed.
class FiniteSampler {
  public:
    FiniteSampler(FiniteDistribution dist, std::uint64_t seed);
    const Eigen::VectorXd& draw();
    const FiniteDistribution& distribution() const { return dist_; }

  private:
    FiniteDistribution dist_;
    std::vector<double> cdf_;
    std::mt19937_64 rng_;
};

// One inner maximization instance: per-atom costs c_i >= 0 for the caller's
// fixed decision, and the penalty coefficient gamma > 0. The decision itself
// is never optimized here.
struct DroInstance {
    DroInstance(FiniteDistribution reference_in, std::vector<double> costs_in, double gamma_in);

    FiniteDistribution reference;
    std::vector<double> costs;
    double gamma;
};

struct WorstCaseResult {
    std::vector<double> weights;  // worst-case Q over the atoms
    double dual;                  // optimal multiplier s* (NaN for the grid oracle)
    double objective;             // E_Q[c] - gamma * chi2_penalty(Q, P0)
};

// Divergence sum_i p0_i (1 - q_i/p0_i)^2, equal to the Pearson chi-squared
// divergence sum_i (q_i - p0_i)^2 / p0_i.
double chi2_penalty(const std::vector<double>& q, const FiniteDistribution& reference);

// E_Q[c] - gamma * chi2_penalty(q, P0) for a candidate weight vector.
double penalized_objective(const std::vector<double>& q, const DroInstance& instance);

// Exact maximizer of the penalized expectation over the simplex. The convex
// piecewise-quadratic dual
//     g(s) = gamma * sum_i p0_i ((c_i + 2 gamma - s)+ / (2 gamma))^2 - gamma + s
// is C^1, so its stationary point is found by walking the sorted breakpoints
// s = c_i + 2 gamma and solving the linear stationarity condition on the
// segment where g' changes sign. The primal weights are recovered as
//     q_i = p0_i (c_i + 2 gamma - s*)+ / (2 gamma).
WorstCaseResult worst_case(const DroInstance& instance);

// E_{P0}[c] + Var_{P0}[c] / (4 gamma). Upper-bounds worst_case().objective,
// with equality when equality_condition_holds().
double mean_variance_objective(const DroInstance& instance);

// min_i c_i - E_{P0}[c] + 2 gamma > 0: the condition under which the bound
// above is tight (no positive-part clamp is active in the dual).
bool equality_condition_holds(const DroInstance& instance);

// Testing oracle: maximizes the penalized objective over a regular simplex
// grid, then polishes with pairwise coordinate ascent (exact for this
// strictly concave quadratic). Requires N <= 4 atoms.
WorstCaseResult brute_force_worst_case(const DroInstance& instance, long grid_resolution);

}  // namespace drmv

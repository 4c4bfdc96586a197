#pragma once

#include <functional>
#include <vector>

#include "drmv/dro.hpp"

namespace drmv {

// Discretized one-dimensional control problem used to verify that the robust
// and mean-variance Bellman operators agree when the penalty coefficient is
// large enough. Successor states falling outside the grid hull are clamped
// before interpolation.
struct TabularModel {
    std::vector<double> grid;     // strictly increasing, at least 3 points
    std::vector<double> actions;  // at least one control value
    FiniteDistribution noise;     // scalar atoms
    std::function<double(double x, double u, double xi)> dynamics;
    std::function<double(double x, double u)> stage_cost;
    double alpha;
    double gamma;

    void validate() const;
};

struct ValueTable {
    std::vector<double> values;
};

// Piecewise-linear interpolation with clamping to [grid.front(), grid.back()].
double interpolate(const ValueTable& table, const std::vector<double>& grid, double x);

// One sweep of V(x) = min_u C(x,u) + alpha E[V(f)] + (1/4 gamma) Var[alpha V(f)],
// with the expectation and variance taken exactly over the finite noise support.
ValueTable mv_bellman_step(const TabularModel& model, const ValueTable& table);

// One sweep of V(x) = min_u C(x,u) + max_Q { alpha E_Q[V(f)] - gamma D(Q, P0) },
// the inner maximization solved exactly by worst_case() with per-atom costs
// alpha V(f(x,u,xi_i)).
ValueTable drc_bellman_step(const TabularModel& model, const ValueTable& table);

enum class BellmanOperator { mean_variance, robust };

struct FixedPointResult {
    ValueTable table;
    int iterations;
    double residual;  // last sup-norm change
};

// Value iteration from the zero table until the sup-norm change drops to tol.
FixedPointResult solve_fixed_point(const TabularModel& model, BellmanOperator op, double tol,
                                   int max_iter);

// min over (grid point, action, atom) of
//   alpha V(f(x,u,xi)) - alpha E_{P0}[V(f(x,u,.))] + 2 gamma.
// A positive margin certifies the equivalence hypothesis on this model.
double assumption_margin(const TabularModel& model, const ValueTable& table);

// Scalar benchmark: f(x,u,xi) = 0.8 x + u + xi on a 41-point grid over
// [-2, 2], five control values in [-0.5, 0.5], symmetric two-atom noise
// +/- 0.1, stage cost x^2 + u^2, alpha = 0.9.
TabularModel default_verification_model(double gamma);

}  // namespace drmv

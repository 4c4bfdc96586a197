#include "drmv/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drmv {

void TabularModel::validate() const {
    if (grid.size() < 3) {
        throw std::invalid_argument("TabularModel: grid needs at least 3 points");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("TabularModel: grid must be strictly increasing");
        }
    }
    if (actions.empty()) {
        throw std::invalid_argument("TabularModel: at least one action required");
    }
    if (noise.dim() != 1) {
        throw ShapeMismatch("TabularModel: noise atoms must be scalar");
    }
    if (!dynamics || !stage_cost) {
        throw std::invalid_argument("TabularModel: dynamics and stage_cost must be set");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("TabularModel: alpha must lie in (0, 1)");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("TabularModel: gamma must be strictly positive");
    }
    for (double x : grid) {
        for (double u : actions) {
            if (!(stage_cost(x, u) >= 0.0)) {
                throw std::invalid_argument("TabularModel: stage cost must be nonnegative");
            }
        }
    }
}

double interpolate(const ValueTable& table, const std::vector<double>& grid, double x) {
    if (table.values.size() != grid.size()) {
        throw LengthMismatch("interpolate: table and grid sizes differ");
    }
    x = std::clamp(x, grid.front(), grid.back());
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return table.values.front();
    if (it == grid.end()) return table.values.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
    return (1.0 - t) * table.values[lo] + t * table.values[hi];
}

namespace {

// Interpolated values of the successor states of (x, u), one per noise atom.
std::vector<double> successor_values(const TabularModel& model, const ValueTable& table, double x,
                                     double u) {
    std::vector<double> w(static_cast<std::size_t>(model.noise.size()));
    for (int i = 0; i < model.noise.size(); ++i) {
        const double next = model.dynamics(x, u, model.noise.atom(i)(0));
        w[static_cast<std::size_t>(i)] = interpolate(table, model.grid, next);
    }
    return w;
}

}  // namespace

ValueTable mv_bellman_step(const TabularModel& model, const ValueTable& table) {
    ValueTable out;
    out.values.resize(model.grid.size());
    for (std::size_t gi = 0; gi < model.grid.size(); ++gi) {
        const double x = model.grid[gi];
        double best = std::numeric_limits<double>::infinity();
        for (double u : model.actions) {
            const std::vector<double> w = successor_values(model, table, x, u);
            double mean = 0.0;
            for (int i = 0; i < model.noise.size(); ++i) {
                mean += model.noise.weight(i) * w[static_cast<std::size_t>(i)];
            }
            double var = 0.0;
            for (int i = 0; i < model.noise.size(); ++i) {
                const double d = w[static_cast<std::size_t>(i)] - mean;
                var += model.noise.weight(i) * d * d;
            }
            const double a = model.alpha;
            const double candidate =
                model.stage_cost(x, u) + a * mean + (a * a / (4.0 * model.gamma)) * var;
            best = std::min(best, candidate);
        }
        out.values[gi] = best;
    }
    return out;
}

ValueTable drc_bellman_step(const TabularModel& model, const ValueTable& table) {
    ValueTable out;
    out.values.resize(model.grid.size());
    for (std::size_t gi = 0; gi < model.grid.size(); ++gi) {
        const double x = model.grid[gi];
        double best = std::numeric_limits<double>::infinity();
        for (double u : model.actions) {
            std::vector<double> costs = successor_values(model, table, x, u);
            for (double& c : costs) c *= model.alpha;
            const DroInstance inner(model.noise, std::move(costs), model.gamma);
            const double candidate = model.stage_cost(x, u) + worst_case(inner).objective;
            best = std::min(best, candidate);
        }
        out.values[gi] = best;
    }
    return out;
}

FixedPointResult solve_fixed_point(const TabularModel& model, BellmanOperator op, double tol,
                                   int max_iter) {
    model.validate();
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solve_fixed_point: tol must be positive");
    }
    ValueTable table;
    table.values.assign(model.grid.size(), 0.0);
    double change = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= max_iter; ++iter) {
        ValueTable next = op == BellmanOperator::mean_variance ? mv_bellman_step(model, table)
                                                               : drc_bellman_step(model, table);
        change = 0.0;
        for (std::size_t i = 0; i < table.values.size(); ++i) {
            change = std::max(change, std::abs(next.values[i] - table.values[i]));
        }
        table = std::move(next);
        if (change <= tol) {
            return FixedPointResult{std::move(table), iter, change};
        }
    }
    std::ostringstream msg;
    msg << "value iteration did not converge in " << max_iter << " sweeps (last change " << change
        << ")";
    throw NoConvergence(msg.str(), max_iter, change);
}

double assumption_margin(const TabularModel& model, const ValueTable& table) {
    double margin = std::numeric_limits<double>::infinity();
    for (double x : model.grid) {
        for (double u : model.actions) {
            const std::vector<double> w = successor_values(model, table, x, u);
            double mean = 0.0;
            for (int i = 0; i < model.noise.size(); ++i) {
                mean += model.noise.weight(i) * w[static_cast<std::size_t>(i)];
            }
            for (int i = 0; i < model.noise.size(); ++i) {
                const double m = model.alpha * w[static_cast<std::size_t>(i)] -
                                 model.alpha * mean + 2.0 * model.gamma;
                margin = std::min(margin, m);
            }
        }
    }
    return margin;
}

TabularModel default_verification_model(double gamma) {
    TabularModel model;
    const int points = 41;
    model.grid.reserve(points);
    for (int i = 0; i < points; ++i) {
        model.grid.push_back(-2.0 + 4.0 * static_cast<double>(i) / (points - 1));
    }
    model.actions = {-0.5, -0.25, 0.0, 0.25, 0.5};
    model.noise = FiniteDistribution{
        {Eigen::VectorXd::Constant(1, -0.1), Eigen::VectorXd::Constant(1, 0.1)}, {0.5, 0.5}};
    model.dynamics = [](double x, double u, double xi) { return 0.8 * x + u + xi; };
    model.stage_cost = [](double x, double u) { return x * x + u * u; };
    model.alpha = 0.9;
    model.gamma = gamma;
    return model;
}

}  // namespace drmv

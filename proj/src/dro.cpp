#include "drmv/dro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace drmv {

FiniteDistribution::FiniteDistribution(std::vector<Eigen::VectorXd> atoms,
                                       std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) {
        throw LengthMismatch("FiniteDistribution: atom and weight counts differ");
    }
    if (atoms_.empty()) {
        throw LengthMismatch("FiniteDistribution: empty support");
    }
    const Eigen::Index d = atoms_.front().size();
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].size() != d) {
            throw ShapeMismatch("FiniteDistribution: atoms have mixed dimensions");
        }
        if (!(weights_[i] > 0.0)) {
            throw NegativeWeight("FiniteDistribution: every weight must be strictly positive");
        }
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw NegativeWeight("FiniteDistribution: weights must sum to 1 (within 1e-12)");
    }
}

Eigen::VectorXd FiniteDistribution::mean() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < size(); ++i) {
        m += weight(i) * atom(i);
    }
    return m;
}

FiniteSampler::FiniteSampler(FiniteDistribution dist, std::uint64_t seed)
    : dist_(std::move(dist)), rng_(seed) {
    cdf_.reserve(static_cast<std::size_t>(dist_.size()));
    double acc = 0.0;
    for (int i = 0; i < dist_.size(); ++i) {
        acc += dist_.weight(i);
        cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
}

const Eigen::VectorXd& FiniteSampler::draw() {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), dist_.size() - 1);
    return dist_.atom(static_cast<int>(idx));
}

DroInstance::DroInstance(FiniteDistribution reference_in, std::vector<double> costs_in,
                         double gamma_in)
    : reference(std::move(reference_in)), costs(std::move(costs_in)), gamma(gamma_in) {
    if (costs.size() != static_cast<std::size_t>(reference.size())) {
        throw LengthMismatch("DroInstance: cost count does not match the support size");
    }
    for (double c : costs) {
        if (!(c >= 0.0)) {
            throw NegativeWeight("DroInstance: costs must be nonnegative");
        }
    }
    if (!(gamma > 0.0)) {
        throw NegativeWeight("DroInstance: gamma must be strictly positive");
    }
}

double chi2_penalty(const std::vector<double>& q, const FiniteDistribution& reference) {
    if (q.size() != static_cast<std::size_t>(reference.size())) {
        throw LengthMismatch("chi2_penalty: weight vector length does not match the support size");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < 0.0) {
            throw NegativeWeight("chi2_penalty: candidate weights must be nonnegative");
        }
        const double p0 = reference.weights()[i];
        const double ratio = 1.0 - q[i] / p0;
        total += p0 * ratio * ratio;
    }
    return total;
}

double penalized_objective(const std::vector<double>& q, const DroInstance& instance) {
    double expectation = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        expectation += q[i] * instance.costs[i];
    }
    return expectation - instance.gamma * chi2_penalty(q, instance.reference);
}

namespace {

std::vector<double> primal_from_dual(const DroInstance& instance, double s) {
    const double two_gamma = 2.0 * instance.gamma;
    std::vector<double> q(instance.costs.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double slack = instance.costs[i] + two_gamma - s;
        q[i] = instance.reference.weights()[i] * std::max(slack, 0.0) / two_gamma;
    }
    return q;
}

}  // namespace

WorstCaseResult worst_case(const DroInstance& instance) {
    const int n = instance.reference.size();
    const std::vector<double>& p0 = instance.reference.weights();
    const std::vector<double>& c = instance.costs;
    const double two_gamma = 2.0 * instance.gamma;

    // Breakpoints of the dual, ascending. Above the largest one the dual
    // slope is +1, below the smallest it tends to -inf, so g' = 0 has a root.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return c[a] < c[b]; });

    // Suffix sums over atoms still active (those with c_i + 2g > s).
    // g'(s) = 1 - sum_{active} p0_i (c_i + 2g - s) / 2g, so the stationarity
    // condition on a segment is linear in s.
    double weight_active = 1.0;
    double weighted_cost_active = 0.0;
    for (int i = 0; i < n; ++i) {
        weighted_cost_active += p0[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    }

    double s_star = std::numeric_limits<double>::quiet_NaN();
    std::size_t k = 0;
    while (k < order.size()) {
        const double hi = c[static_cast<std::size_t>(order[k])] + two_gamma;
        // Stationary point with the current active set:
        //   sum_active p0_i (c_i + 2g - s) = 2g.
        const double s_unconstrained =
            (weighted_cost_active + two_gamma * (weight_active - 1.0)) / weight_active;
        if (s_unconstrained <= hi) {
            // g is C^1 and convex, so the first segment whose stationary
            // point does not overshoot its right endpoint holds the minimum.
            s_star = s_unconstrained;
            break;
        }
        // Deactivate every atom whose breakpoint equals hi (ties collapse
        // into one segment).
        while (k < order.size() &&
               c[static_cast<std::size_t>(order[k])] + two_gamma == hi) {
            const std::size_t idx = static_cast<std::size_t>(order[k]);
            weight_active -= p0[idx];
            weighted_cost_active -= p0[idx] * c[idx];
            ++k;
        }
    }
    if (!std::isfinite(s_star)) {
        // Slope is +1 beyond the last breakpoint and nonpositive before it.
        s_star = c[static_cast<std::size_t>(order.back())] + two_gamma;
    }

    WorstCaseResult result;
    result.dual = s_star;
    result.weights = primal_from_dual(instance, s_star);
    result.objective = penalized_objective(result.weights, instance);
    return result;
}

double mean_variance_objective(const DroInstance& instance) {
    const std::vector<double>& p0 = instance.reference.weights();
    const std::vector<double>& c = instance.costs;
    double mean = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        mean += p0[i] * c[i];
    }
    double variance = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = c[i] - mean;
        variance += p0[i] * d * d;
    }
    return mean + variance / (4.0 * instance.gamma);
}

bool equality_condition_holds(const DroInstance& instance) {
    const std::vector<double>& p0 = instance.reference.weights();
    const std::vector<double>& c = instance.costs;
    double mean = 0.0;
    double min_cost = c.front();
    for (std::size_t i = 0; i < c.size(); ++i) {
        mean += p0[i] * c[i];
        min_cost = std::min(min_cost, c[i]);
    }
    return min_cost - mean + 2.0 * instance.gamma > 0.0;
}

namespace {

// One pass of pairwise transfers q_i += t, q_j -= t with the exact 1-D
// maximizer of the concave objective, clamped to keep both weights
// nonnegative. Returns the total objective improvement.
double coordinate_ascent_pass(const DroInstance& instance, std::vector<double>& q) {
    const std::vector<double>& p0 = instance.reference.weights();
    const std::vector<double>& c = instance.costs;
    const double two_gamma = 2.0 * instance.gamma;
    const int n = instance.reference.size();
    double gained = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const std::size_t a = static_cast<std::size_t>(i);
            const std::size_t b = static_cast<std::size_t>(j);
            const double curvature = two_gamma * (1.0 / p0[a] + 1.0 / p0[b]);
            const double slope = (c[a] - c[b]) -
                                 two_gamma * ((q[a] - p0[a]) / p0[a] - (q[b] - p0[b]) / p0[b]);
            double t = slope / curvature;
            t = std::clamp(t, -q[a], q[b]);
            if (t == 0.0) continue;
            gained += slope * t - 0.5 * curvature * t * t;
            q[a] += t;
            q[b] -= t;
        }
    }
    return gained;
}

}  // namespace

WorstCaseResult brute_force_worst_case(const DroInstance& instance, long grid_resolution) {
    const int n = instance.reference.size();
    if (n > 4) {
        throw TooManyAtoms("brute_force_worst_case: supports at most 4 atoms");
    }
    if (grid_resolution < 100) {
        throw std::invalid_argument("brute_force_worst_case: grid_resolution must be >= 100");
    }

    // Keep the lattice affordable for wider supports; the ascent polish below
    // recovers the exact optimum from any nearby lattice point.
    long res = grid_resolution;
    if (n == 3) res = std::min(res, 400L);
    if (n == 4) res = std::min(res, 120L);

    std::vector<double> best;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<long> counts(static_cast<std::size_t>(n), 0);
    const auto evaluate = [&](const std::vector<long>& k) {
        std::vector<double> q(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            q[static_cast<std::size_t>(i)] =
                static_cast<double>(k[static_cast<std::size_t>(i)]) / static_cast<double>(res);
        }
        const double value = penalized_objective(q, instance);
        if (value > best_value) {
            best_value = value;
            best = q;
        }
    };
    // Enumerate compositions of `res` into n parts.
    if (n == 1) {
        best = {1.0};
        best_value = penalized_objective(best, instance);
    } else if (n == 2) {
        for (long k = 0; k <= res; ++k) {
            counts = {k, res - k};
            evaluate(counts);
        }
    } else if (n == 3) {
        for (long k0 = 0; k0 <= res; ++k0) {
            for (long k1 = 0; k1 <= res - k0; ++k1) {
                counts = {k0, k1, res - k0 - k1};
                evaluate(counts);
            }
        }
    } else {
        for (long k0 = 0; k0 <= res; ++k0) {
            for (long k1 = 0; k1 <= res - k0; ++k1) {
                for (long k2 = 0; k2 <= res - k0 - k1; ++k2) {
                    counts = {k0, k1, k2, res - k0 - k1 - k2};
                    evaluate(counts);
                }
            }
        }
    }

    const double scale = std::max(1.0, std::abs(best_value));
    for (int pass = 0; pass < 500; ++pass) {
        if (coordinate_ascent_pass(instance, best) <= 1e-16 * scale) break;
    }

    WorstCaseResult result;
    result.weights = best;
    result.dual = std::numeric_limits<double>::quiet_NaN();
    result.objective = penalized_objective(best, instance);
    return result;
}

}  // namespace drmv

#include "drmv/rollout.hpp"

#include <cmath>
#include <memory>

namespace drmv {

void RolloutConfig::validate() const {
    if (horizon < 1) {
        throw std::invalid_argument("RolloutConfig: horizon must be >= 1");
    }
    if (num_samples < 2) {
        throw std::invalid_argument("RolloutConfig: num_samples must be >= 2");
    }
    if (num_trajectories < 1) {
        throw std::invalid_argument("RolloutConfig: num_trajectories must be >= 1");
    }
    if (gain.rows() != system.input_dim() || gain.cols() != system.state_dim()) {
        throw ShapeMismatch("RolloutConfig: gain shape does not match the system");
    }
    if (x0.size() != system.state_dim()) {
        throw ShapeMismatch("RolloutConfig: x0 dimension does not match the system");
    }
    if (finite_noise && finite_noise->dim() != system.state_dim()) {
        throw ShapeMismatch("RolloutConfig: finite noise dimension does not match the system");
    }
}

namespace {

// Uniform facade over the two disturbance sources.
class NoiseStream {
  public:
    NoiseStream(const RolloutConfig& config, std::uint64_t stream_seed) {
        if (config.finite_noise) {
            finite_ = std::make_unique<FiniteSampler>(*config.finite_noise, stream_seed);
        } else {
            gaussian_ = std::make_unique<GaussianSampler>(
                Eigen::VectorXd::Zero(config.system.state_dim()), config.system.Sigma, stream_seed);
        }
    }
    Eigen::VectorXd draw() { return finite_ ? finite_->draw() : gaussian_->draw(); }

  private:
    std::unique_ptr<FiniteSampler> finite_;
    std::unique_ptr<GaussianSampler> gaussian_;
};

}  // namespace

RolloutReport rollout(const RolloutConfig& config, const QuadraticValue& value) {
    config.validate();
    if (value.P.dim() != config.system.state_dim()) {
        throw ShapeMismatch("rollout: value dimension does not match the system");
    }
    const LqSystem& sys = config.system;
    const double a = sys.alpha;

    RolloutReport report;
    report.discounted_costs.reserve(static_cast<std::size_t>(config.num_trajectories));

    for (int traj = 0; traj < config.num_trajectories; ++traj) {
        NoiseStream noise(config, derive_stream_seed(config.seed, static_cast<std::uint64_t>(traj)));
        Eigen::VectorXd x = config.x0;
        double cost = 0.0;
        double discount = 1.0;
        for (int t = 0; t < config.horizon; ++t) {
            const Eigen::VectorXd u = -config.gain * x;
            cost += discount * (x.dot(sys.Q.mat() * x) + u.dot(sys.R.mat() * u));
            discount *= a;

            const Eigen::VectorXd z = sys.A * x + sys.B * u;
            double v_min = std::numeric_limits<double>::infinity();
            double v_sum = 0.0;
            for (int k = 0; k < config.num_samples; ++k) {
                const double v = value(z + noise.draw());
                v_min = std::min(v_min, v);
                v_sum += v;
            }
            const double margin =
                a * v_min - a * (v_sum / config.num_samples) + 2.0 * sys.gamma;
            ++report.checks_total;
            if (margin > 0.0) ++report.checks_satisfied;

            x = z + noise.draw();
        }
        const Eigen::VectorXd u = -config.gain * x;
        cost += discount * (x.dot(sys.Q.mat() * x) + u.dot(sys.R.mat() * u));
        report.discounted_costs.push_back(cost);
    }

    report.assumption_fraction =
        report.checks_total == 0
            ? 1.0
            : static_cast<double>(report.checks_satisfied) / static_cast<double>(report.checks_total);
    double sum = 0.0;
    for (double c : report.discounted_costs) sum += c;
    report.mean_cost = sum / static_cast<double>(report.discounted_costs.size());
    double ss = 0.0;
    for (double c : report.discounted_costs) {
        const double d = c - report.mean_cost;
        ss += d * d;
    }
    report.cost_stddev = report.discounted_costs.size() > 1
                             ? std::sqrt(ss / static_cast<double>(report.discounted_costs.size() - 1))
                             : 0.0;
    return report;
}

BoundComparison empirical_vs_theoretical(const RolloutConfig& config, const QuadraticValue& value) {
    const RolloutReport report = rollout(config, value);
    BoundComparison cmp;
    cmp.mean_cost = report.mean_cost;
    cmp.cost_stddev = report.cost_stddev;
    cmp.standard_error =
        report.cost_stddev / std::sqrt(static_cast<double>(report.discounted_costs.size()));
    cmp.bound = value(config.x0);
    cmp.within_bound = cmp.mean_cost <= cmp.bound + 3.0 * cmp.standard_error;
    return cmp;
}

}  // namespace drmv

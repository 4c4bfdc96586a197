#include "drmv/riccati.hpp"

#include <cmath>
#include <sstream>

namespace drmv {

LqSystem::LqSystem(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, SymMatrix Q_in, SymMatrix R_in,
                   SymMatrix Sigma_in, double alpha_in, double gamma_in)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      Q(std::move(Q_in)),
      R(std::move(R_in)),
      Sigma(std::move(Sigma_in)),
      alpha(alpha_in),
      gamma(gamma_in) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (A.cols() != n || B.rows() != n || Q.dim() != n || Sigma.dim() != n || R.dim() != m) {
        throw ShapeMismatch("LqSystem: inconsistent matrix dimensions");
    }
    if (!Q.is_positive_definite()) {
        throw NotPositiveDefinite("LqSystem: Q must be positive definite");
    }
    if (m > 0 && !R.is_positive_definite()) {
        throw NotPositiveDefinite("LqSystem: R must be positive definite");
    }
    if (!Sigma.is_psd()) {
        throw NotPsd("LqSystem: Sigma must be positive semidefinite");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("LqSystem: alpha must lie in (0, 1)");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("LqSystem: gamma must be strictly positive");
    }
}

LqSystem LqSystem::with_gamma(double new_gamma) const {
    return LqSystem(A, B, Q, R, Sigma, alpha, new_gamma);
}

QuadraticValue::QuadraticValue(SymMatrix P_in, double r_in) : P(std::move(P_in)), r(r_in) {
    if (!P.is_psd()) {
        throw NotPsd("QuadraticValue: P must be positive semidefinite");
    }
    if (!(r >= 0.0)) {
        throw std::invalid_argument("QuadraticValue: r must be nonnegative");
    }
}

SymMatrix p_tilde(const SymMatrix& P, const LqSystem& sys) {
    const Eigen::MatrixXd& p = P.mat();
    return SymMatrix(p + (sys.alpha / sys.gamma) * p * sys.Sigma.mat() * p);
}

namespace {

constexpr double kBlowupNorm = 1e100;

Eigen::MatrixXd tilde_of(const Eigen::MatrixXd& P, const LqSystem& sys, bool penalized) {
    if (!penalized) return P;
    Eigen::MatrixXd t = P + (sys.alpha / sys.gamma) * P * sys.Sigma.mat() * P;
    return 0.5 * (t + t.transpose());
}

// r = alpha/(1-alpha) Tr[P Sigma + alpha/(2 gamma) P Sigma P Sigma]; the
// penalty trace is dropped for the plain discounted regulator.
double value_offset(const Eigen::MatrixXd& P, const LqSystem& sys, bool penalized) {
    const Eigen::MatrixXd ps = P * sys.Sigma.mat();
    double tr = ps.trace();
    if (penalized) {
        tr += sys.alpha / (2.0 * sys.gamma) * (ps * ps).trace();
    }
    return sys.alpha / (1.0 - sys.alpha) * tr;
}

Eigen::MatrixXd riccati_map(const Eigen::MatrixXd& P, const LqSystem& sys, bool penalized) {
    const double a = sys.alpha;
    const Eigen::MatrixXd Pt = tilde_of(P, sys, penalized);
    const Eigen::MatrixXd BtPtA = sys.B.transpose() * Pt * sys.A;
    const SymMatrix G(sys.R.mat() + a * sys.B.transpose() * Pt * sys.B);
    const Eigen::MatrixXd correction =
        sys.input_dim() > 0
            ? Eigen::MatrixXd(a * a * BtPtA.transpose() * solve_spd(G, BtPtA))
            : Eigen::MatrixXd::Zero(sys.state_dim(), sys.state_dim());
    Eigen::MatrixXd next = a * sys.A.transpose() * Pt * sys.A + sys.Q.mat() - correction;
    return 0.5 * (next + next.transpose());
}

RiccatiSolution solve_riccati(const LqSystem& sys, const SymMatrix& P0,
                              const IterationOptions& opts, bool penalized) {
    if (P0.dim() != sys.state_dim()) {
        throw ShapeMismatch("riccati_iterate: P0 dimension does not match the system");
    }
    if (!P0.is_psd()) {
        throw NotPsd("riccati_iterate: P0 must be positive semidefinite");
    }
    if (!(opts.tol > 0.0)) {
        throw std::invalid_argument("riccati_iterate: tol must be positive");
    }

    Eigen::MatrixXd P = P0.mat();
    double change = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    for (; iterations < opts.max_iter; ++iterations) {
        Eigen::MatrixXd next = riccati_map(P, sys, penalized);
        change = (next - P).norm();
        const double norm = next.norm();
        P = std::move(next);
        if (!std::isfinite(norm) || norm > kBlowupNorm) {
            std::ostringstream msg;
            msg << "riccati iteration diverging (||P|| = " << norm << " after " << iterations + 1
                << " sweeps, last change " << change << "); no PSD fixed point at gamma = "
                << sys.gamma;
            throw NoConvergence(msg.str(), iterations + 1, change);
        }
        if (change <= opts.tol * std::max(1.0, norm)) {
            converged = true;
            ++iterations;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "riccati iteration did not converge in " << opts.max_iter
            << " sweeps (last change " << change << ")";
        throw NoConvergence(msg.str(), opts.max_iter, change);
    }

    const double residual = (riccati_map(P, sys, penalized) - P).norm();
    const Eigen::MatrixXd Pt = tilde_of(P, sys, penalized);
    const SymMatrix G(sys.R.mat() + sys.alpha * sys.B.transpose() * Pt * sys.B);
    Eigen::MatrixXd gain(sys.input_dim(), sys.state_dim());
    if (sys.input_dim() > 0) {
        gain = solve_spd(G, sys.alpha * sys.B.transpose() * Pt * sys.A);
    }
    QuadraticValue value(SymMatrix(P), value_offset(P, sys, penalized));
    return RiccatiSolution{std::move(value), std::move(gain), iterations, residual};
}

}  // namespace

RiccatiSolution riccati_iterate(const LqSystem& sys, const SymMatrix& P0,
                                const IterationOptions& opts) {
    return solve_riccati(sys, P0, opts, /*penalized=*/true);
}

RiccatiSolution riccati_iterate(const LqSystem& sys, const IterationOptions& opts) {
    return solve_riccati(sys, sys.Q, opts, /*penalized=*/true);
}

RiccatiSolution conventional_lqr(const LqSystem& sys, const IterationOptions& opts) {
    return solve_riccati(sys, sys.Q, opts, /*penalized=*/false);
}

QuadraticValue evaluate_gain(const LqSystem& sys, const Eigen::MatrixXd& K,
                             const IterationOptions& opts, YTildeForm form) {
    if (K.rows() != sys.input_dim() || K.cols() != sys.state_dim()) {
        throw ShapeMismatch("evaluate_gain: gain shape does not match the system");
    }
    const double a = sys.alpha;
    const Eigen::MatrixXd Acl = sys.A - sys.B * K;
    Eigen::MatrixXd C = sys.Q.mat() + K.transpose() * sys.R.mat() * K;
    C = 0.5 * (C + C.transpose());

    Eigen::MatrixXd Y = C;
    double change = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    for (; iterations < opts.max_iter; ++iterations) {
        Eigen::MatrixXd Yt = (a / sys.gamma) * Y * sys.Sigma.mat() * Y;
        if (form == YTildeForm::full) Yt += Y;
        Eigen::MatrixXd next = a * Acl.transpose() * Yt * Acl + C;
        next = 0.5 * (next + next.transpose());
        change = (next - Y).norm();
        const double norm = next.norm();
        Y = std::move(next);
        if (!std::isfinite(norm) || norm > kBlowupNorm) {
            std::ostringstream msg;
            msg << "gain evaluation diverging (||Y|| = " << norm << " after " << iterations + 1
                << " sweeps); gain is not robustly stabilizing at gamma = " << sys.gamma;
            throw NoConvergence(msg.str(), iterations + 1, change);
        }
        if (change <= opts.tol * std::max(1.0, norm)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "gain evaluation did not converge in " << opts.max_iter << " sweeps (last change "
            << change << ")";
        throw NoConvergence(msg.str(), opts.max_iter, change);
    }
    return QuadraticValue(SymMatrix(Y), value_offset(Y, sys, /*penalized=*/true));
}

namespace {

// Moments of the disturbance needed by the one-step operator for a given P:
// mean, covariance, the cross term h = E[(xi - mu)(xi'P xi - E[xi'P xi])],
// and Var[xi'P xi].
struct QuadFormMoments {
    Eigen::VectorXd mu;
    Eigen::MatrixXd cov;
    Eigen::VectorXd h;
    double mean_quad;
    double var_quad;
};

QuadFormMoments gaussian_moments(const LqSystem& sys, const Eigen::MatrixXd& P) {
    QuadFormMoments m;
    const Eigen::Index n = sys.state_dim();
    m.mu = Eigen::VectorXd::Zero(n);
    m.cov = sys.Sigma.mat();
    m.h = Eigen::VectorXd::Zero(n);  // odd Gaussian moments vanish
    const Eigen::MatrixXd ps = P * m.cov;
    m.mean_quad = ps.trace();
    m.var_quad = 2.0 * (ps * ps).trace();
    return m;
}

QuadFormMoments finite_moments(const FiniteDistribution& dist, const Eigen::MatrixXd& P) {
    QuadFormMoments m;
    const Eigen::Index n = dist.dim();
    m.mu = dist.mean();
    m.cov = Eigen::MatrixXd::Zero(n, n);
    m.mean_quad = 0.0;
    for (int i = 0; i < dist.size(); ++i) {
        const Eigen::VectorXd d = dist.atom(i) - m.mu;
        m.cov += dist.weight(i) * d * d.transpose();
        m.mean_quad += dist.weight(i) * dist.atom(i).dot(P * dist.atom(i));
    }
    m.h = Eigen::VectorXd::Zero(n);
    m.var_quad = 0.0;
    for (int i = 0; i < dist.size(); ++i) {
        const double e = dist.atom(i).dot(P * dist.atom(i)) - m.mean_quad;
        m.h += dist.weight(i) * e * (dist.atom(i) - m.mu);
        m.var_quad += dist.weight(i) * e * e;
    }
    return m;
}

// One exact application of the mean-variance Bellman operator to a quadratic
// value function, minimized in closed form over u.
double bellman_rhs(const LqSystem& sys, const QuadraticValue& value, const Eigen::VectorXd& x,
                   const QuadFormMoments& m) {
    const double a = sys.alpha;
    const double g = sys.gamma;
    const Eigen::MatrixXd& P = value.P.mat();

    // obj(u) = u'Ru + z'Mz + b'z + c0 with z = Ax + Bu.
    Eigen::MatrixXd M = a * P + (a * a / g) * P * m.cov * P;
    M = 0.5 * (M + M.transpose());
    const Eigen::VectorXd b = 2.0 * a * P * m.mu + (a * a / g) * P * m.h;
    const double c0 = x.dot(sys.Q.mat() * x) + a * (m.mean_quad + value.r) +
                      (a * a / (4.0 * g)) * m.var_quad;

    Eigen::VectorXd z;
    double input_cost = 0.0;
    if (sys.input_dim() > 0) {
        const SymMatrix H(sys.R.mat() + sys.B.transpose() * M * sys.B);
        const Eigen::VectorXd rhs = -(sys.B.transpose() * (M * (sys.A * x)) + 0.5 * sys.B.transpose() * b);
        const Eigen::VectorXd u = solve_spd(H, rhs);
        z = sys.A * x + sys.B * u;
        input_cost = u.dot(sys.R.mat() * u);
    } else {
        z = sys.A * x;
    }
    return input_cost + z.dot(M * z) + b.dot(z) + c0;
}

}  // namespace

double bellman_residual(const LqSystem& sys, const QuadraticValue& value,
                        const Eigen::VectorXd& x) {
    const QuadFormMoments m = gaussian_moments(sys, value.P.mat());
    return std::abs(bellman_rhs(sys, value, x, m) - value(x));
}

double bellman_residual(const LqSystem& sys, const QuadraticValue& value, const Eigen::VectorXd& x,
                        const FiniteDistribution& reference) {
    if (reference.dim() != sys.state_dim()) {
        throw ShapeMismatch("bellman_residual: disturbance dimension does not match the system");
    }
    const QuadFormMoments m = finite_moments(reference, value.P.mat());
    return std::abs(bellman_rhs(sys, value, x, m) - value(x));
}

}  // namespace drmv

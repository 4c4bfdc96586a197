#pragma once

#include <Eigen/Dense>

#include "drmv/dro.hpp"
#include "drmv/matrix_numerics.hpp"

namespace drmv {

// Discrete-time linear system x+ = A x + B u + xi with quadratic stage cost
// x'Qx + u'Ru, discount alpha, penalty coefficient gamma, and a mean-zero
// reference disturbance with covariance Sigma.
struct LqSystem {
    LqSystem(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, SymMatrix Q_in, SymMatrix R_in,
             SymMatrix Sigma_in, double alpha_in, double gamma_in);

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return B.cols(); }
    LqSystem with_gamma(double new_gamma) const;

    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    SymMatrix Q;
    SymMatrix R;
    SymMatrix Sigma;
    double alpha;
    double gamma;
};

// V(x) = x' P x + r with P PSD and r >= 0, so V >= 0 everywhere.
struct QuadraticValue {
    QuadraticValue(SymMatrix P_in, double r_in);

    double operator()(const Eigen::VectorXd& x) const { return x.dot(P.mat() * x) + r; }

    SymMatrix P;
    double r;
};

struct RiccatiSolution {
    QuadraticValue value;
    Eigen::MatrixXd gain;  // u*(x) = -gain * x
    int iterations;
    double residual;  // Frobenius norm of the fixed-point defect at return
};

struct IterationOptions {
    int max_iter = 100000;
    double tol = 1e-12;  // relative Frobenius change between sweeps
};

// P + (alpha/gamma) P Sigma P, symmetrized.
SymMatrix p_tilde(const SymMatrix& P, const LqSystem& sys);

// Fixed-point iteration
//   P_{k+1} = alpha A' Pt_k A + Q - alpha^2 A' Pt_k B (R + alpha B' Pt_k B)^{-1} B' Pt_k A,
// with Pt_k = P_k + (alpha/gamma) P_k Sigma P_k, started from P0. On
// convergence returns the gain K = (R + alpha B' Pt* B)^{-1} alpha B' Pt* A
// and the offset r = alpha/(1-alpha) Tr[P* Sigma + alpha/(2 gamma) P* Sigma P* Sigma].
// Throws NoConvergence when the iterate budget runs out or the trajectory
// blows up (no PSD fixed point at this gamma).
RiccatiSolution riccati_iterate(const LqSystem& sys, const SymMatrix& P0,
                                const IterationOptions& opts = {});
RiccatiSolution riccati_iterate(const LqSystem& sys, const IterationOptions& opts = {});

// Same recursion with the penalty term removed (Pt == P): the discounted
// linear-quadratic regulator, i.e. the gamma -> infinity limit.
RiccatiSolution conventional_lqr(const LqSystem& sys, const IterationOptions& opts = {});

// Which Yt enters the Lyapunov recursion for a fixed gain. `full` mirrors
// the Pt definition (Y + (alpha/gamma) Y Sigma Y) and makes the evaluation
// of the optimal gain agree with the Riccati solution; `penalty_only` keeps
// just (alpha/gamma) Y Sigma Y and is exposed for comparison.
enum class YTildeForm { full, penalty_only };

// Worst-case value of the fixed controller u = -K x: iterates
//   Y_{k+1} = alpha (A-BK)' Yt_k (A-BK) + Q + K'RK
// from Y_0 = Q + K'RK and returns X with P = Y and the same trace formula
// for the offset. NoConvergence means the gain is not robustly stabilizing
// at this (alpha, gamma).
QuadraticValue evaluate_gain(const LqSystem& sys, const Eigen::MatrixXd& K,
                             const IterationOptions& opts = {},
                             YTildeForm form = YTildeForm::full);

// |RHS(x) - V(x)| where RHS is the one-step mean-variance Bellman operator
//   min_u x'Qx + u'Ru + alpha E[V(Ax+Bu+xi)] + (1/4 gamma) Var[alpha V(Ax+Bu+xi)]
// evaluated in closed form and minimized exactly over u. The default treats
// the reference disturbance as Gaussian (fourth-moment identity
// Var[xi'P xi + 2 xi'P z] = 2 Tr[(P Sigma)^2] + 4 z'P Sigma P z); the
// overload taking a FiniteDistribution uses exact finite-sum moments.
double bellman_residual(const LqSystem& sys, const QuadraticValue& value, const Eigen::VectorXd& x);
double bellman_residual(const LqSystem& sys, const QuadraticValue& value, const Eigen::VectorXd& x,
                        const FiniteDistribution& reference);

}  // namespace drmv

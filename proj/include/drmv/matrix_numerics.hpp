#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "drmv/errors.hpp"

namespace drmv {

// Dense symmetric matrix. Construction symmetrizes, so entries(i,j) ==
// entries(j,i) holds exactly afterwards. PSD checks use a tolerance relative
// to a spectral-scale estimate; absolute tolerances are unsafe here because
// the cost matrices in use span many orders of magnitude.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(const Eigen::MatrixXd& m);

    static SymMatrix Zero(Eigen::Index n);
    static SymMatrix Identity(Eigen::Index n);

    Eigen::Index dim() const { return mat_.rows(); }
    const Eigen::MatrixXd& mat() const { return mat_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }
    double trace() const { return mat_.trace(); }

    // Largest absolute row sum; bounds the spectral radius (Gershgorin).
    double spectral_scale() const;
    double psd_tolerance() const;
    double min_eigenvalue() const;
    bool is_psd() const;
    bool is_positive_definite() const;

  private:
    Eigen::MatrixXd mat_;
};

// Solves M·X = rhs for symmetric positive definite M via Cholesky.
// Throws NotPositiveDefinite if the factorization hits a nonpositive pivot.
Eigen::MatrixXd solve_spd(const SymMatrix& M, const Eigen::MatrixXd& rhs);

// Derives an independent stream seed from (seed, index) via splitmix64.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

// Streaming N(mean, cov) draws. The generator is mt19937_64 bits mapped
// through Box-Muller, so a fixed seed gives a bit-identical sequence
// independent of the standard library's distribution internals.
class GaussianSampler {
  public:
    GaussianSampler(Eigen::VectorXd mean, const SymMatrix& cov, std::uint64_t seed);

    const Eigen::VectorXd& mean() const { return mean_; }
    Eigen::Index dim() const { return mean_.size(); }
    Eigen::VectorXd draw();
    double standard_normal();

  private:
    double uniform_open();

    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;  // cov == factor * factor^T
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Draws `count` vectors from N(mean, cov). Deterministic under a fixed seed.
std::vector<Eigen::VectorXd> sample_gaussian(const Eigen::VectorXd& mean, const SymMatrix& cov,
                                             int count, std::uint64_t seed);

}  // namespace drmv

#include "drmv/matrix_numerics.hpp"

#include <cmath>
#include <limits>

namespace drmv {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw ShapeMismatch("SymMatrix: input is not square");
    }
    mat_ = 0.5 * (m + m.transpose());
    // Force exact symmetry; the average above can still differ in the last ulp.
    for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            mat_(i, j) = mat_(j, i);
        }
    }
}

SymMatrix SymMatrix::Zero(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }

SymMatrix SymMatrix::Identity(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

double SymMatrix::spectral_scale() const {
    if (mat_.size() == 0) return 0.0;
    return mat_.cwiseAbs().rowwise().sum().maxCoeff();
}

double SymMatrix::psd_tolerance() const { return 1e-9 * std::max(1.0, spectral_scale()); }

double SymMatrix::min_eigenvalue() const {
    if (mat_.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool SymMatrix::is_psd() const {
    if (mat_.size() == 0) return true;
    return min_eigenvalue() >= -psd_tolerance();
}

bool SymMatrix::is_positive_definite() const {
    if (mat_.size() == 0) return true;
    return min_eigenvalue() > 1e-12 * std::max(1.0, spectral_scale());
}

Eigen::MatrixXd solve_spd(const SymMatrix& M, const Eigen::MatrixXd& rhs) {
    if (M.dim() != rhs.rows()) {
        throw ShapeMismatch("solve_spd: rhs row count does not match matrix dimension");
    }
    if (M.dim() == 0) {
        return rhs;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M.mat());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("solve_spd: Cholesky factorization failed (matrix not positive definite)");
    }
    return llt.solve(rhs);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 applied to a mixed key; distinct (seed, index) pairs land on
    // well-separated streams.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// PSD square root factor via eigendecomposition; tolerates semidefinite
// inputs (Cholesky would reject them).
Eigen::MatrixXd psd_factor(const SymMatrix& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.mat());
    const Eigen::VectorXd evals = es.eigenvalues();
    if (evals.size() > 0 && evals.minCoeff() < -cov.psd_tolerance()) {
        throw NotPsd("GaussianSampler: covariance is not positive semidefinite");
    }
    Eigen::VectorXd sq = evals.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * sq.asDiagonal();
}

}  // namespace

GaussianSampler::GaussianSampler(Eigen::VectorXd mean, const SymMatrix& cov, std::uint64_t seed)
    : mean_(std::move(mean)), rng_(seed) {
    if (cov.dim() != mean_.size()) {
        throw ShapeMismatch("GaussianSampler: mean/covariance dimension mismatch");
    }
    factor_ = psd_factor(cov);
}

double GaussianSampler::uniform_open() {
    // (0, 1]: never zero, so the log below is finite.
    return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
}

double GaussianSampler::standard_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Eigen::VectorXd GaussianSampler::draw() {
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = standard_normal();
    }
    return mean_ + factor_ * z;
}

std::vector<Eigen::VectorXd> sample_gaussian(const Eigen::VectorXd& mean, const SymMatrix& cov,
                                             int count, std::uint64_t seed) {
    GaussianSampler sampler(mean, cov, seed);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(sampler.draw());
    }
    return out;
}

}  // namespace drmv

#include "genset/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace genset {

EigenPair top_eigenpair_dense(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  const Eigen::Index last = hermitian.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

EigenPair top_eigenpair_lanczos(const std::function<CVector(const CVector&)>& apply,
                                Eigen::Index dim, double tol, int max_restarts,
                                std::uint64_t seed) {
  const Eigen::Index krylov = std::min<Eigen::Index>(dim, 80);
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };

  CVector start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start(i) = {unit(), unit()};

  EigenPair best;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    CMatrix V(dim, krylov + 1);
    std::vector<double> a, b;
    V.col(0) = start / start.norm();
    Eigen::Index steps = 0;
    double last_beta = 0;
    for (Eigen::Index j = 0; j < krylov; ++j) {
      CVector w = apply(V.col(j));
      const double alpha = V.col(j).dot(w).real();
      a.push_back(alpha);
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        const CVector coeff = V.leftCols(j + 1).adjoint() * w;
        w -= V.leftCols(j + 1) * coeff;
      }
      const double beta = w.norm();
      steps = j + 1;
      last_beta = beta;
      const double scale = std::max(std::abs(alpha), 1e-300);
      if (beta <= 1e-14 * scale || j + 1 == dim) {
        last_beta = 0;
        break;
      }
      b.push_back(beta);
      V.col(j + 1) = w / beta;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index i = 0; i < steps; ++i) {
      T(i, i) = a[i];
      if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = b[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = es.eigenvalues()(steps - 1);
    const Eigen::VectorXd y = es.eigenvectors().col(steps - 1);
    CVector x = V.leftCols(steps) * y.cast<std::complex<double>>();
    x /= x.norm();
    best = {theta, x};
    const double residual = last_beta * std::abs(y(steps - 1));
    if (residual <= tol * std::max(theta, 1e-300)) break;
    start = x;
  }
  return best;
}

double spectral_norm(const CMatrix& A, Eigen::Index dense_limit) {
  if (A.size() == 0) return 0.0;
  const bool tall = A.rows() >= A.cols();
  const Eigen::Index small = tall ? A.cols() : A.rows();
  if (small <= dense_limit) {
    const CMatrix gram = tall ? CMatrix(A.adjoint() * A) : CMatrix(A * A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(small - 1)));
  }
  auto apply = [&](const CVector& v) -> CVector {
    if (tall) return A.adjoint() * (A * v);
    return A * (A.adjoint() * v);
  };
  return std::sqrt(std::max(0.0, top_eigenpair_lanczos(apply, small).value));
}

PseudoInverse pseudo_inverse(const CMatrix& A, double rank_tol) {
  Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  PseudoInverse out;
  out.singular_values = svd.singularValues();
  const Eigen::Index k = out.singular_values.size();
  out.sigma_max = k > 0 ? out.singular_values(0) : 0.0;
  out.sigma_min = k > 0 ? out.singular_values(k - 1) : 0.0;
  const double cutoff = rank_tol * out.sigma_max;
  Eigen::Index rank = 0;
  while (rank < k && out.singular_values(rank) > cutoff) ++rank;
  out.rank_deficient = rank < std::min(A.rows(), A.cols());
  const CMatrix& U = svd.matrixU();
  const CMatrix& V = svd.matrixV();
  out.pinv = V.leftCols(rank) * out.singular_values.head(rank).cwiseInverse().asDiagonal() *
             U.leftCols(rank).adjoint();
  return out;
}

}  // namespace genset

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>

namespace genset {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct EigenPair {
  double value = 0;
  CVector vector;
};

/// Largest eigenpair of a dense Hermitian matrix.
EigenPair top_eigenpair_dense(const CMatrix& hermitian);

/// Largest eigenpair of a Hermitian positive semidefinite operator by
/// restarted Lanczos with full reorthogonalisation. Stops once the residual
/// ||A v - theta v|| falls below tol * theta.
EigenPair top_eigenpair_lanczos(const std::function<CVector(const CVector&)>& apply,
                                Eigen::Index dim, double tol = 1e-13, int max_restarts = 60,
                                std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

/// Largest singular value; dense Gram eigenproblem on the smaller side up to
/// `dense_limit`, Lanczos beyond.
double spectral_norm(const CMatrix& A, Eigen::Index dense_limit = 800);

/// Moore-Penrose pseudoinverse from a thin SVD, dropping singular values
/// below rank_tol * sigma_max.
struct PseudoInverse {
  CMatrix pinv;
  RVector singular_values;  ///< all min(rows, cols) values, descending
  double sigma_min = 0;
  double sigma_max = 0;
  bool rank_deficient = false;
};

PseudoInverse pseudo_inverse(const CMatrix& A, double rank_tol);

}  // namespace genset

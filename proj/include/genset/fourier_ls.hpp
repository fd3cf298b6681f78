#pragma once

// Fourier sampling matrices, the least-squares solve and evaluation of the
// resulting trigonometric polynomials.

#include <complex>
#include <span>
#include <utility>

#include "genset/korobov.hpp"
#include "genset/linalg.hpp"
#include "genset/pointsets.hpp"

namespace genset {

inline constexpr double kDefaultRankTol = 1e-10;

/// n x m matrix with entries exp(2 pi i h_i . x_k).
struct FourierMatrix {
  CMatrix values;
  IndexSet index_set;
  bool exact_phase = false;  ///< built from rational numerators

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Phase h . x_k reduced to [0, 1). Uses exact integer arithmetic for
/// rational node lists.
double node_phase(const NodeList& nodes, std::size_t k, std::span<const std::int64_t> h);

/// Row-parallel assembly (OpenMP).
FourierMatrix assemble(const NodeList& nodes, const IndexSet& index_set);
/// Single-threaded reference assembly; bitwise identical to assemble().
FourierMatrix assemble_serial(const NodeList& nodes, const IndexSet& index_set);

/// Finite Fourier expansion sum_i c_i exp(2 pi i h_i . x).
struct FourierPolynomial {
  IndexSet index_set;
  CVector coeffs;

  FourierPolynomial(IndexSet set, CVector c);
  static FourierPolynomial zero(const IndexSet& set);

  /// sum_i |c_i|^2 / sigma_i^2.
  double h_sigma_norm_sq() const;
};

struct LSResult {
  FourierPolynomial polynomial;
  double sigma_min = 0;
  double sigma_max = 0;
  double residual_norm = 0;
  bool rank_deficient = false;
};

/// Least-squares fit through a thin SVD of the matrix.
LSResult solve(const FourierMatrix& matrix, const CVector& samples,
               double rank_tol = kDefaultRankTol);

/// Samples f exactly at the nodes and fits on index_set.
LSResult approximate(const FourierPolynomial& f, const NodeList& nodes, const IndexSet& index_set,
                     double rank_tol = kDefaultRankTol);

std::complex<double> evaluate(const FourierPolynomial& poly, std::span<const double> x);

/// (sigma_min, sigma_max) of the matrix.
std::pair<double, double> extreme_singular_values(const FourierMatrix& matrix);

}  // namespace genset

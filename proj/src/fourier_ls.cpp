#include "genset/fourier_ls.hpp"

#include <cmath>
#include <numbers>

#include "genset/errors.hpp"

namespace genset {

namespace {

// frac(h x) for integer h, with h x carried as an exact two-term sum.
double frac_product(std::int64_t h, double x) {
  const double hd = static_cast<double>(h);
  const double p = hd * x;
  const double err = std::fma(hd, x, -p);
  double f = (p - std::floor(p)) + err;
  f -= std::floor(f);
  return f;
}

std::complex<double> unit(double phase) { return std::polar(1.0, 2.0 * std::numbers::pi * phase); }

void fill_row(const NodeList& nodes, const IndexSet& set, std::size_t k, CMatrix& out) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
        unit(node_phase(nodes, k, set.frequency(i)));
  }
}

void check_dims(const NodeList& nodes, const IndexSet& set) {
  if (nodes.dim() != set.dim()) throw PreconditionError("node and index-set dimensions differ");
}

}  // namespace

double node_phase(const NodeList& nodes, std::size_t k, std::span<const std::int64_t> h) {
  const auto d = static_cast<std::size_t>(nodes.dim());
  if (const auto* rg = std::get_if<RationalGenerator>(&nodes.provenance())) {
    const auto num = nodes.numerators(k);
    std::int64_t acc = 0;
    for (std::size_t j = 0; j < d; ++j) acc = (acc + mul_mod(h[j], num[j], rg->N)) % rg->N;
    return static_cast<double>(acc) / static_cast<double>(rg->N);
  }
  const auto x = nodes.node(k);
  double phase = 0;
  for (std::size_t j = 0; j < d; ++j) phase += frac_product(h[j], x[j]);
  return phase - std::floor(phase);
}

FourierMatrix assemble(const NodeList& nodes, const IndexSet& index_set) {
  check_dims(nodes, index_set);
  FourierMatrix out{CMatrix(static_cast<Eigen::Index>(nodes.size()),
                            static_cast<Eigen::Index>(index_set.size())),
                    index_set, nodes.is_rational()};
  const auto n = static_cast<std::int64_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) fill_row(nodes, index_set, static_cast<std::size_t>(k), out.values);
  return out;
}

FourierMatrix assemble_serial(const NodeList& nodes, const IndexSet& index_set) {
  check_dims(nodes, index_set);
  FourierMatrix out{CMatrix(static_cast<Eigen::Index>(nodes.size()),
                            static_cast<Eigen::Index>(index_set.size())),
                    index_set, nodes.is_rational()};
  for (std::size_t k = 0; k < nodes.size(); ++k) fill_row(nodes, index_set, k, out.values);
  return out;
}

FourierPolynomial::FourierPolynomial(IndexSet set, CVector c)
    : index_set(std::move(set)), coeffs(std::move(c)) {
  if (static_cast<std::size_t>(coeffs.size()) != index_set.size()) {
    throw PreconditionError("coefficient count differs from index-set size");
  }
}

FourierPolynomial FourierPolynomial::zero(const IndexSet& set) {
  return {set, CVector::Zero(static_cast<Eigen::Index>(set.size()))};
}

double FourierPolynomial::h_sigma_norm_sq() const {
  double total = 0;
  for (std::size_t i = 0; i < index_set.size(); ++i) {
    const double s = index_set.sigma(i);
    total += std::norm(coeffs(static_cast<Eigen::Index>(i))) / (s * s);
  }
  return total;
}

LSResult solve(const FourierMatrix& matrix, const CVector& samples, double rank_tol) {
  if (samples.size() != matrix.rows()) throw PreconditionError("sample count differs from row count");
  if (matrix.cols() < 1) throw PreconditionError("least squares needs at least one column");
  if (matrix.rows() < matrix.cols()) throw PreconditionError("least squares needs n >= m");
  const PseudoInverse pi = pseudo_inverse(matrix.values, rank_tol);
  CVector coeffs = pi.pinv * samples;
  const double residual = (matrix.values * coeffs - samples).norm();
  return {FourierPolynomial(matrix.index_set, std::move(coeffs)), pi.sigma_min, pi.sigma_max,
          residual, pi.rank_deficient};
}

LSResult approximate(const FourierPolynomial& f, const NodeList& nodes, const IndexSet& index_set,
                     double rank_tol) {
  const CVector samples = assemble(nodes, f.index_set).values * f.coeffs;
  return solve(assemble(nodes, index_set), samples, rank_tol);
}

std::complex<double> evaluate(const FourierPolynomial& poly, std::span<const double> x) {
  const auto d = static_cast<std::size_t>(poly.index_set.dim());
  if (x.size() != d) throw PreconditionError("point dimension mismatch");
  std::complex<double> sum = 0;
  for (std::size_t i = 0; i < poly.index_set.size(); ++i) {
    const auto h = poly.index_set.frequency(i);
    double phase = 0;
    for (std::size_t j = 0; j < d; ++j) phase += frac_product(h[j], x[j]);
    sum += poly.coeffs(static_cast<Eigen::Index>(i)) * unit(phase - std::floor(phase));
  }
  return sum;
}

std::pair<double, double> extreme_singular_values(const FourierMatrix& matrix) {
  if (matrix.values.size() == 0) return {0.0, 0.0};
  Eigen::BDCSVD<CMatrix> svd(matrix.values);
  const RVector& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

}  // namespace genset

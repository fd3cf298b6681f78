#include "genset/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "genset/errors.hpp"
#include "genset/linalg.hpp"
#include "genset/primes.hpp"

namespace genset {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");
}

void require_zero_leading(const IndexSet& J, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    if (J.sup_norm(i) == 0) return;
  }
  throw PreconditionError("the zero frequency is not among the first m indices");
}

double pow_norm(std::int64_t norm, double eps) {
  return norm == 0 ? 0.0 : std::pow(static_cast<double>(norm), eps);
}

double max_norm_pow(const IndexSet& J, std::size_t m, double eps) {
  double best = 0;
  for (std::size_t i = 0; i < m; ++i) best = std::max(best, pow_norm(J.sup_norm(i), eps));
  return best;
}

bool congruent_zero(std::span<const std::int64_t> h, std::int64_t N) {
  return std::all_of(h.begin(), h.end(), [N](std::int64_t v) { return v % N == 0; });
}

}  // namespace

// ---------------------------------------------------------------- divisors

std::uint64_t divisor_sum(std::uint64_t n) {
  if (n == 0) throw DomainError("divisor_sum needs n >= 1");
  std::uint64_t count = 0;
  for (std::uint64_t i = 1; i * i <= n; ++i) {
    if (n % i == 0) count += (i * i == n) ? 1 : 2;
  }
  return 2 * count;
}

DivisorConstant c_epsilon(double eps, std::uint64_t n_max) {
  if (!(eps > 0.0)) throw DomainError("c_epsilon needs eps > 0");
  if (n_max < 1) throw DomainError("c_epsilon needs n_max >= 1");
  std::vector<std::uint32_t> tau(n_max + 1, 0);
  for (std::uint64_t i = 1; i <= n_max; ++i) {
    for (std::uint64_t j = i; j <= n_max; j += i) ++tau[j];
  }
  DivisorConstant out{eps, n_max, 0.0, 1};
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const double v = 2.0 * tau[n] / std::pow(static_cast<double>(n), eps);
    if (v > out.value) {
      out.value = v;
      out.argmax = n;
    }
  }
  // Round up until value * n^eps >= 2 tau(n) holds in floating point as well.
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    while (out.value * std::pow(static_cast<double>(n), eps) < 2.0 * tau[n]) {
      out.value = std::nextafter(out.value, kInf);
    }
  }
  return out;
}

// ---------------------------------------------------------------- surrogate

SurrogateSpace make_surrogate(const SigmaSequence& seq, std::size_t m,
                              const SurrogateOptions& options) {
  const IndexSet first = take_first_m(seq, m);
  if (!seq.is_korobov()) {
    const auto& table = seq.table_entries();
    return make_surrogate_from(seq, table.prefix(std::min(table.size(), std::max(options.cap, m))));
  }
  const double base = first.key(m - 1);
  for (double factor = std::max(options.cross_factor, 1.0);; factor = std::max(1.0, factor / 2)) {
    try {
      IndexSet J = enumerate_cross(seq.params(), factor * base, options.cap);
      return make_surrogate_from(seq, std::move(J));
    } catch (const ResourceError&) {
      if (factor == 1.0) throw;
    }
  }
}

SurrogateSpace make_surrogate_from(const SigmaSequence& seq, IndexSet J) {
  if (J.dim() != seq.dim()) throw DomainError("surrogate set dimension mismatch");
  if (!J.is_ordered()) throw DomainError("surrogate set is not in sequence order");
  const double tail2 = outside_mass_bound(seq, J);
  return {seq, std::move(J), tail2};
}

double sigma_after(const SurrogateSpace& space, std::size_t m) {
  if (space.J.size() > m) return space.J.sigma(m);
  if (space.seq.is_korobov()) return take_first_m(space.seq, m + 1).sigma(m);
  const auto& table = space.seq.table_entries();
  return table.size() > m ? table.sigma(m) : 0.0;
}

// ---------------------------------------------------------------- wce

WceReport worst_case_error_exact(const NodeList& nodes, std::size_t m, const SurrogateSpace& space,
                                 const WceOptions& options) {
  const IndexSet& J = space.J;
  const std::size_t n = nodes.size();
  if (m < 1) throw DomainError("m must be at least 1");
  if (n < m) throw PreconditionError("worst-case error needs n >= m");
  if (J.size() < m) throw DomainError("surrogate set smaller than m");
  if (static_cast<double>(n) * static_cast<double>(J.size()) > static_cast<double>(options.entry_cap)) {
    throw ResourceError("n * |J| exceeds the matrix entry cap");
  }
  // Cheap containment check; tail_sums does the full comparison elsewhere.
  const IndexSet first = take_first_m(space.seq, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = first.frequency(i);
    const auto b = J.frequency(i);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
      throw DomainError("surrogate set does not start with the first m indices");
    }
  }

  const auto mi = static_cast<Eigen::Index>(m);
  const auto ji = static_cast<Eigen::Index>(J.size());
  const auto ti = ji - mi;
  const FourierMatrix phi = assemble(nodes, J);
  const PseudoInverse pinv = pseudo_inverse(phi.values.leftCols(mi), options.rank_tol);

  RVector dsig(ji);
  for (Eigen::Index i = 0; i < ji; ++i) dsig(i) = J.sigma(static_cast<std::size_t>(i));

  const CMatrix B = phi.values.rightCols(ti) * dsig.tail(ti).asDiagonal();

  // Error operator on span J: top rows [(I - P Phi_m) D_m, -P B], bottom rows [0, D_t].
  CMatrix X(mi, ji);
  X.leftCols(mi) = (CMatrix::Identity(mi, mi) - pinv.pinv * phi.values.leftCols(mi)) *
                   dsig.head(mi).asDiagonal();
  if (ti > 0) X.rightCols(ti) = -(pinv.pinv * B);
  RVector extra = RVector::Zero(ji);
  if (ti > 0) extra.tail(ti) = dsig.tail(ti).cwiseAbs2();

  EigenPair top;
  if (J.size() <= options.dense_limit) {
    CMatrix G = X.adjoint() * X;
    G.diagonal() += extra.cast<std::complex<double>>();
    top = top_eigenpair_dense(G);
  } else {
    auto apply = [&](const CVector& v) -> CVector {
      CVector w = X.adjoint() * (X * v);
      w += extra.cast<std::complex<double>>().cwiseProduct(v);
      return w;
    };
    top = top_eigenpair_lanczos(apply, ji);
  }

  WceReport rep;
  rep.n = n;
  rep.m = m;
  rep.wce_surrogate = std::sqrt(std::max(0.0, top.value));
  rep.maximizer = dsig.cast<std::complex<double>>().cwiseProduct(top.vector);
  rep.sigma_m_plus_1 = sigma_after(space, m);
  rep.sigma_min = pinv.sigma_min;
  rep.rank_deficient = pinv.rank_deficient;
  rep.tail2 = space.tail2;
  rep.tail_block_norm = ti > 0 ? spectral_norm(B) : 0.0;

  const double outside_op = std::sqrt(static_cast<double>(n) * space.tail2);
  rep.cond.sigma_min_sq = pinv.sigma_min * pinv.sigma_min;
  rep.cond.tail_op_sq = (rep.tail_block_norm + outside_op) * (rep.tail_block_norm + outside_op);

  if (pinv.rank_deficient || !(pinv.sigma_min > 0)) {
    rep.wce_upper = kInf;
    return rep;
  }
  const double smin = pinv.sigma_min;
  const double last_sigma = J.sigma(J.size() - 1);
  const double outside_max = std::min(std::sqrt(space.tail2), last_sigma);
  // Three valid bounds; the last one is the one the acceptance thresholds control.
  const double additive = rep.wce_surrogate + outside_op / smin + std::sqrt(space.tail2);
  const double pythagorean = std::sqrt(rep.wce_surrogate * rep.wce_surrogate +
                                       outside_op * outside_op / (smin * smin) +
                                       outside_max * outside_max);
  const double projection = std::sqrt(rep.sigma_m_plus_1 * rep.sigma_m_plus_1 +
                                      rep.cond.tail_op_sq / (smin * smin));
  rep.wce_upper = std::max(rep.wce_surrogate, std::min({additive, pythagorean, projection}));
  return rep;
}

// ---------------------------------------------------------------- bounds

double general_denominator(std::size_t n, std::size_t m, double eps, const IndexSet& first_m,
                           const DivisorConstant& c) {
  const double nd = static_cast<double>(n);
  const double h = max_norm_pow(first_m, m, eps);
  return nd - std::sqrt(6.0 * c.value * std::pow(nd, 1.0 + eps) * static_cast<double>(m) * h);
}

BoundValue theorem_bound_general(std::size_t n, std::size_t m, double eps,
                                 const SurrogateSpace& space, const DivisorConstant& c) {
  require_eps(eps);
  if (m < 1 || m > n) throw PreconditionError("need 1 <= m <= n");
  require_zero_leading(space.J, m);
  const double den = general_denominator(n, m, eps, space.J, c);
  if (!(den > 0)) return BoundValue::infeasible("denominator radicand is not positive");
  const TailSums t = tail_sums(space.seq, m, eps, 1.0, space.J);
  const double s2 = t.S2 + t.remainder2;
  const double s4h = t.S4h + t.remainder4h;
  const double nd = static_cast<double>(n);
  const double num = s2 + std::sqrt(6.0 * c.value * std::pow(nd, 1.0 + eps) * s4h);
  return BoundValue::ok(sigma_after(space, m) + std::sqrt(num) / std::sqrt(den));
}

std::size_t largest_feasible_m_general(std::size_t n, double eps, const SigmaSequence& seq,
                                       const DivisorConstant& c, std::size_t m_limit) {
  const std::size_t limit = std::min(n, m_limit);
  if (limit < 1) return 0;
  const IndexSet lead = take_first_m(seq, limit);
  std::size_t best = 0;
  for (std::size_t m = 1; m <= limit; ++m) {
    if (!(general_denominator(n, m, eps, lead, c) > 0)) break;
    best = m;
  }
  return best;
}

bool m_condition_holds(std::size_t n, std::size_t m, double eps, double C1, double r,
                       const DivisorConstant& c) {
  const double lhs = std::pow(static_cast<double>(n), 1.0 - eps);
  const double rhs = 24.0 * c.value * std::pow(C1, eps) * std::pow(static_cast<double>(m), 1.0 + r * eps);
  return lhs >= rhs;
}

bool sup_norm_growth_holds(const IndexSet& J, double C1, double r) {
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (static_cast<double>(J.sup_norm(i)) > C1 * std::pow(static_cast<double>(i + 1), r)) return false;
  }
  return true;
}

RegularBound theorem_bound_regular(std::size_t n, std::size_t m, double eps, double C1, double r,
                                   const SurrogateSpace& space, const DivisorConstant& c) {
  require_eps(eps);
  if (m < 1 || m > n) throw PreconditionError("need 1 <= m <= n");
  require_zero_leading(space.J, m);
  if (!sup_norm_growth_holds(space.J, C1, r)) {
    const auto b = BoundValue::infeasible("sup-norm growth condition fails on J");
    return {b, b};
  }
  if (!m_condition_holds(n, m, eps, C1, r, c)) {
    const auto b = BoundValue::infeasible("m condition n^{1-eps} >= 24 C C1^eps m^{1+r eps} fails");
    return {b, b};
  }
  const TailSums t = tail_sums(space.seq, m, eps, r, space.J);
  const double s2 = t.S2 + t.remainder2;
  const double s4w = t.S4w + t.remainder4;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double sig = sigma_after(space, m);
  const double nf = sig + std::sqrt(2.0 / nd * s2 +
                                    std::sqrt(24.0 * c.value * std::pow(C1, eps) *
                                              std::pow(nd, eps - 1.0) * s4w));
  const double mf = sig + std::sqrt(s2 / md + std::sqrt(s4w / std::pow(md, 1.0 + r * eps)));
  return {BoundValue::ok(nf), BoundValue::ok(mf)};
}

RationalBound rational_theorem_bound(std::size_t n, std::size_t m, double eps, double C1, double r,
                                     std::int64_t N, const SurrogateSpace& space,
                                     const DivisorConstant& c) {
  require_eps(eps);
  if (!is_prime(N)) throw PreconditionError("modulus N is not prime");
  if (m < 1 || m > n) throw PreconditionError("need 1 <= m <= n");
  require_zero_leading(space.J, m);
  const IndexSet& J = space.J;
  const double nd = static_cast<double>(n);

  RationalBound out;
  for (std::size_t i = m; i < J.size(); ++i) {
    const double s2 = J.sigma(i) * J.sigma(i);
    if (congruent_zero(J.frequency(i), N)) out.aliased_J += s2;
    if (2.0 * nd * static_cast<double>(J.sup_norm(i)) > static_cast<double>(N)) out.far_J += s2;
  }
  const TailSums t = tail_sums(space.seq, m, eps, r, J);
  out.aliased = out.aliased_J + t.remainder2;
  out.far = out.far_J + t.remainder2;
  out.tail2_total = t.S2 + t.remainder2;

  for (std::size_t i = 0; i < m; ++i) {
    if (!(static_cast<double>(N) > 4.0 * nd * static_cast<double>(J.sup_norm(i)))) {
      out.bound = BoundValue::infeasible("N <= 4 n ||h_i|| for some i <= m");
      return out;
    }
  }
  if (!sup_norm_growth_holds(J, C1, r)) {
    out.bound = BoundValue::infeasible("sup-norm growth condition fails on J");
    return out;
  }
  if (!m_condition_holds(n, m, eps, C1, r, c)) {
    out.bound = BoundValue::infeasible("m condition n^{1-eps} >= 24 C C1^eps m^{1+r eps} fails");
    return out;
  }
  const double s4w = t.S4w + t.remainder4;
  const double inner = 24.0 * c.value * std::pow(C1, eps) * std::pow(nd, eps - 1.0) * s4w +
                       24.0 / nd * out.tail2_total * out.far;
  const double outer = 2.0 * out.aliased + 2.0 / nd * out.tail2_total + std::sqrt(inner);
  out.bound = BoundValue::ok(sigma_after(space, m) + std::sqrt(outer));
  return out;
}

namespace {

KorobovBound korobov_common(std::size_t n, double eps, double lambda, const KorobovParams& params,
                            const DivisorConstant& c, double tol, double constant) {
  require_eps(eps);
  if (!(lambda > 0.5 && lambda < params.alpha())) throw DomainError("lambda must lie in (1/2, alpha)");
  KorobovBound out;
  out.eps = eps;
  out.lambda = lambda;
  out.mu = mu(lambda, params, tol);
  const double nd = static_cast<double>(n);
  const double rate = (1.0 - eps) / (1.0 + eps);
  out.M = std::pow(std::pow(nd, 1.0 - eps) / (24.0 * c.value), lambda / (1.0 + eps)) *
          std::pow(out.mu, -lambda);
  out.m = enumerate_cross(params, out.M).size();
  out.nM_condition = std::pow(static_cast<double>(out.m), lambda) * std::pow(out.mu, -lambda) >
                     1.0 / params.weight(0);
  out.bound = constant * std::pow(24.0 * c.value * out.mu * std::pow(nd, -rate), lambda);
  out.feasible = out.nM_condition;
  if (!out.feasible) out.reason = "n too small: |A(M)|^lambda mu^-lambda <= 1/gamma_empty";
  return out;
}

}  // namespace

KorobovBound korobov_bound(std::size_t n, double eps, double lambda, const KorobovParams& params,
                           const DivisorConstant& c, double tol) {
  return korobov_common(n, eps, lambda, params, c, tol, 3.0);
}

KorobovBound korobov_rational_bound(std::size_t n, double eps, double lambda,
                                    const KorobovParams& params, const DivisorConstant& c,
                                    double tol) {
  KorobovBound out = korobov_common(n, eps, lambda, params, c, tol, 4.0);
  const double alpha = params.alpha();
  const double expo = 2.0 + 1.0 / (2.0 * alpha - alpha / lambda);
  out.N = next_prime_at_least(2.0 * std::pow(static_cast<double>(n), expo));
  return out;
}

RatePrediction sobolev_rate_prediction(double alpha, double beta, double r, double eps) {
  if (!(alpha > 0.5)) throw DomainError("alpha must exceed 1/2");
  require_eps(eps);
  return {(1.0 - eps) / (1.0 + r * eps) * alpha, beta};
}

}  // namespace genset

#include "genset/korobov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "genset/errors.hpp"

namespace genset {

namespace {

constexpr int kMaxDim = 20;

std::uint32_t support_mask(std::span<const std::int64_t> h) {
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] != 0) mask |= 1u << j;
  }
  return mask;
}

// Every r value in the library goes through this one expression so that
// cross membership and ordering agree bit for bit.
double r_from_product(double product, double gamma, double alpha) {
  return std::pow(product, alpha) / gamma;
}

bool lex_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::int64_t sup_norm_of(std::span<const std::int64_t> h) {
  std::int64_t s = 0;
  for (auto v : h) s = std::max<std::int64_t>(s, v < 0 ? -v : v);
  return s;
}

// Interior grid of (1/2, alpha) for the Rankin-type tail bounds.
std::vector<double> lambda_grid(double alpha, int points = 24) {
  std::vector<double> grid;
  grid.reserve(points);
  for (int k = 1; k <= points; ++k) {
    grid.push_back(0.5 + (alpha - 0.5) * k / (points + 1.0));
  }
  return grid;
}

void require_prefix_of_sequence(const SigmaSequence& seq, std::size_t m, const IndexSet& J) {
  if (J.dim() != seq.dim()) throw DomainError("surrogate set dimension mismatch");
  if (m < 1) throw DomainError("m must be at least 1");
  if (J.size() < m) throw DomainError("surrogate set smaller than m");
  const IndexSet first = take_first_m(seq, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = first.frequency(i);
    const auto b = J.frequency(i);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
      throw DomainError("surrogate set does not contain the first m indices");
    }
  }
}

struct KorobovTail {
  double mass2;
  double mass4w;
  double mass4h;
};

// Bounds on sums over h outside J. Uses sum_{h not in J} r^{-1/lambda} =
// mu(lambda) - sum_{h in J} r^{-1/lambda} together with r(h) >= floor
// outside J, and i <= |A(r(h_i))| <= r(h_i)^{1/lambda'} mu(lambda').
KorobovTail korobov_outside_bounds(const KorobovParams& params, const IndexSet& J, double eps,
                                   double r_exp, bool want4) {
  const auto floor = J.outside_key_floor();
  if (!floor) throw DomainError("surrogate set has no outside floor (not a cross or prefix)");
  const double R = std::max(*floor, 1.0);
  const double alpha = params.alpha();
  const auto grid = lambda_grid(alpha);

  std::vector<double> mus(grid.size());
  std::vector<double> residual(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double lam = grid[g];
    mus[g] = mu(lam, params);
    long double inside = 0;
    for (std::size_t i = 0; i < J.size(); ++i) inside += std::pow(J.key(i), -1.0 / lam);
    const double diff = static_cast<double>(static_cast<long double>(mus[g]) - inside);
    residual[g] = std::max(0.0, diff) + 1e-11 * mus[g];
  }

  const double inf = std::numeric_limits<double>::infinity();
  KorobovTail out{inf, inf, inf};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double lam = grid[g];
    out.mass2 = std::min(out.mass2, std::pow(R, 1.0 / lam - 2.0) * residual[g]);
    if (!want4) continue;
    const double eh = eps / alpha + 1.0 / lam - 4.0;
    if (eh <= 0) out.mass4h = std::min(out.mass4h, std::pow(R, eh) * residual[g]);
    for (std::size_t g2 = 0; g2 < grid.size(); ++g2) {
      const double lam2 = grid[g2];
      const double ew = r_exp * eps / lam2 + 1.0 / lam - 4.0;
      if (ew > 0) continue;
      const double v = std::pow(mus[g2], r_exp * eps) * std::pow(R, ew) * residual[g];
      out.mass4w = std::min(out.mass4w, v);
    }
  }
  return out;
}

void require_table_prefix(const IndexSet& table, const IndexSet& J) {
  if (J.size() > table.size()) throw DomainError("surrogate set larger than the table support");
  for (std::size_t i = 0; i < J.size(); ++i) {
    const auto a = table.frequency(i);
    const auto b = J.frequency(i);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
      throw DomainError("surrogate set is not a prefix of the table ordering");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- params

KorobovParams::KorobovParams(int d, double alpha, std::vector<double> subset_weights)
    : d_(d), alpha_(alpha), weights_(std::move(subset_weights)) {
  if (d < 1 || d > kMaxDim) throw DomainError("dimension must lie in [1, 20]");
  if (!(alpha > 0.5)) throw DomainError("smoothness alpha must exceed 1/2");
  if (weights_.size() != (std::size_t{1} << d)) {
    throw DomainError("expected 2^d subset weights");
  }
  for (double g : weights_) {
    if (!(g > 0.0 && g <= 1.0)) throw DomainError("subset weights must lie in (0, 1]");
  }
  max_weight_ = *std::max_element(weights_.begin(), weights_.end());
}

KorobovParams KorobovParams::product(double alpha, std::span<const double> gamma) {
  const int d = static_cast<int>(gamma.size());
  if (d < 1 || d > kMaxDim) throw DomainError("dimension must lie in [1, 20]");
  std::vector<double> w(std::size_t{1} << d, 1.0);
  for (std::size_t mask = 1; mask < w.size(); ++mask) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) {
      if (mask & (std::size_t{1} << j)) prod *= gamma[j];
    }
    w[mask] = prod;
  }
  return KorobovParams(d, alpha, std::move(w));
}

KorobovParams KorobovParams::unweighted(int d, double alpha) {
  if (d < 1 || d > kMaxDim) throw DomainError("dimension must lie in [1, 20]");
  return KorobovParams(d, alpha, std::vector<double>(std::size_t{1} << d, 1.0));
}

double r_alpha_gamma(std::span<const std::int64_t> h, const KorobovParams& params) {
  if (static_cast<int>(h.size()) != params.dim()) throw DomainError("frequency dimension mismatch");
  double product = 1.0;
  for (auto v : h) {
    if (v != 0) product *= static_cast<double>(v < 0 ? -v : v);
  }
  return r_from_product(product, params.weight(support_mask(h)), params.alpha());
}

// ---------------------------------------------------------------- index set

IndexSet::IndexSet(int d) : d_(d) {
  if (d < 1) throw DomainError("dimension must be positive");
}

std::int64_t IndexSet::sup_norm(std::size_t i) const { return sup_norm_of(frequency(i)); }

void IndexSet::push_back(std::span<const std::int64_t> h, double sigma, double key) {
  if (static_cast<int>(h.size()) != d_) throw DomainError("frequency dimension mismatch");
  freq_.insert(freq_.end(), h.begin(), h.end());
  sigma_.push_back(sigma);
  key_.push_back(key);
}

bool frequency_order_less(double key_a, std::span<const std::int64_t> a, double key_b,
                          std::span<const std::int64_t> b) {
  if (key_a != key_b) return key_a < key_b;
  const auto na = sup_norm_of(a);
  const auto nb = sup_norm_of(b);
  if (na != nb) return na < nb;
  return lex_less(a, b);
}

void IndexSet::sort() {
  std::vector<std::size_t> perm(size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return frequency_order_less(key_[a], frequency(a), key_[b], frequency(b));
  });
  std::vector<std::int64_t> freq;
  std::vector<double> sigma;
  std::vector<double> key;
  freq.reserve(freq_.size());
  sigma.reserve(size());
  key.reserve(size());
  for (auto p : perm) {
    const auto h = frequency(p);
    freq.insert(freq.end(), h.begin(), h.end());
    sigma.push_back(sigma_[p]);
    key.push_back(key_[p]);
  }
  freq_ = std::move(freq);
  sigma_ = std::move(sigma);
  key_ = std::move(key);
}

bool IndexSet::is_ordered() const {
  for (std::size_t i = 1; i < size(); ++i) {
    if (!frequency_order_less(key_[i - 1], frequency(i - 1), key_[i], frequency(i))) return false;
  }
  return true;
}

IndexSet IndexSet::prefix(std::size_t m) const {
  if (m > size()) throw ExhaustionError("prefix longer than the index set");
  IndexSet out(d_);
  out.freq_.assign(freq_.begin(), freq_.begin() + static_cast<std::ptrdiff_t>(m * d_));
  out.sigma_.assign(sigma_.begin(), sigma_.begin() + static_cast<std::ptrdiff_t>(m));
  out.key_.assign(key_.begin(), key_.begin() + static_cast<std::ptrdiff_t>(m));
  if (floor_) out.floor_ = m < size() ? key_[m] : *floor_;
  return out;
}

std::optional<std::size_t> IndexSet::find(std::span<const std::int64_t> h) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto f = frequency(i);
    if (std::equal(f.begin(), f.end(), h.begin(), h.end())) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- sequence

SigmaSequence SigmaSequence::korobov(KorobovParams params) {
  SigmaSequence s;
  s.params_ = std::move(params);
  return s;
}

SigmaSequence SigmaSequence::table(int d, const std::vector<TableEntry>& entries) {
  IndexSet set(d);
  std::map<std::vector<std::int64_t>, int> seen;
  for (const auto& e : entries) {
    if (!(e.sigma > 0.0)) throw DomainError("table sigma values must be positive");
    if (!seen.emplace(e.h, 0).second) throw DomainError("duplicate frequency in sigma table");
    set.push_back(e.h, e.sigma, -e.sigma);
  }
  set.sort();
  // Frequencies outside the support have sigma = 0, i.e. key 0.
  set.set_outside_key_floor(0.0);
  SigmaSequence s;
  s.table_ = std::move(set);
  return s;
}

int SigmaSequence::dim() const noexcept { return params_ ? params_->dim() : table_->dim(); }

const KorobovParams& SigmaSequence::params() const {
  if (!params_) throw DomainError("sigma sequence is not a Korobov source");
  return *params_;
}

const IndexSet& SigmaSequence::table_entries() const {
  if (!table_) throw DomainError("sigma sequence is not an explicit table");
  return *table_;
}

double SigmaSequence::sigma(std::span<const std::int64_t> h) const {
  if (params_) return 1.0 / r_alpha_gamma(h, *params_);
  const auto pos = table_->find(h);
  return pos ? table_->sigma(*pos) : 0.0;
}

double SigmaSequence::key(std::span<const std::int64_t> h) const {
  if (params_) return r_alpha_gamma(h, *params_);
  return -sigma(h);
}

// ---------------------------------------------------------------- crosses

IndexSet enumerate_cross(const KorobovParams& params, double M, std::size_t cap) {
  if (!(M >= 0.0)) throw DomainError("cross radius must be nonnegative");
  const int d = params.dim();
  const double alpha = params.alpha();
  IndexSet out(d);
  out.set_outside_key_floor(M);

  // r(h) >= P^alpha / max gamma, so P <= (M max gamma)^{1/alpha} bounds every branch.
  const double product_limit = std::pow(M * params.max_weight(), 1.0 / alpha) * (1.0 + 1e-12);
  if (product_limit < 1.0) return out;
  const std::size_t visit_cap = 20 * cap + 1'000'000;
  std::size_t visits = 0;

  std::vector<std::int64_t> h(static_cast<std::size_t>(d), 0);
  auto recurse = [&](auto&& self, int j, double product, std::uint32_t mask) -> void {
    if (j == d) {
      if (++visits > visit_cap) throw ResourceError("hyperbolic cross enumeration exceeded cap");
      const double r = r_from_product(product, params.weight(mask), alpha);
      if (r <= M) {
        if (out.size() >= cap) throw ResourceError("hyperbolic cross exceeds cardinality cap");
        out.push_back(h, 1.0 / r, r);
      }
      return;
    }
    h[j] = 0;
    self(self, j + 1, product, mask);
    for (std::int64_t v = 1; product * static_cast<double>(v) <= product_limit; ++v) {
      const double next = product * static_cast<double>(v);
      h[j] = -v;
      self(self, j + 1, next, mask | (1u << j));
      h[j] = v;
      self(self, j + 1, next, mask | (1u << j));
    }
    h[j] = 0;
  };
  recurse(recurse, 0, 1.0, 0u);
  out.sort();
  return out;
}

std::uint64_t unweighted_cross_cardinality(int d, double M) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!(M >= 1.0)) return 0;
  // The product of nonzero |h_j| is an integer, so only floor(M) matters and
  // floor(floor(M)/h) = floor(M/h) keeps the recursion in exact arithmetic.
  const auto K = static_cast<std::uint64_t>(std::floor(M));
  std::map<std::pair<int, std::uint64_t>, std::uint64_t> memo;
  auto card = [&](auto&& self, int dim, std::uint64_t k) -> std::uint64_t {
    if (k == 0) return 0;
    if (dim == 1) return 1 + 2 * k;
    const auto it = memo.find({dim, k});
    if (it != memo.end()) return it->second;
    std::uint64_t total = self(self, dim - 1, k);
    for (std::uint64_t h = 1; h <= k; ++h) total += 2 * self(self, dim - 1, k / h);
    memo.emplace(std::pair{dim, k}, total);
    return total;
  };
  return card(card, d, K);
}

IndexSet take_first_m(const SigmaSequence& seq, std::size_t m) {
  if (m < 1) throw DomainError("m must be at least 1");
  if (!seq.is_korobov()) {
    const auto& table = seq.table_entries();
    if (table.size() < m) throw ExhaustionError("sigma table has fewer than m entries");
    return table.prefix(m);
  }
  const auto& params = seq.params();
  double M = 1.0 / params.weight(0);
  for (;;) {
    IndexSet cross = enumerate_cross(params, M);
    if (cross.size() >= m) return cross.prefix(m);
    M *= 2.0;
  }
}

// ---------------------------------------------------------------- zeta, mu

double riemann_zeta(double s, double tol) {
  if (!(s > 1.0)) throw DomainError("zeta requires s > 1");
  // Euler-Maclaurin: sum_{k<N} k^-s + N^{1-s}/(s-1) + N^-s/2 + Bernoulli corrections.
  constexpr double kB[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0};
  constexpr double kFact[] = {2.0, 24.0, 720.0, 40320.0};
  auto correction_term = [&](int j, double N) {
    double rising = 1.0;  // s (s+1) ... (s+2j-2)
    for (int q = 0; q < 2 * j + 1; ++q) rising *= (s + q);
    return kB[j] / kFact[j] * rising * std::pow(N, -s - 2 * j - 1);
  };
  double N = 8;
  while (std::abs(correction_term(3, N)) > 0.1 * tol && N < 1e6) N *= 2;

  long double sum = 0;
  for (long k = static_cast<long>(N) - 1; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -s);
  sum += std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  for (int j = 0; j < 3; ++j) sum += correction_term(j, N);
  return static_cast<double>(sum);
}

double mu(double lambda, const KorobovParams& params, double tol) {
  if (!(lambda > 0.5) || !(lambda < params.alpha())) {
    throw DomainError("mu requires 1/2 < lambda < alpha");
  }
  const double two_zeta = 2.0 * riemann_zeta(params.alpha() / lambda, tol / 4.0);
  const auto weights = params.subset_weights();
  long double total = 0;
  for (std::size_t mask = 0; mask < weights.size(); ++mask) {
    total += std::pow(weights[mask], 1.0 / lambda) *
             std::pow(two_zeta, std::popcount(static_cast<std::uint32_t>(mask)));
  }
  return static_cast<double>(total);
}

std::complex<double> kernel_eval(std::span<const double> x, std::span<const double> y,
                                 const IndexSet& index_set) {
  const auto d = static_cast<std::size_t>(index_set.dim());
  if (x.size() != d || y.size() != d) throw DomainError("point dimension mismatch");
  std::complex<double> sum = 0;
  for (std::size_t i = 0; i < index_set.size(); ++i) {
    const auto h = index_set.frequency(i);
    double phase = 0;
    for (std::size_t j = 0; j < d; ++j) phase += static_cast<double>(h[j]) * (x[j] - y[j]);
    phase -= std::floor(phase);
    const double s2 = index_set.sigma(i) * index_set.sigma(i);
    sum += s2 * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return sum;
}

// ---------------------------------------------------------------- tails

TailSums tail_sums(const SigmaSequence& seq, std::size_t m, double eps, double r,
                   const IndexSet& J) {
  require_prefix_of_sequence(seq, m, J);
  TailSums out;
  long double s2 = 0, s4w = 0, s4h = 0;
  for (std::size_t i = m; i < J.size(); ++i) {
    const long double s = J.sigma(i);
    const long double s4 = s * s * s * s;
    s2 += s * s;
    s4w += std::pow(static_cast<long double>(i + 1), r * eps) * s4;
    const auto norm = J.sup_norm(i);
    if (norm > 0) s4h += std::pow(static_cast<long double>(norm), eps) * s4;
  }
  out.S2 = static_cast<double>(s2);
  out.S4w = static_cast<double>(s4w);
  out.S4h = static_cast<double>(s4h);

  if (seq.is_korobov()) {
    const auto tail = korobov_outside_bounds(seq.params(), J, eps, r, true);
    out.remainder2 = tail.mass2;
    out.remainder4 = tail.mass4w;
    out.remainder4h = tail.mass4h;
  } else {
    const auto& table = seq.table_entries();
    require_table_prefix(table, J);
    long double r2 = 0, r4 = 0, r4h = 0;
    for (std::size_t i = J.size(); i < table.size(); ++i) {
      const long double s = table.sigma(i);
      const long double s4 = s * s * s * s;
      r2 += s * s;
      r4 += std::pow(static_cast<long double>(i + 1), r * eps) * s4;
      const auto norm = table.sup_norm(i);
      if (norm > 0) r4h += std::pow(static_cast<long double>(norm), eps) * s4;
    }
    out.remainder2 = static_cast<double>(r2);
    out.remainder4 = static_cast<double>(r4);
    out.remainder4h = static_cast<double>(r4h);
  }
  return out;
}

double outside_mass_bound(const SigmaSequence& seq, const IndexSet& J) {
  if (seq.is_korobov()) return korobov_outside_bounds(seq.params(), J, 1.0, 1.0, false).mass2;
  const auto& table = seq.table_entries();
  require_table_prefix(table, J);
  long double r2 = 0;
  for (std::size_t i = J.size(); i < table.size(); ++i) r2 += table.sigma(i) * table.sigma(i);
  return static_cast<double>(r2);
}

}  // namespace genset

#pragma once

// Function-space data for the weighted Korobov space and general
// sigma-sequences: weights, the decay sequence and its deterministic
// ordering, weighted hyperbolic crosses, mu(lambda), kernel and tail sums.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace genset {

inline constexpr std::size_t kDefaultCrossCap = 10'000'000;

/// Dimension, smoothness and subset weights gamma_u of a weighted Korobov space.
///
/// Subset weights are stored densely, indexed by the bitmask of u
/// (bit j-1 set iff j is in u), so d is limited to 20.
class KorobovParams {
 public:
  /// General weights; `subset_weights[mask]` is gamma_u, size must be 2^d.
  KorobovParams(int d, double alpha, std::vector<double> subset_weights);

  /// Product weights gamma_u = prod_{j in u} gamma_j, gamma_empty = 1.
  static KorobovParams product(double alpha, std::span<const double> gamma);
  static KorobovParams unweighted(int d, double alpha);

  int dim() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }
  double weight(std::uint32_t mask) const { return weights_.at(mask); }
  double max_weight() const noexcept { return max_weight_; }
  std::span<const double> subset_weights() const noexcept { return weights_; }

 private:
  int d_;
  double alpha_;
  std::vector<double> weights_;
  double max_weight_;
};

/// r_{alpha,gamma}(h) = gamma_{supp h}^{-1} prod_{j in supp h} |h_j|^alpha.
double r_alpha_gamma(std::span<const std::int64_t> h, const KorobovParams& params);

/// Ordered list of distinct integer frequencies with their sigma values.
///
/// Each entry also carries an ordering key: entries are ordered by key
/// ascending, then sup-norm ascending, then lexicographically. For Korobov
/// sources the key is r_{alpha,gamma}(h); for explicit tables it is -sigma.
class IndexSet {
 public:
  explicit IndexSet(int d);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return sigma_.size(); }
  bool empty() const noexcept { return sigma_.empty(); }

  std::span<const std::int64_t> frequency(std::size_t i) const {
    return {freq_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  double sigma(std::size_t i) const { return sigma_[i]; }
  double key(std::size_t i) const { return key_[i]; }
  std::int64_t sup_norm(std::size_t i) const;

  void push_back(std::span<const std::int64_t> h, double sigma, double key);
  void push_back(std::initializer_list<std::int64_t> h, double sigma, double key = 0.0) {
    push_back(std::span<const std::int64_t>(h.begin(), h.size()), sigma, key);
  }

  /// Sort into the deterministic total order.
  void sort();
  bool is_ordered() const;

  /// The first m entries; the outside floor becomes key(m-1).
  IndexSet prefix(std::size_t m) const;

  /// Position of h, if present (linear scan).
  std::optional<std::size_t> find(std::span<const std::int64_t> h) const;

  /// Every frequency outside this set has key >= the floor. Set by cross
  /// enumeration and prefix extraction; needed for analytic tail bounds.
  std::optional<double> outside_key_floor() const noexcept { return floor_; }
  void set_outside_key_floor(double floor) noexcept { floor_ = floor; }

 private:
  int d_;
  std::vector<std::int64_t> freq_;
  std::vector<double> sigma_;
  std::vector<double> key_;
  std::optional<double> floor_;
};

/// Compares two index-set entries under the deterministic ordering.
bool frequency_order_less(double key_a, std::span<const std::int64_t> a, double key_b,
                          std::span<const std::int64_t> b);

struct TableEntry {
  std::vector<std::int64_t> h;
  double sigma;
};

/// The decay sequence sigma_h together with its ordering h_1, h_2, ...
class SigmaSequence {
 public:
  static SigmaSequence korobov(KorobovParams params);
  /// Finite explicit table; every sigma must be positive and frequencies distinct.
  static SigmaSequence table(int d, const std::vector<TableEntry>& entries);

  int dim() const noexcept;
  bool is_korobov() const noexcept { return params_.has_value(); }
  const KorobovParams& params() const;
  /// Sorted table (explicit sources only).
  const IndexSet& table_entries() const;

  double sigma(std::span<const std::int64_t> h) const;
  double key(std::span<const std::int64_t> h) const;

 private:
  SigmaSequence() = default;
  std::optional<KorobovParams> params_;
  std::optional<IndexSet> table_;
};

/// A_{d,alpha,gamma}(M) = {h : r(h) <= M}, sorted. Throws ResourceError when
/// the set grows beyond `cap` entries.
IndexSet enumerate_cross(const KorobovParams& params, double M,
                         std::size_t cap = kDefaultCrossCap);

/// |A_d(M)| of the unweighted cross via the dimension recurrence.
std::uint64_t unweighted_cross_cardinality(int d, double M);

/// The first m indices of the ordering.
IndexSet take_first_m(const SigmaSequence& seq, std::size_t m);

/// Riemann zeta for real s > 1 by Euler-Maclaurin summation with absolute
/// error below `tol`.
double riemann_zeta(double s, double tol = 1e-13);

/// mu(lambda) = sum_u gamma_u^{1/lambda} (2 zeta(alpha/lambda))^{|u|}, 1/2 < lambda < alpha.
double mu(double lambda, const KorobovParams& params, double tol = 1e-12);

/// Truncated kernel sum_i sigma_i^2 exp(2 pi i h_i.(x - y)).
std::complex<double> kernel_eval(std::span<const double> x, std::span<const double> y,
                                 const IndexSet& index_set);

struct TailSums {
  double S2 = 0;    ///< sum_{m < i <= |J|} sigma_i^2
  double S4w = 0;   ///< sum_{m < i <= |J|} i^{r eps} sigma_i^4
  double S4h = 0;   ///< sum_{m < i <= |J|} ||h_i||_inf^eps sigma_i^4
  double remainder2 = 0;   ///< upper bound on sum_{h not in J} sigma_h^2
  double remainder4 = 0;   ///< upper bound on sum_{i > |J|} i^{r eps} sigma_i^4
  double remainder4h = 0;  ///< upper bound on sum_{i > |J|} ||h_i||^eps sigma_i^4
};

/// Tail sums over the surrogate set J beyond the first m indices, plus
/// analytic bounds for everything outside J. J must start with the first m
/// indices of `seq` and (for Korobov sources) carry an outside floor.
TailSums tail_sums(const SigmaSequence& seq, std::size_t m, double eps, double r,
                   const IndexSet& J);

/// Upper bound on sum_{h not in J} sigma_h^2 (independent of m).
double outside_mass_bound(const SigmaSequence& seq, const IndexSet& J);

}  // namespace genset

#pragma once

// Moments of ||A* t||^2 and ||A t||^2 for the random matrices
// A = [a_i exp(2 pi i k h_i . zeta)]: closed forms, variance bounds,
// exhaustive averages over rational generators and Monte Carlo estimates.

#include <cstdint>
#include <span>
#include <vector>

#include "genset/error_analysis.hpp"
#include "genset/linalg.hpp"

namespace genset {

struct WeightedEntry {
  double a;
  std::vector<std::int64_t> h;
};

/// Non-increasing weights a_i with distinct frequencies h_i, and a row count n.
class WeightedSystem {
 public:
  WeightedSystem(int d, std::size_t n, std::vector<WeightedEntry> entries);
  /// Entries begin..J.size() of J with a_i = sigma_i.
  static WeightedSystem from_index_set(const IndexSet& J, std::size_t begin, std::size_t n);

  int dim() const noexcept { return d_; }
  std::size_t rows() const noexcept { return n_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double a(std::size_t i) const { return entries_[i].a; }
  std::span<const std::int64_t> h(std::size_t i) const { return entries_[i].h; }
  std::int64_t sup_norm(std::size_t i) const;
  std::int64_t max_sup_norm() const;

 private:
  int d_;
  std::size_t n_;
  std::vector<WeightedEntry> entries_;
};

enum class Moment { A_star, A };

struct MomentEstimate {
  double mean = 0;
  double variance = 0;  ///< unbiased sample variance
  std::size_t trials = 0;
  double std_error = 0;  ///< sqrt(variance / trials)
};

/// sum_i a_i^2 sum_{k,l} t_k conj(t_l) 1(k h_i = l h_i).
double expected_A_star_t(const WeightedSystem& sys, const CVector& t);
/// n sum_i a_i^2 |t_i|^2.
double expected_A_t(const WeightedSystem& sys, const CVector& t);
/// 2 C n^{1+eps} sum_{h_i != 0} a_i^4 ||h_i||^eps.
double variance_bound_A_star(const WeightedSystem& sys, double eps, const DivisorConstant& c);
/// 2 C n^{1+eps} max a_i^2 (sum a_i^2 ||h_i||^{2 eps})^{1/2} (sum a_i^2)^{1/2}.
double variance_bound_A(const WeightedSystem& sys, double eps, const DivisorConstant& c);

/// Exact mean of ||A* t||^2 over z in {1..N}^d when N > 2n:
/// |sum t|^2 sum_{h_i = 0 mod N} a_i^2 + ||t||^2 sum_{h_i != 0 mod N} a_i^2.
double expected_A_star_t_rational(const WeightedSystem& sys, const CVector& t, std::int64_t N);
/// Variance bound for ||A* t||^2 over rational z, including the far-frequency term.
double variance_bound_A_star_rational(const WeightedSystem& sys, double eps,
                                      const DivisorConstant& c, std::int64_t N);

/// ||A* t||^2 or ||A t||^2 for one continuous generator.
double quadratic_form(const WeightedSystem& sys, Moment which, const CVector& t,
                      std::span<const double> zeta);
/// The same for a rational generator, with exact phase reduction.
double quadratic_form_rational(const WeightedSystem& sys, Moment which, const CVector& t,
                               std::span<const std::int64_t> z, std::int64_t N);

struct ExhaustiveMoments {
  double mean = 0;
  double variance = 0;  ///< population variance over all z
  std::uint64_t count = 0;
  bool outside_hypothesis = false;  ///< N too small for the closed forms to apply
};

inline constexpr std::uint64_t kExhaustiveCap = 10'000'000;

/// Average over every z in {1..N}^d (OpenMP over z).
ExhaustiveMoments exhaustive_rational_moments(const WeightedSystem& sys, const CVector& t,
                                              std::int64_t N, Moment which,
                                              std::uint64_t cap = kExhaustiveCap);
ExhaustiveMoments exhaustive_rational_moments_serial(const WeightedSystem& sys, const CVector& t,
                                                     std::int64_t N, Moment which,
                                                     std::uint64_t cap = kExhaustiveCap);

/// Monte Carlo over zeta uniform in [0,1)^d; trial j uses variates j*d .. j*d+d-1
/// of the seeded counter stream, so the estimate does not depend on threading.
MomentEstimate mc_moments(const WeightedSystem& sys, const CVector& t, std::size_t trials,
                          std::uint64_t seed, Moment which);
MomentEstimate mc_moments_serial(const WeightedSystem& sys, const CVector& t, std::size_t trials,
                                 std::uint64_t seed, Moment which);

}  // namespace genset

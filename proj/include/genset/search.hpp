#pragma once

// Random generator search with the two spectral acceptance conditions:
// a lower threshold on sigma_min(Phi_m)^2 and an upper threshold on the
// squared norm of the sigma-scaled tail block.

#include <cstdint>

#include "genset/error_analysis.hpp"
#include "genset/pointsets.hpp"

namespace genset {

struct AcceptanceCriteria {
  std::size_t n = 0;
  std::size_t m = 0;
  double eps = 0;
  double threshold_min_sv_sq = 0;
  double threshold_tail_op_sq = 0;
  bool min_sv_vacuous = false;  ///< threshold_min_sv_sq <= 0, the test always passes
  bool rational = false;
  std::int64_t N = 0;

  /// n - sqrt(6 C n^{1+eps} m max ||h_i||^eps) and
  /// S2 + sqrt(6 C n^{1+eps} S4h), both with outside-J remainders.
  static AcceptanceCriteria continuous(std::size_t n, std::size_t m, double eps,
                                       const SurrogateSpace& space, const DivisorConstant& c);
  /// Same sigma_min threshold; the tail threshold adds the aliased mass and
  /// the far-frequency cross term for modulus N.
  static AcceptanceCriteria rational_modulus(std::size_t n, std::size_t m, double eps,
                                             std::int64_t N, const SurrogateSpace& space,
                                             const DivisorConstant& c);

  /// sigma_{m+1} + sqrt(tail / min_sv): what any accepted generator achieves.
  double implied_bound(const SurrogateSpace& space) const;
};

struct SearchResult {
  Generator generator;
  bool accepted = false;
  std::size_t trials_used = 0;
  std::size_t trial_index = 0;  ///< 0-based index of the returned candidate
  WceReport report;             ///< diagnostics with thresholds filled in
};

/// Evaluates one generator against the criteria.
SearchResult accept(const Generator& gen, std::size_t n, const AcceptanceCriteria& criteria,
                    const SurrogateSpace& space, const WceOptions& options = {});

/// Draws zeta uniformly (trial t uses counter positions t*d .. t*d+d-1 of
/// the seeded stream) until a candidate is accepted. Returns the accepted
/// candidate with the smallest trial index, or the smallest-wce candidate.
SearchResult search_continuous(std::size_t n, const AcceptanceCriteria& criteria,
                               const SurrogateSpace& space, std::size_t max_trials,
                               std::uint64_t seed, const WceOptions& options = {});

/// As search_continuous with z uniform on {1..N}^d. N must be prime and
/// exceed 4 n ||h_i|| for every i <= m.
SearchResult search_rational(std::size_t n, std::int64_t N, const AcceptanceCriteria& criteria,
                             const SurrogateSpace& space, std::size_t max_trials,
                             std::uint64_t seed, const WceOptions& options = {});

/// The generator drawn at trial t.
ContinuousGenerator continuous_trial(int d, std::uint64_t seed, std::size_t t);
RationalGenerator rational_trial(int d, std::int64_t N, std::uint64_t seed, std::size_t t);

}  // namespace genset

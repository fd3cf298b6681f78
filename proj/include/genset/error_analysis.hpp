#pragma once

// Worst-case errors on truncated spaces, the divisor constant, and the
// closed-form error bounds for continuous and rational generated sets.

#include <cstdint>
#include <limits>
#include <string>

#include "genset/fourier_ls.hpp"
#include "genset/korobov.hpp"
#include "genset/pointsets.hpp"

namespace genset {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- divisor bound -------------------------------------------------------

/// Number of nonzero i in [-n, n] dividing n, i.e. twice the divisor count.
std::uint64_t divisor_sum(std::uint64_t n);

struct DivisorConstant {
  double epsilon = 0;
  std::uint64_t n_max = 0;
  double value = 0;  ///< max_{n <= n_max} divisor_sum(n) / n^eps
  std::uint64_t argmax = 1;
};

DivisorConstant c_epsilon(double eps, std::uint64_t n_max);

// ---- surrogate spaces ----------------------------------------------------

struct SurrogateOptions {
  double cross_factor = 50.0;       ///< J = cross(cross_factor * r(h_m)) for Korobov sources
  std::size_t cap = 200'000;        ///< largest admissible |J|
};

/// Finite superset J of the leading indices plus a bound on the sigma^2 mass
/// outside J.
struct SurrogateSpace {
  SigmaSequence seq;
  IndexSet J;
  double tail2 = 0;
};

/// Default J for a given m. Korobov: a cross around the m-th index, shrunk
/// towards r(h_m) if the cap is hit. Tables: the whole table (or its first
/// `cap` entries).
SurrogateSpace make_surrogate(const SigmaSequence& seq, std::size_t m,
                              const SurrogateOptions& options = {});

/// Wraps an explicit J, which must be ordered and (for Korobov sources)
/// carry an outside floor; for tables it must be a prefix of the table.
SurrogateSpace make_surrogate_from(const SigmaSequence& seq, IndexSet J);

/// sigma_{m+1} of the sequence.
double sigma_after(const SurrogateSpace& space, std::size_t m);

// ---- worst-case error ----------------------------------------------------

struct ConditionDiag {
  double sigma_min_sq = 0;          ///< sigma_min(Phi_m)^2
  double tail_op_sq = 0;            ///< upper bound on ||Phi_{P,tail} D'||^2
  double threshold_min_sv_sq = 0;
  double threshold_tail_op_sq = 0;
  bool thresholds_set = false;
  bool min_sv_pass = false;
  bool tail_pass = false;
  bool min_sv_vacuous = false;      ///< threshold was <= 0
};

struct WceReport {
  std::size_t n = 0;
  std::size_t m = 0;
  double wce_surrogate = 0;   ///< exact worst-case L2 error on span J
  double wce_upper = 0;       ///< rigorous bound over the full space
  double sigma_m_plus_1 = 0;
  double sigma_min = 0;
  double tail_block_norm = 0; ///< ||Phi_{P, J minus first m} D||
  double tail2 = 0;
  bool rank_deficient = false;
  std::optional<double> bound_theorem;
  ConditionDiag cond;
  /// Coefficients on J of a unit-norm function attaining wce_surrogate.
  CVector maximizer;
};

struct WceOptions {
  double rank_tol = kDefaultRankTol;
  std::size_t dense_limit = 1200;      ///< |J| above which Lanczos is used
  std::size_t entry_cap = 20'000'000;  ///< largest admissible n * |J|
};

WceReport worst_case_error_exact(const NodeList& nodes, std::size_t m, const SurrogateSpace& space,
                                 const WceOptions& options = {});

// ---- closed-form bounds --------------------------------------------------

/// Either a finite value or a recorded reason for infeasibility.
struct BoundValue {
  bool feasible = false;
  double value = kInf;
  std::string reason;

  static BoundValue ok(double v) { return {true, v, {}}; }
  static BoundValue infeasible(std::string why) { return {false, kInf, std::move(why)}; }
};

/// Radicand n - sqrt(6 C n^{1+eps} m max_{i<=m} ||h_i||^eps) of the general bound.
double general_denominator(std::size_t n, std::size_t m, double eps, const IndexSet& first_m,
                           const DivisorConstant& c);

BoundValue theorem_bound_general(std::size_t n, std::size_t m, double eps,
                                 const SurrogateSpace& space, const DivisorConstant& c);

/// Largest m >= 1 for which the general bound's denominator stays positive
/// (0 when even m = 1 fails).
std::size_t largest_feasible_m_general(std::size_t n, double eps, const SigmaSequence& seq,
                                       const DivisorConstant& c, std::size_t m_limit = 100'000);

/// n^{1-eps} >= 24 C C1^eps m^{1 + r eps}.
bool m_condition_holds(std::size_t n, std::size_t m, double eps, double C1, double r,
                       const DivisorConstant& c);

/// ||h_i|| <= C1 i^r over every index of J.
bool sup_norm_growth_holds(const IndexSet& J, double C1, double r);

struct RegularBound {
  BoundValue n_form;
  BoundValue m_form;
};

RegularBound theorem_bound_regular(std::size_t n, std::size_t m, double eps, double C1, double r,
                                   const SurrogateSpace& space, const DivisorConstant& c);

struct RationalBound {
  BoundValue bound;
  double aliased_J = 0;    ///< sum over m < i <= |J| with h_i = 0 mod N of sigma_i^2
  double far_J = 0;        ///< sum over m < j <= |J| with 2n||h_j|| > N of sigma_j^2
  double aliased = 0;      ///< aliased_J plus the outside mass
  double far = 0;          ///< far_J plus the outside mass
  double tail2_total = 0;  ///< S2 plus the outside mass
};

RationalBound rational_theorem_bound(std::size_t n, std::size_t m, double eps, double C1, double r,
                                     std::int64_t N, const SurrogateSpace& space,
                                     const DivisorConstant& c);

struct KorobovBound {
  bool feasible = false;
  std::string reason;
  double eps = 0;
  double lambda = 0;
  double mu = 0;
  double M = 0;
  std::size_t m = 0;
  bool nM_condition = false;
  double bound = kInf;  ///< closed form, always populated
  std::int64_t N = 0;   ///< rational variant only
};

KorobovBound korobov_bound(std::size_t n, double eps, double lambda, const KorobovParams& params,
                           const DivisorConstant& c, double tol = 1e-12);
KorobovBound korobov_rational_bound(std::size_t n, double eps, double lambda,
                                    const KorobovParams& params, const DivisorConstant& c,
                                    double tol = 1e-12);

struct RatePrediction {
  double exponent = 0;   ///< (1 - eps) / (1 + r eps) * alpha
  double log_power = 0;  ///< power of the log factor, passed through
};

RatePrediction sobolev_rate_prediction(double alpha, double beta, double r, double eps);

}  // namespace genset

#include "genset/search.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include <omp.h>

#include "genset/errors.hpp"
#include "genset/primes.hpp"
#include "genset/random.hpp"

namespace genset {

namespace {

double min_sv_threshold(std::size_t n, std::size_t m, double eps, const SurrogateSpace& space,
                        const DivisorConstant& c) {
  return general_denominator(n, m, eps, space.J, c);
}

template <class Draw>
SearchResult run_search(std::size_t n, const AcceptanceCriteria& criteria,
                        const SurrogateSpace& space, std::size_t max_trials,
                        const WceOptions& options, Draw draw) {
  if (max_trials < 1) throw PreconditionError("max_trials must be at least 1");
  const std::size_t batch = static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
  std::optional<SearchResult> best;
  for (std::size_t start = 0; start < max_trials; start += batch) {
    const std::size_t stop = std::min(max_trials, start + batch);
    std::vector<std::optional<SearchResult>> results(stop - start);
    std::exception_ptr failure;
    const auto count = static_cast<std::int64_t>(stop - start);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < count; ++j) {
      try {
        const std::size_t t = start + static_cast<std::size_t>(j);
        SearchResult r = accept(draw(t), n, criteria, space, options);
        r.trial_index = t;
        results[static_cast<std::size_t>(j)] = std::move(r);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    // Scan in trial order so the outcome does not depend on scheduling.
    for (auto& r : results) {
      if (r->accepted) {
        r->trials_used = r->trial_index + 1;
        return std::move(*r);
      }
      if (!best || r->report.wce_surrogate < best->report.wce_surrogate) best = std::move(r);
    }
  }
  best->trials_used = max_trials;
  return std::move(*best);
}

}  // namespace

AcceptanceCriteria AcceptanceCriteria::continuous(std::size_t n, std::size_t m, double eps,
                                                  const SurrogateSpace& space,
                                                  const DivisorConstant& c) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("eps must lie in (0, 1]");
  if (m < 1 || m > n) throw PreconditionError("need 1 <= m <= n");
  AcceptanceCriteria out;
  out.n = n;
  out.m = m;
  out.eps = eps;
  out.threshold_min_sv_sq = min_sv_threshold(n, m, eps, space, c);
  out.min_sv_vacuous = !(out.threshold_min_sv_sq > 0);
  const TailSums t = tail_sums(space.seq, m, eps, 1.0, space.J);
  const double nd = static_cast<double>(n);
  out.threshold_tail_op_sq = (t.S2 + t.remainder2) +
                             std::sqrt(6.0 * c.value * std::pow(nd, 1.0 + eps) * (t.S4h + t.remainder4h));
  return out;
}

AcceptanceCriteria AcceptanceCriteria::rational_modulus(std::size_t n, std::size_t m, double eps,
                                                        std::int64_t N, const SurrogateSpace& space,
                                                        const DivisorConstant& c) {
  AcceptanceCriteria out = continuous(n, m, eps, space, c);
  const RationalBound parts = rational_theorem_bound(n, m, eps, 1.0, 1.0, N, space, c);
  const TailSums t = tail_sums(space.seq, m, eps, 1.0, space.J);
  const double nd = static_cast<double>(n);
  out.rational = true;
  out.N = N;
  out.threshold_tail_op_sq =
      nd * parts.aliased + parts.tail2_total +
      std::sqrt(6.0 * c.value * std::pow(nd, 1.0 + eps) * (t.S4h + t.remainder4h) +
                6.0 * nd * parts.tail2_total * parts.far);
  return out;
}

double AcceptanceCriteria::implied_bound(const SurrogateSpace& space) const {
  if (min_sv_vacuous) return kInf;
  return sigma_after(space, m) + std::sqrt(threshold_tail_op_sq / threshold_min_sv_sq);
}

ContinuousGenerator continuous_trial(int d, std::uint64_t seed, std::size_t t) {
  const CounterRng rng(seed);
  ContinuousGenerator g;
  g.zeta.resize(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < g.zeta.size(); ++j) g.zeta[j] = rng.uniform(t * g.zeta.size() + j);
  return g;
}

RationalGenerator rational_trial(int d, std::int64_t N, std::uint64_t seed, std::size_t t) {
  const CounterRng rng(seed);
  RationalGenerator g{std::vector<std::int64_t>(static_cast<std::size_t>(d)), N};
  for (std::size_t j = 0; j < g.z.size(); ++j) g.z[j] = rng.integer(t * g.z.size() + j, 1, N);
  return g;
}

SearchResult accept(const Generator& gen, std::size_t n, const AcceptanceCriteria& criteria,
                    const SurrogateSpace& space, const WceOptions& options) {
  if (criteria.n != n) throw PreconditionError("criteria were built for a different n");
  const NodeList nodes = build_nodes(gen, n);
  SearchResult out{gen, false, 1, 0, worst_case_error_exact(nodes, criteria.m, space, options)};
  auto& cond = out.report.cond;
  cond.threshold_min_sv_sq = criteria.threshold_min_sv_sq;
  cond.threshold_tail_op_sq = criteria.threshold_tail_op_sq;
  cond.thresholds_set = true;
  cond.min_sv_vacuous = criteria.min_sv_vacuous;
  cond.min_sv_pass = !out.report.rank_deficient &&
                     (criteria.min_sv_vacuous || cond.sigma_min_sq >= criteria.threshold_min_sv_sq);
  cond.tail_pass = cond.tail_op_sq <= criteria.threshold_tail_op_sq;
  out.accepted = cond.min_sv_pass && cond.tail_pass;
  return out;
}

SearchResult search_continuous(std::size_t n, const AcceptanceCriteria& criteria,
                               const SurrogateSpace& space, std::size_t max_trials,
                               std::uint64_t seed, const WceOptions& options) {
  if (criteria.rational) throw PreconditionError("rational criteria passed to a continuous search");
  const int d = space.J.dim();
  return run_search(n, criteria, space, max_trials, options,
                    [&](std::size_t t) { return Generator(continuous_trial(d, seed, t)); });
}

SearchResult search_rational(std::size_t n, std::int64_t N, const AcceptanceCriteria& criteria,
                             const SurrogateSpace& space, std::size_t max_trials,
                             std::uint64_t seed, const WceOptions& options) {
  if (!is_prime(N)) throw PreconditionError("modulus N is not prime");
  if (!criteria.rational || criteria.N != N) throw PreconditionError("criteria were built for another modulus");
  if (criteria.m > space.J.size()) throw PreconditionError("surrogate set smaller than m");
  for (std::size_t i = 0; i < criteria.m; ++i) {
    if (!(static_cast<double>(N) > 4.0 * static_cast<double>(n) * static_cast<double>(space.J.sup_norm(i)))) {
      throw PreconditionError("N must exceed 4 n ||h_i|| for every i <= m");
    }
  }
  const int d = space.J.dim();
  return run_search(n, criteria, space, max_trials, options,
                    [&](std::size_t t) { return Generator(rational_trial(d, N, seed, t)); });
}

}  // namespace genset

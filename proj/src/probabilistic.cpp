#include "genset/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "genset/errors.hpp"
#include "genset/pointsets.hpp"
#include "genset/primes.hpp"
#include "genset/random.hpp"

namespace genset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_zero(std::span<const std::int64_t> h) {
  return std::all_of(h.begin(), h.end(), [](std::int64_t v) { return v == 0; });
}

bool congruent_zero(std::span<const std::int64_t> h, std::int64_t N) {
  return std::all_of(h.begin(), h.end(), [N](std::int64_t v) { return v % N == 0; });
}

double norm_pow(std::int64_t norm, double e) {
  return norm == 0 ? 0.0 : std::pow(static_cast<double>(norm), e);
}

// Given the per-entry phase of row k, accumulate the chosen quadratic form.
// phase(k, i) returns h_i . (k zeta) reduced mod 1.
template <class Phase>
double form_from_phases(const WeightedSystem& sys, Moment which, const CVector& t, Phase phase) {
  const std::size_t n = sys.rows();
  const std::size_t m = sys.size();
  if (which == Moment::A_star) {
    double total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      std::complex<double> acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += std::polar(1.0, -kTwoPi * phase(k, i)) * t(static_cast<Eigen::Index>(k));
      }
      total += sys.a(i) * sys.a(i) * std::norm(acc);
    }
    return total;
  }
  double total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += sys.a(i) * std::polar(1.0, kTwoPi * phase(k, i)) * t(static_cast<Eigen::Index>(i));
    }
    total += std::norm(acc);
  }
  return total;
}

void check_t(const WeightedSystem& sys, Moment which, const CVector& t) {
  const auto want = which == Moment::A_star ? sys.rows() : sys.size();
  if (static_cast<std::size_t>(t.size()) != want) throw PreconditionError("vector t has the wrong length");
}

std::uint64_t generator_count(int d, std::int64_t N, std::uint64_t cap) {
  double total = std::pow(static_cast<double>(N), d);
  if (total > static_cast<double>(cap)) throw ResourceError("N^d exceeds the exhaustive cap");
  return static_cast<std::uint64_t>(std::llround(total));
}

// z for flat index idx in {0, ..., N^d - 1}, components in {1, ..., N}.
void decode(std::uint64_t idx, std::int64_t N, std::vector<std::int64_t>& z) {
  for (auto& c : z) {
    c = static_cast<std::int64_t>(idx % static_cast<std::uint64_t>(N)) + 1;
    idx /= static_cast<std::uint64_t>(N);
  }
}

bool outside(const WeightedSystem& sys, std::int64_t N, Moment which) {
  const double nd = static_cast<double>(sys.rows());
  if (which == Moment::A) return !(static_cast<double>(N) > 4.0 * nd * static_cast<double>(sys.max_sup_norm()));
  return !(static_cast<double>(N) > 2.0 * nd);
}

ExhaustiveMoments summarise(const std::vector<double>& values, bool outside_hyp) {
  long double sum = 0;
  for (double v : values) sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  long double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {static_cast<double>(mean), static_cast<double>(ss / static_cast<long double>(values.size())),
          values.size(), outside_hyp};
}

MomentEstimate estimate(const std::vector<double>& values) {
  // Welford in trial order.
  double mean = 0, m2 = 0;
  std::size_t count = 0;
  for (double v : values) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  MomentEstimate out;
  out.mean = mean;
  out.trials = count;
  out.variance = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  out.std_error = std::sqrt(out.variance / static_cast<double>(count));
  return out;
}

double mc_trial(const WeightedSystem& sys, const CVector& t, const CounterRng& rng, std::size_t j,
                Moment which, std::vector<double>& zeta) {
  const auto d = static_cast<std::size_t>(sys.dim());
  for (std::size_t c = 0; c < d; ++c) zeta[c] = rng.uniform(j * d + c);
  return quadratic_form(sys, which, t, zeta);
}

}  // namespace

WeightedSystem::WeightedSystem(int d, std::size_t n, std::vector<WeightedEntry> entries)
    : d_(d), n_(n), entries_(std::move(entries)) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (n < 1) throw DomainError("row count must be positive");
  std::set<std::vector<std::int64_t>> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.h.size() != static_cast<std::size_t>(d)) throw DomainError("frequency has the wrong dimension");
    if (!(e.a >= 0.0)) throw DomainError("weights must be nonnegative");
    if (i > 0 && e.a > entries_[i - 1].a) throw DomainError("weights must be non-increasing");
    if (!seen.insert(e.h).second) throw DomainError("frequencies must be distinct");
  }
}

WeightedSystem WeightedSystem::from_index_set(const IndexSet& J, std::size_t begin, std::size_t n) {
  std::vector<WeightedEntry> entries;
  for (std::size_t i = begin; i < J.size(); ++i) {
    const auto h = J.frequency(i);
    entries.push_back({J.sigma(i), {h.begin(), h.end()}});
  }
  return WeightedSystem(J.dim(), n, std::move(entries));
}

std::int64_t WeightedSystem::sup_norm(std::size_t i) const {
  std::int64_t s = 0;
  for (auto v : entries_[i].h) s = std::max<std::int64_t>(s, v < 0 ? -v : v);
  return s;
}

std::int64_t WeightedSystem::max_sup_norm() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s = std::max(s, sup_norm(i));
  return s;
}

double expected_A_star_t(const WeightedSystem& sys, const CVector& t) {
  check_t(sys, Moment::A_star, t);
  const double all = std::norm(t.sum());
  const double diag = t.squaredNorm();
  double total = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    total += sys.a(i) * sys.a(i) * (is_zero(sys.h(i)) ? all : diag);
  }
  return total;
}

double expected_A_t(const WeightedSystem& sys, const CVector& t) {
  check_t(sys, Moment::A, t);
  double total = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    total += sys.a(i) * sys.a(i) * std::norm(t(static_cast<Eigen::Index>(i)));
  }
  return static_cast<double>(sys.rows()) * total;
}

double variance_bound_A_star(const WeightedSystem& sys, double eps, const DivisorConstant& c) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  double s = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double a2 = sys.a(i) * sys.a(i);
    s += a2 * a2 * norm_pow(sys.sup_norm(i), eps);
  }
  return 2.0 * c.value * std::pow(static_cast<double>(sys.rows()), 1.0 + eps) * s;
}

double variance_bound_A(const WeightedSystem& sys, double eps, const DivisorConstant& c) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("eps must lie in (0, 1]");
  double max_a2 = 0, weighted = 0, plain = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double a2 = sys.a(i) * sys.a(i);
    max_a2 = std::max(max_a2, a2);
    weighted += a2 * norm_pow(sys.sup_norm(i), 2.0 * eps);
    plain += a2;
  }
  return 2.0 * c.value * std::pow(static_cast<double>(sys.rows()), 1.0 + eps) * max_a2 *
         std::sqrt(weighted) * std::sqrt(plain);
}

double expected_A_star_t_rational(const WeightedSystem& sys, const CVector& t, std::int64_t N) {
  check_t(sys, Moment::A_star, t);
  const double all = std::norm(t.sum());
  const double diag = t.squaredNorm();
  double total = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    total += sys.a(i) * sys.a(i) * (congruent_zero(sys.h(i), N) ? all : diag);
  }
  return total;
}

double variance_bound_A_star_rational(const WeightedSystem& sys, double eps,
                                      const DivisorConstant& c, std::int64_t N) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const double nd = static_cast<double>(sys.rows());
  double quartic = 0, live = 0, far = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (congruent_zero(sys.h(i), N)) continue;
    const double a2 = sys.a(i) * sys.a(i);
    quartic += a2 * a2 * norm_pow(sys.sup_norm(i), eps);
    live += a2;
    if (2.0 * nd * static_cast<double>(sys.sup_norm(i)) >= static_cast<double>(N)) far += a2;
  }
  return 2.0 * c.value * std::pow(nd, 1.0 + eps) * quartic + 2.0 * nd * live * far;
}

double quadratic_form(const WeightedSystem& sys, Moment which, const CVector& t,
                      std::span<const double> zeta) {
  check_t(sys, which, t);
  const auto d = static_cast<std::size_t>(sys.dim());
  if (zeta.size() != d) throw PreconditionError("generator dimension mismatch");
  // phase(k, i) = frac((k+1) h_i . zeta), with each h_ij zeta_j reduced first.
  std::vector<double> base(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    double p = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const auto hj = sys.h(i)[j];
      const double f = frac_multiple(static_cast<std::uint64_t>(hj < 0 ? -hj : hj), zeta[j]);
      p += hj < 0 ? -f : f;
    }
    base[i] = p - std::floor(p);
  }
  return form_from_phases(sys, which, t, [&](std::size_t k, std::size_t i) {
    return frac_multiple(k + 1, base[i]);
  });
}

double quadratic_form_rational(const WeightedSystem& sys, Moment which, const CVector& t,
                               std::span<const std::int64_t> z, std::int64_t N) {
  check_t(sys, which, t);
  const auto d = static_cast<std::size_t>(sys.dim());
  if (z.size() != d) throw PreconditionError("generator dimension mismatch");
  std::vector<std::int64_t> base(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < d; ++j) s = (s + mul_mod(mod_floor(sys.h(i)[j], N), z[j], N)) % N;
    base[i] = s;
  }
  const double Nd = static_cast<double>(N);
  return form_from_phases(sys, which, t, [&](std::size_t k, std::size_t i) {
    return static_cast<double>(mul_mod(static_cast<std::int64_t>(k + 1), base[i], N)) / Nd;
  });
}

ExhaustiveMoments exhaustive_rational_moments(const WeightedSystem& sys, const CVector& t,
                                              std::int64_t N, Moment which, std::uint64_t cap) {
  if (!is_prime(N)) throw PreconditionError("modulus N is not prime");
  check_t(sys, which, t);
  const std::uint64_t count = generator_count(sys.dim(), N, cap);
  std::vector<double> values(count);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel
  {
    std::vector<std::int64_t> z(static_cast<std::size_t>(sys.dim()));
#pragma omp for schedule(static)
    for (std::int64_t idx = 0; idx < total; ++idx) {
      decode(static_cast<std::uint64_t>(idx), N, z);
      values[static_cast<std::size_t>(idx)] = quadratic_form_rational(sys, which, t, z, N);
    }
  }
  return summarise(values, outside(sys, N, which));
}

ExhaustiveMoments exhaustive_rational_moments_serial(const WeightedSystem& sys, const CVector& t,
                                                     std::int64_t N, Moment which,
                                                     std::uint64_t cap) {
  if (!is_prime(N)) throw PreconditionError("modulus N is not prime");
  check_t(sys, which, t);
  const std::uint64_t count = generator_count(sys.dim(), N, cap);
  std::vector<double> values(count);
  std::vector<std::int64_t> z(static_cast<std::size_t>(sys.dim()));
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    decode(idx, N, z);
    values[idx] = quadratic_form_rational(sys, which, t, z, N);
  }
  return summarise(values, outside(sys, N, which));
}

MomentEstimate mc_moments(const WeightedSystem& sys, const CVector& t, std::size_t trials,
                          std::uint64_t seed, Moment which) {
  if (trials < 100) throw PreconditionError("Monte Carlo needs at least 100 trials");
  check_t(sys, which, t);
  const CounterRng rng(seed);
  std::vector<double> values(trials);
  const auto total = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    std::vector<double> zeta(static_cast<std::size_t>(sys.dim()));
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < total; ++j) {
      values[static_cast<std::size_t>(j)] = mc_trial(sys, t, rng, static_cast<std::size_t>(j), which, zeta);
    }
  }
  return estimate(values);
}

MomentEstimate mc_moments_serial(const WeightedSystem& sys, const CVector& t, std::size_t trials,
                                 std::uint64_t seed, Moment which) {
  if (trials < 100) throw PreconditionError("Monte Carlo needs at least 100 trials");
  check_t(sys, which, t);
  const CounterRng rng(seed);
  std::vector<double> values(trials);
  std::vector<double> zeta(static_cast<std::size_t>(sys.dim()));
  for (std::size_t j = 0; j < trials; ++j) values[j] = mc_trial(sys, t, rng, j, which, zeta);
  return estimate(values);
}

}  // namespace genset

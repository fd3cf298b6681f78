#include <doctest.h>

#include <cmath>
#include <random>

#include "genset/error_analysis.hpp"
#include "genset/errors.hpp"
#include "genset/primes.hpp"
#include "genset/search.hpp"
#include "oracles.hpp"

using namespace genset;

namespace {

SigmaSequence korobov1(double alpha) { return SigmaSequence::korobov(KorobovParams::unweighted(1, alpha)); }

// L2 error of the least-squares fit of f = sum_i c_i e_{h_i} on J using the first m columns.
double ls_error(const CMatrix& phi, const PseudoInverse& p, const CVector& c, Eigen::Index m) {
  CVector e = c;
  e.head(m) -= p.pinv * (phi * c);
  return e.norm();
}

}  // namespace

TEST_CASE("divisor sums") {
  CHECK(divisor_sum(1) == 2);
  CHECK(divisor_sum(12) == 12);
  CHECK(divisor_sum(7) == 4);
  for (std::uint64_t n = 1; n <= 3000; ++n) CHECK(divisor_sum(n) == oracle::divisor_count_signed(n));
}

TEST_CASE("divisor constant") {
  const DivisorConstant c = c_epsilon(1.0, 10);
  CHECK(c.value == doctest::Approx(2.0));
  CHECK(c.argmax == 1);
  CHECK(c_epsilon(0.3, 1).value == 2.0);

  double brute = 0;
  for (std::uint64_t n = 1; n <= 10'000; ++n) {
    brute = std::max(brute, static_cast<double>(oracle::divisor_count_signed(n)) / std::sqrt(static_cast<double>(n)));
  }
  CHECK(c_epsilon(0.5, 10'000).value == doctest::Approx(brute).epsilon(1e-15));
  CHECK(c_epsilon(0.5, 10'000).value == doctest::Approx(3.4641016151377548));
  for (double eps : {0.25, 0.5, 1.0}) {
    const DivisorConstant k = c_epsilon(eps, 10'000);
    for (std::uint64_t n = 1; n <= 10'000; ++n) {
      CHECK(static_cast<double>(divisor_sum(n)) <= k.value * std::pow(static_cast<double>(n), eps) * (1 + 1e-15));
    }
  }
}

TEST_CASE("wce vanishes when the space is the span of the first m indices") {
  const auto seq = SigmaSequence::table(1, {{{0}, 1.0}, {{-1}, 0.5}, {{1}, 0.4}});
  const SurrogateSpace space = make_surrogate(seq, 3);
  CHECK(space.tail2 == 0);
  const WceReport rep = worst_case_error_exact(build_generated_set({{0.3183}}, 7), 3, space);
  CHECK(rep.wce_surrogate < 1e-12);
  CHECK(rep.wce_upper < 1e-12);
}

TEST_CASE("wce tends to zero with the tail weight") {
  double last = INFINITY;
  for (double e : {0.1, 0.01, 0.001, 1e-4}) {
    const auto seq = SigmaSequence::table(1, {{{0}, 1.0}, {{-1}, e}, {{1}, e * 0.999}});
    const WceReport rep = worst_case_error_exact(build_generated_set({{0.41}}, 5), 1, make_surrogate(seq, 1));
    CHECK(rep.wce_surrogate <= last);
    CHECK(rep.wce_surrogate <= 3 * e);
    last = rep.wce_surrogate;
  }
}

TEST_CASE("wce dominates random functions and the maximizer attains it") {
  const auto seq = korobov1(2.0);
  const SurrogateSpace space = make_surrogate_from(seq, take_first_m(seq, 41));
  const NodeList nodes = build_generated_set({{0.2718281828}}, 8);
  const WceReport rep = worst_case_error_exact(nodes, 3, space);
  const CMatrix phi = assemble(nodes, space.J).values;
  const PseudoInverse p = pseudo_inverse(phi.leftCols(3), kDefaultRankTol);

  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    CVector c(41);
    for (Eigen::Index i = 0; i < 41; ++i) c(i) = space.J.sigma(static_cast<std::size_t>(i)) * std::complex<double>(g(gen), g(gen));
    double hnorm = 0;
    for (Eigen::Index i = 0; i < 41; ++i) hnorm += std::norm(c(i)) / std::pow(space.J.sigma(static_cast<std::size_t>(i)), 2);
    c /= std::sqrt(hnorm);
    CHECK(ls_error(phi, p, c, 3) <= rep.wce_surrogate * (1 + 1e-12));
  }
  CHECK(std::abs(ls_error(phi, p, rep.maximizer, 3) - rep.wce_surrogate) <= 1e-10);
  CHECK(rep.wce_upper >= rep.wce_surrogate);
}

TEST_CASE("Lanczos and dense paths agree") {
  const auto p = KorobovParams::product(2.0, std::vector<double>{0.9, 0.7});
  const auto seq = SigmaSequence::korobov(p);
  const SurrogateSpace space = make_surrogate_from(seq, enumerate_cross(p, 400));
  REQUIRE(space.J.size() > 60);
  const NodeList nodes = build_nodes(continuous_trial(2, 1, 0), 64);
  WceOptions dense, lanczos;
  lanczos.dense_limit = 10;
  const auto a = worst_case_error_exact(nodes, 9, space, dense);
  const auto b = worst_case_error_exact(nodes, 9, space, lanczos);
  CHECK(a.wce_surrogate == doctest::Approx(b.wce_surrogate).epsilon(1e-9));
}

TEST_CASE("wce_upper is monotone along nested crosses") {
  const auto p = KorobovParams::unweighted(1, 2.0);
  const auto seq = SigmaSequence::korobov(p);
  const NodeList nodes = build_generated_set({{0.6180339887}}, 32);
  double last = INFINITY;
  for (double M : {200.0, 800.0, 3200.0, 12800.0}) {
    const double up = worst_case_error_exact(nodes, 5, make_surrogate_from(seq, enumerate_cross(p, M))).wce_upper;
    CHECK(up <= last * (1 + 1e-12));
    last = up;
  }
}

TEST_CASE("general bound") {
  const auto seq = korobov1(2.0);
  const auto c = c_epsilon(0.5, 1024);
  SUBCASE("infeasible for small n") {
    const SurrogateSpace space = make_surrogate(seq, 4);
    CHECK_FALSE(theorem_bound_general(16, 4, 0.5, space, c).feasible);
  }
  SUBCASE("direct evaluation at m=4") {
    const SurrogateSpace space = make_surrogate(seq, 4);
    // C >= 2 makes the denominator negative at n = 1024, so evaluate at n = 2^16
    CHECK_FALSE(theorem_bound_general(1024, 4, 0.5, space, c).feasible);
    const auto cbig = c_epsilon(0.5, 1 << 16);
    const BoundValue b = theorem_bound_general(1 << 16, 4, 0.5, space, cbig);
    REQUIRE(b.feasible);
    const double nd = 1 << 16;
    // first four indices are 0, -1, 1, -2, so max ||h||^eps = sqrt(2)
    const double den = nd - std::sqrt(6 * cbig.value * std::pow(nd, 1.5) * 4 * std::sqrt(2.0));
    double s2 = 0, s4 = 0;
    for (std::int64_t h = 2; h < 1'000'000; ++h) {
      const double sig = 1.0 / std::pow(static_cast<double>(h), 2.0);
      const double w = h == 2 ? 1.0 : 2.0;
      s2 += w * sig * sig;
      s4 += w * std::sqrt(static_cast<double>(h)) * std::pow(sig, 4);
    }
    const double exact = 0.25 + std::sqrt(s2 + std::sqrt(6 * cbig.value * std::pow(nd, 1.5) * s4)) / std::sqrt(den);
    CHECK(b.value >= exact * (1 - 1e-12));
    CHECK(b.value <= exact * (1 + 1e-3));
  }
  SUBCASE("non-increasing in n for fixed m") {
    const auto cbig = c_epsilon(0.5, 1 << 16);
    const SurrogateSpace space = make_surrogate(seq, 3);
    double last = INFINITY;
    for (std::size_t n = 256; n <= (1u << 16); n *= 2) {
      const BoundValue b = theorem_bound_general(n, 3, 0.5, space, cbig);
      if (!b.feasible) continue;
      CHECK(b.value <= last);
      last = b.value;
    }
    CHECK(std::isfinite(last));
  }
}

TEST_CASE("regular bound") {
  const auto seq = korobov1(2.0);
  const auto c = c_epsilon(0.5, 1 << 20);
  const SurrogateSpace space = make_surrogate(seq, 2);
  CHECK_FALSE(theorem_bound_regular(64, 2, 0.5, 1.0, 1.0, space, c).n_form.feasible);
  for (std::size_t n = 1 << 14; n <= (1u << 20); n *= 4) {
    std::size_t m = 1;
    while (m_condition_holds(n, m + 1, 0.5, 1.0, 1.0, c)) ++m;
    const SurrogateSpace sp = make_surrogate(seq, m);
    const RegularBound r = theorem_bound_regular(n, m, 0.5, 1.0, 1.0, sp, c);
    REQUIRE(r.n_form.feasible);
    CHECK(r.m_form.value >= r.n_form.value);
    const BoundValue g = theorem_bound_general(n, m, 0.5, sp, c);
    REQUIRE(g.feasible);
    // n/2 <= denominator under the m condition, so the regular form is within a factor 2 of the general form
    CHECK(r.n_form.value - sp.J.sigma(m) <= 2.0 * (g.value - sp.J.sigma(m)) * (1 + 1e-12));
  }
}

TEST_CASE("rational bound") {
  const auto seq = korobov1(2.0);
  const auto c = c_epsilon(0.5, 1 << 20);
  SUBCASE("non-prime modulus") {
    CHECK_THROWS_AS(rational_theorem_bound(64, 1, 0.5, 1, 1, 100, make_surrogate(seq, 1), c), PreconditionError);
  }
  SUBCASE("small N is infeasible") {
    CHECK_FALSE(rational_theorem_bound(1 << 16, 2, 0.5, 1, 1, 7, make_surrogate(seq, 2), c).bound.feasible);
  }
  SUBCASE("membership sets agree with an exhaustive congruence scan") {
    const SurrogateSpace space = make_surrogate_from(seq, take_first_m(seq, 41));
    const RationalBound r = rational_theorem_bound(2, 1, 0.5, 1, 1, 23, space, c);
    double aliased = 0, far = 0;
    for (std::int64_t h = -20; h <= 20; ++h) {
      if (h == 0) continue;
      const double s2 = std::pow(std::abs(static_cast<double>(h)), -4.0);
      if (h % 23 == 0) aliased += s2;
      if (4 * std::abs(h) > 23) far += s2;
    }
    CHECK(r.aliased_J == doctest::Approx(aliased));
    CHECK(r.far_J == doctest::Approx(far));
  }
  SUBCASE("large N removes the aliasing terms on J") {
    const std::size_t n = 1 << 18;
    std::size_t m = 1;
    while (m_condition_holds(n, m + 1, 0.5, 1, 1, c)) ++m;
    const SurrogateSpace space = make_surrogate(seq, m);
    std::int64_t maxh = 0;
    for (std::size_t i = 0; i < space.J.size(); ++i) maxh = std::max(maxh, space.J.sup_norm(i));
    const std::int64_t N = next_prime_at_least(2.0 * static_cast<double>(n) * static_cast<double>(maxh) + 1);
    const RationalBound r = rational_theorem_bound(n, m, 0.5, 1, 1, N, space, c);
    CHECK(r.aliased_J == 0);
    CHECK(r.far_J == 0);
    CHECK(r.bound.feasible);
  }
}

TEST_CASE("Korobov corollary bounds") {
  const auto p = KorobovParams::unweighted(1, 2.0);
  const auto c = c_epsilon(0.5, 1 << 20);
  CHECK_FALSE(korobov_bound(16, 0.5, 1.5, p, c).feasible);

  const KorobovBound a = korobov_bound(4096, 0.5, 1.5, p, c);
  CHECK(a.m == enumerate_cross(p, a.M).size());
  CHECK(std::isfinite(a.bound));
  const KorobovBound b = korobov_bound(8192, 0.5, 1.5, p, c);
  CHECK(b.bound / a.bound == doctest::Approx(std::pow(2.0, -1.5 * 0.5 / 1.5)).epsilon(1e-13));

  for (std::size_t n : {64u, 1000u, 4096u}) {
    const KorobovBound k = korobov_bound(n, 0.5, 1.5, p, c);
    const KorobovBound r = korobov_rational_bound(n, 0.5, 1.5, p, c);
    CHECK(r.bound * 3.0 == k.bound * 4.0);
    // ||h_i|| <= i <= m, so N > 4 n m covers the modulus condition
    CHECK(static_cast<double>(r.N) > 4.0 * static_cast<double>(n) * static_cast<double>(std::max<std::size_t>(r.m, 1)));
  }
  const KorobovBound r10 = korobov_rational_bound(10, 0.5, 1.0, p, c);
  CHECK(r10.N == 641);
  CHECK(r10.N == oracle::sieve_next_prime(2 * std::pow(10.0, 2.5)));
}

TEST_CASE("rate prediction") {
  CHECK(sobolev_rate_prediction(2.0, 0, 1.0, 1e-9).exponent == doctest::Approx(2.0));
  CHECK(sobolev_rate_prediction(2.0, 0, 1.0, 1.0).exponent == 0.0);
  CHECK(sobolev_rate_prediction(2.0, 0, 1.0, 0.3).exponent == doctest::Approx(1.0769230769));
}

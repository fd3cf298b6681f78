#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "genset/errors.hpp"
#include "genset/korobov.hpp"
#include "oracles.hpp"

using namespace genset;

namespace {

std::set<oracle::Freq> as_set(const IndexSet& s) {
  std::set<oracle::Freq> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto h = s.frequency(i);
    out.emplace(h.begin(), h.end());
  }
  return out;
}

std::vector<std::int64_t> vec(std::initializer_list<std::int64_t> v) { return v; }

}  // namespace

TEST_CASE("r of the zero frequency is 1/gamma_empty") {
  const KorobovParams p(2, 1.5, {0.5, 0.3, 0.3, 0.1});
  CHECK(r_alpha_gamma(vec({0, 0}), p) == doctest::Approx(2.0));
}

TEST_CASE("r examples") {
  CHECK(r_alpha_gamma(vec({2, 3}), KorobovParams::unweighted(2, 1.0)) == doctest::Approx(6.0));
  const std::vector<double> g{0.5, 1.0};
  CHECK(r_alpha_gamma(vec({-2, 0}), KorobovParams::product(2.0, g)) == doctest::Approx(8.0));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(KorobovParams(2, 0.5, {1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(KorobovParams(2, 2.0, {1, 1, 1}), DomainError);
  CHECK_THROWS_AS(KorobovParams(1, 2.0, {1, 1.5}), DomainError);
  CHECK_THROWS_AS(enumerate_cross(KorobovParams::unweighted(1, 1), -1.0), DomainError);
}

TEST_CASE("unweighted cross below 2 has the exact small cardinalities") {
  const auto p2 = KorobovParams::unweighted(2, 1.0);
  const IndexSet s = enumerate_cross(p2, 1.5);
  CHECK(s.size() == 9);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.sup_norm(i) <= 1);
  CHECK(enumerate_cross(KorobovParams::unweighted(1, 1.0), 0.5).size() == 0);
}

TEST_CASE("weighted cross equals the box scan") {
  const KorobovParams p(2, 2.0, {1.0, 0.8, 0.8, 0.64});
  const IndexSet s = enumerate_cross(p, 6.0);
  CHECK(as_set(s) == oracle::box_cross(2.0, {0.8, 0.8}, 6.0, 3));
}

TEST_CASE("random weighted crosses equal the box scan") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(gen() % 3);
    const double alpha = 0.75 + 2.0 * u(gen);
    std::vector<double> gamma(static_cast<std::size_t>(d));
    for (auto& g : gamma) g = 0.1 + 0.9 * u(gen);
    const double M = 30.0 * u(gen);
    const auto p = KorobovParams::product(alpha, gamma);
    const auto B = static_cast<std::int64_t>(std::ceil(std::pow(M, 1.0 / alpha))) + 1;
    CHECK(as_set(enumerate_cross(p, M)) == oracle::box_cross(alpha, gamma, M, B));
  }
}

TEST_CASE("unweighted cardinality examples") {
  CHECK(unweighted_cross_cardinality(1, 3.7) == 7);
  CHECK(unweighted_cross_cardinality(3, 1.9) == 27);
  CHECK(unweighted_cross_cardinality(2, 4.0) == enumerate_cross(KorobovParams::unweighted(2, 1.0), 4.0).size());
}

TEST_CASE("recurrence agrees with enumeration for d <= 3 and M <= 50") {
  for (int d = 1; d <= 3; ++d) {
    const auto p = KorobovParams::unweighted(d, 1.0);
    for (double M = 0.0; M <= 50.0; M += 0.5) {
      CHECK(unweighted_cross_cardinality(d, M) == enumerate_cross(p, M).size());
    }
  }
}

TEST_CASE("take_first_m follows sigma order with the documented tie-break") {
  const auto seq = SigmaSequence::korobov(KorobovParams::unweighted(1, 2.0));
  const IndexSet one = take_first_m(seq, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.frequency(0)[0] == 0);
  const IndexSet three = take_first_m(seq, 3);
  CHECK(three.frequency(0)[0] == 0);
  CHECK(three.frequency(1)[0] == -1);
  CHECK(three.frequency(2)[0] == 1);

  const auto seq2 = SigmaSequence::korobov(KorobovParams::unweighted(2, 1.0));
  CHECK(as_set(take_first_m(seq2, 9)) == as_set(enumerate_cross(KorobovParams::unweighted(2, 1.0), 1.5)));
}

TEST_CASE("ordering is non-increasing in sigma and deterministic") {
  const std::vector<double> g{0.7, 0.4, 0.9};
  const auto seq = SigmaSequence::korobov(KorobovParams::product(1.5, g));
  const IndexSet a = take_first_m(seq, 400);
  const IndexSet b = take_first_m(seq, 400);
  CHECK(a.is_ordered());
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a.sigma(i - 1) >= a.sigma(i));
    const auto x = a.frequency(i), y = b.frequency(i);
    CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST_CASE("first |A(M)| indices form the cross up to boundary ties") {
  const std::vector<double> g{0.5, 0.5};
  const auto p = KorobovParams::product(2.0, g);
  const auto seq = SigmaSequence::korobov(p);
  for (double M : {3.0, 17.5, 40.0, 123.0}) {
    const IndexSet cross = enumerate_cross(p, M);
    const auto lhs = as_set(take_first_m(seq, cross.size()));
    const auto rhs = as_set(cross);
    for (const auto& h : lhs) {
      if (!rhs.count(h)) CHECK(r_alpha_gamma(h, p) == doctest::Approx(M));
    }
  }
}

TEST_CASE("cross cardinality obeys the mu bound") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const double alpha = 1.0 + u(gen);
    std::vector<double> gamma(static_cast<std::size_t>(d));
    for (auto& x : gamma) x = 0.2 + 0.8 * u(gen);
    const auto p = KorobovParams::product(alpha, gamma);
    const double M = 30 * u(gen);
    const auto count = static_cast<double>(enumerate_cross(p, M).size());
    for (double lam : {0.6 * alpha, 0.75 * alpha, 0.9 * alpha}) {
      CHECK(count <= std::pow(M, 1.0 / lam) * mu(lam, p));
    }
  }
}

TEST_CASE("zeta agrees with a high-precision reference") {
  for (double s : {1.05, 1.3, 1.5, 2.0, 2.5, 4.0, 8.0, 20.0}) {
    CHECK(std::abs(riemann_zeta(s) - oracle::zeta(s)) <= 1e-12 * std::max(1.0, oracle::zeta(s)));
  }
  CHECK_THROWS_AS(riemann_zeta(1.0), DomainError);
}

TEST_CASE("mu examples") {
  CHECK(mu(1.0, KorobovParams::unweighted(1, 2.0)) ==
        doctest::Approx(1.0 + std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-12));
  const KorobovParams tiny(2, 2.0, {1.0, 1e-300, 1e-300, 1e-300});
  CHECK(mu(1.0, tiny) == doctest::Approx(1.0));
  const std::vector<double> g{0.5, 0.5};
  CHECK(mu(1.0, KorobovParams::product(2.0, g)) ==
        doctest::Approx(oracle::mu_product(1.0, 2.0, g)).epsilon(1e-12));
  CHECK_THROWS_AS(mu(2.0, KorobovParams::unweighted(1, 2.0)), DomainError);
}

TEST_CASE("mu stays bounded in d under summable weights") {
  double last = 0;
  for (int d = 1; d <= 6; ++d) {
    std::vector<double> g(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] = 1.0 / ((j + 1.0) * (j + 1.0) * (j + 1.0));
    const double v = mu(1.0, KorobovParams::product(2.0, g));
    CHECK(v >= last);
    CHECK(v <= oracle::mu_product(1.0, 2.0, std::vector<double>(6, 1.0)));
    last = v;
  }
  CHECK(last < 20.0);
}

TEST_CASE("kernel examples") {
  const IndexSet s = enumerate_cross(KorobovParams::unweighted(1, 1.0), 1.0);
  const std::vector<double> x{0.5}, y{0.0};
  const auto k = kernel_eval(x, y, s);
  CHECK(k.real() == doctest::Approx(-1.0));
  CHECK(std::abs(k.imag()) < 1e-12);

  const auto p = KorobovParams::product(2.0, std::vector<double>{0.6, 0.9});
  const IndexSet J = enumerate_cross(p, 40.0);
  const std::vector<double> a{0.3, 0.7};
  double trace = 0;
  for (std::size_t i = 0; i < J.size(); ++i) trace += J.sigma(i) * J.sigma(i);
  const auto diag = kernel_eval(a, a, J);
  CHECK(diag.real() == doctest::Approx(trace));
  CHECK(std::abs(diag.imag()) < 1e-12);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> xs{u(gen), u(gen)}, ys{u(gen), u(gen)};
    CHECK(std::abs(std::conj(kernel_eval(xs, ys, J)) - kernel_eval(ys, xs, J)) < 1e-12);
  }
}

TEST_CASE("tail sums") {
  SUBCASE("table supported on the first m indices has an empty tail") {
    const auto seq = SigmaSequence::table(1, {{{0}, 1.0}, {{1}, 0.5}, {{-1}, 0.25}});
    const TailSums t = tail_sums(seq, 3, 0.5, 1.0, take_first_m(seq, 3));
    CHECK(t.S2 == 0);
    CHECK(t.remainder2 == 0);
    CHECK(t.remainder4 == 0);
  }
  SUBCASE("Korobov d=1 S2 matches direct summation") {
    const auto p = KorobovParams::unweighted(1, 2.0);
    const auto seq = SigmaSequence::korobov(p);
    const IndexSet J = enumerate_cross(p, 100.0);
    const TailSums t = tail_sums(seq, 1, 0.5, 1.0, J);
    double direct = 0;
    for (std::int64_t h = 1; h <= 10; ++h) direct += 2.0 / std::pow(static_cast<double>(h), 4.0);
    CHECK(t.S2 == doctest::Approx(direct).epsilon(1e-13));
    // outside J the exact mass is 2 sum_{h > 10} h^-4
    const double exact = 2.0 * oracle::zeta(4.0) - direct;
    CHECK(t.remainder2 >= exact * (1 - 1e-12));
  }
  SUBCASE("remainders shrink as J grows") {
    const auto p = KorobovParams::product(1.5, std::vector<double>{0.5, 0.7});
    const auto seq = SigmaSequence::korobov(p);
    double last2 = INFINITY, last4 = INFINITY;
    for (double M : {5.0, 20.0, 80.0, 320.0}) {
      const TailSums t = tail_sums(seq, 1, 0.5, 1.0, enumerate_cross(p, M));
      CHECK(t.remainder2 <= last2);
      CHECK(t.remainder4 <= last4);
      last2 = t.remainder2;
      last4 = t.remainder4;
    }
  }
}

TEST_CASE("sigma decays like i^-alpha up to logs") {
  for (int d : {1, 2}) {
    for (double alpha : {1.0, 2.0}) {
      const auto seq = SigmaSequence::korobov(KorobovParams::unweighted(d, alpha));
      const IndexSet s = take_first_m(seq, 10'000);
      double lo = INFINITY, hi = 0;
      for (std::size_t i = 10; i <= 10'000; ++i) {
        const double v = s.sigma(i - 1) * std::pow(static_cast<double>(i), alpha) /
                         std::pow(std::log(static_cast<double>(i)), alpha * (d - 1));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi / lo < 50.0);
    }
  }
}

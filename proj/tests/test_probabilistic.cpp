#include <doctest.h>

#include <cmath>

#include "genset/errors.hpp"
#include "genset/probabilistic.hpp"
#include "genset/random.hpp"

using namespace genset;

namespace {

CVector unit(std::initializer_list<std::complex<double>> v) {
  CVector t(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) t(i++) = x;
  return t / t.norm();
}

}  // namespace

TEST_CASE("closed-form expectations") {
  const WeightedSystem one(1, 2, {{0.7, {3}}});
  CHECK(expected_A_star_t(one, unit({1, 0})) == doctest::Approx(0.49));
  const WeightedSystem zero(1, 2, {{0.7, {0}}});
  CHECK(expected_A_star_t(zero, unit({1, 1})) == doctest::Approx(2 * 0.49));

  const WeightedSystem sys(1, 3, {{1.0, {1}}, {0.5, {2}}});
  CHECK(expected_A_t(sys, unit({0, 1})) == doctest::Approx(3 * 0.25));
  CHECK(expected_A_t(sys, CVector::Zero(2)) == 0.0);
}

TEST_CASE("variance bound examples") {
  const auto c = c_epsilon(0.5, 1000);
  CHECK(variance_bound_A_star(WeightedSystem(2, 4, {{1.0, {0, 0}}}), 0.5, c) == 0.0);
  const WeightedSystem one(1, 4, {{0.8, {3}}});
  CHECK(variance_bound_A_star(one, 0.5, c) ==
        doctest::Approx(2 * c.value * std::pow(4.0, 1.5) * std::pow(0.8, 4) * std::sqrt(3.0)));
  double last = 0;
  for (std::size_t n = 1; n < 50; ++n) {
    const double v = variance_bound_A_star(WeightedSystem(1, n, {{0.8, {3}}}), 0.5, c);
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("Monte Carlo means match the closed forms") {
  const WeightedSystem sys(1, 3, {{1.0, {1}}, {0.5, {2}}});
  const CVector tn = unit({{0.3, 0.1}, {-0.5, 0.2}, {0.7, 0}});
  const CVector ti = unit({{0.6, -0.2}, {0.1, 0.5}});
  const MomentEstimate s = mc_moments(sys, tn, 100'000, 42, Moment::A_star);
  CHECK(std::abs(s.mean - expected_A_star_t(sys, tn)) <= 3 * s.std_error);
  const MomentEstimate a = mc_moments(sys, ti, 100'000, 42, Moment::A);
  CHECK(std::abs(a.mean - expected_A_t(sys, ti)) <= 3 * a.std_error + 1e-12);

  const auto c = c_epsilon(1.0, 1000);
  const WeightedSystem single(1, 5, {{0.9, {2}}});
  const CVector t5 = unit({1, 2, 3, 4, 5});
  CHECK(mc_moments(single, t5, 100'000, 7, Moment::A_star).variance <= variance_bound_A_star(single, 1.0, c));
}

TEST_CASE("Monte Carlo is reproducible and independent of the kernel used") {
  const WeightedSystem sys(2, 4, {{1.0, {1, -1}}, {0.6, {2, 0}}, {0.3, {0, 3}}});
  const CVector t = unit({1, {0, 1}, -1, 0.5});
  const MomentEstimate a = mc_moments(sys, t, 5000, 9, Moment::A_star);
  const MomentEstimate b = mc_moments(sys, t, 5000, 9, Moment::A_star);
  const MomentEstimate s = mc_moments_serial(sys, t, 5000, 9, Moment::A_star);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.mean == s.mean);
  CHECK(a.variance == s.variance);
  CHECK_THROWS(mc_moments(sys, t, 10, 9, Moment::A_star));
}

TEST_CASE("quadratic forms are real and nonnegative") {
  const WeightedSystem sys(2, 6, {{1.0, {1, 2}}, {0.6, {-2, 1}}, {0.2, {0, 0}}});
  const CounterRng rng(3);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const std::vector<double> z{rng.uniform(2 * k), rng.uniform(2 * k + 1)};
    CVector tn(6), ti(3);
    for (Eigen::Index i = 0; i < 6; ++i) tn(i) = {rng.uniform(1000 + 12 * k + 2 * i), rng.uniform(1001 + 12 * k + 2 * i)};
    for (Eigen::Index i = 0; i < 3; ++i) ti(i) = {rng.uniform(5000 + 6 * k + 2 * i), rng.uniform(5001 + 6 * k + 2 * i)};
    CHECK(quadratic_form(sys, Moment::A_star, tn, z) >= -1e-12);
    CHECK(quadratic_form(sys, Moment::A, ti, z) >= -1e-12);
  }
}

TEST_CASE("exhaustive rational means") {
  const WeightedSystem sys(1, 3, {{1.0, {1}}, {0.7, {-2}}});
  const CVector t = unit({0.6, 0.8});
  const ExhaustiveMoments ex = exhaustive_rational_moments(sys, t, 31, Moment::A);
  CHECK(std::abs(ex.mean - 3 * (0.36 + 0.49 * 0.64)) <= 1e-12);
  CHECK_FALSE(ex.outside_hypothesis);

  const ExhaustiveMoments serial = exhaustive_rational_moments_serial(sys, t, 31, Moment::A);
  CHECK(serial.mean == doctest::Approx(ex.mean).epsilon(1e-14));
  CHECK(serial.variance == doctest::Approx(ex.variance).epsilon(1e-12));

  // t concentrated on one row: no cross terms survive
  CVector e(3);
  e << 0, 1, 0;
  const ExhaustiveMoments star = exhaustive_rational_moments(sys, e, 31, Moment::A_star);
  CHECK(star.mean == doctest::Approx(1.0 + 0.49));
  CHECK(expected_A_star_t_rational(sys, e, 31) == doctest::Approx(star.mean));

  CHECK(exhaustive_rational_moments(sys, t, 2, Moment::A).outside_hypothesis);
  CHECK_THROWS_AS(exhaustive_rational_moments(sys, t, 33, Moment::A), PreconditionError);
}

TEST_CASE("exhaustive means equal n sum a^2 |t|^2 for N > 4 n max h") {
  const double a[] = {1.0, 0.8, 0.3};
  for (std::int64_t N : {41, 53, 61, 71, 83, 97, 101}) {
    for (std::size_t n : {2u, 3u}) {
      if (!(static_cast<double>(N) > 12.0 * static_cast<double>(n))) continue;
      const WeightedSystem sys(1, n, {{a[0], {3}}, {a[1], {-1}}, {a[2], {2}}});
      const CVector t = unit({0.5, {0.1, 0.7}, -0.2});
      double expect = 0;
      for (Eigen::Index i = 0; i < 3; ++i) expect += a[i] * a[i] * std::norm(t(i));
      expect *= static_cast<double>(n);
      const ExhaustiveMoments ex = exhaustive_rational_moments(sys, t, N, Moment::A);
      CHECK(std::abs(ex.mean - expect) <= 1e-12);
      CHECK(ex.count == static_cast<std::uint64_t>(N));
    }
  }
}

TEST_CASE("Chebyshev consistency") {
  const auto c = c_epsilon(0.5, 1000);
  const WeightedSystem sys(1, 4, {{1.0, {1}}, {0.7, {2}}, {0.4, {-3}}});
  const CVector t = unit({0.3, 0.9, 0.2});
  const double mean = expected_A_t(sys, t);
  const double cut = mean + std::sqrt(3 * variance_bound_A(sys, 0.5, c));
  const CounterRng rng(17);
  std::size_t above = 0;
  for (std::uint64_t k = 0; k < 10'000; ++k) {
    const std::vector<double> z{rng.uniform(k)};
    if (quadratic_form(sys, Moment::A, t, z) >= cut) ++above;
  }
  CHECK(static_cast<double>(above) / 10'000.0 <= 1.0 / 3.0 + 0.05);
}

TEST_CASE("nonnegative real t attains the largest empirical variance on a grid") {
  const WeightedSystem sys(1, 2, {{1.0, {1}}, {0.6, {2}}});
  double best_real = 0, best_any = 0;
  for (int a = 0; a <= 8; ++a) {
    for (int ph = 0; ph < 4; ++ph) {
      const double th = a * 3.141592653589793 / 16;
      const std::complex<double> phase = std::polar(1.0, ph * 3.141592653589793 / 2);
      CVector t(2);
      t << std::cos(th), std::sin(th) * phase;
      const double v = mc_moments(sys, t, 4000, 5, Moment::A_star).variance;
      best_any = std::max(best_any, v);
      if (ph == 0) best_real = std::max(best_real, v);
    }
  }
  CHECK(best_real >= best_any * 0.95);
}

TEST_CASE("system validation") {
  CHECK_THROWS(WeightedSystem(1, 3, {{0.5, {1}}, {0.7, {2}}}));
  CHECK_THROWS(WeightedSystem(1, 3, {{0.7, {1}}, {0.5, {1}}}));
  CHECK_THROWS(WeightedSystem(2, 3, {{0.7, {1}}}));
}

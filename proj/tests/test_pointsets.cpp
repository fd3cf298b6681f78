#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "genset/errors.hpp"
#include "genset/pointsets.hpp"

using namespace genset;

TEST_CASE("continuous generated set examples") {
  const NodeList a = build_generated_set({{0.5}}, 3);
  REQUIRE(a.size() == 3);
  CHECK(a.node(0)[0] == 0.5);
  CHECK(a.node(1)[0] == 0.0);
  CHECK(a.node(2)[0] == 0.5);

  const NodeList b = build_generated_set({{0.3, 0.9}}, 1);
  CHECK(b.node(0)[0] == 0.3);
  CHECK(b.node(0)[1] == 0.9);
}

TEST_CASE("the twenty point example lies in the unit square and matches k zeta mod 1") {
  const double z1 = std::sqrt(2.0) - 1, z2 = std::sqrt(3.0) - 1;
  const NodeList s = build_generated_set({{z1, z2}}, 20);
  for (std::size_t k = 0; k < 20; ++k) {
    const auto x = s.node(k);
    CHECK(x[0] >= 0.0);
    CHECK(x[0] < 1.0);
    CHECK(x[1] >= 0.0);
    CHECK(x[1] < 1.0);
    const long double e0 = std::fmod(static_cast<long double>(k + 1) * z1, 1.0L);
    const long double e1 = std::fmod(static_cast<long double>(k + 1) * z2, 1.0L);
    CHECK(std::abs(x[0] - static_cast<double>(e0)) < 1e-14);
    CHECK(std::abs(x[1] - static_cast<double>(e1)) < 1e-14);
  }
}

TEST_CASE("rational generated set examples") {
  const NodeList s = build_rational_generated_set({{1}, 5}, 5);
  const double expect[] = {0.2, 0.4, 0.6, 0.8, 0.0};
  for (std::size_t k = 0; k < 5; ++k) CHECK(s.node(k)[0] == doctest::Approx(expect[k]));
  CHECK(s.numerators(4)[0] == 0);

  const NodeList t = build_rational_generated_set({{3, 4}, 7}, 7);
  for (std::size_t k = 0; k < 7; ++k) {
    for (int j = 0; j < 2; ++j) {
      const auto num = t.numerators(k)[static_cast<std::size_t>(j)];
      CHECK(num == static_cast<std::int64_t>((k + 1) * (j == 0 ? 3 : 4) % 7));
      CHECK(t.node(k)[static_cast<std::size_t>(j)] == static_cast<double>(num) / 7.0);
    }
  }
}

TEST_CASE("N = n gives the rank-1 lattice as a multiset") {
  const std::int64_t N = 13;
  const NodeList s = build_rational_generated_set({{2, 5}, N}, static_cast<std::size_t>(N));
  std::multiset<std::pair<std::int64_t, std::int64_t>> got, lattice;
  for (std::size_t k = 0; k < s.size(); ++k) got.insert({s.numerators(k)[0], s.numerators(k)[1]});
  for (std::int64_t k = 0; k < N; ++k) lattice.insert({2 * k % N, 5 * k % N});
  CHECK(got == lattice);
}

TEST_CASE("rational node sets with the origin are closed under addition") {
  for (std::int64_t N : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    for (std::int64_t z = 1; z < N; ++z) {
      const NodeList s = build_rational_generated_set({{z}, N}, static_cast<std::size_t>(N));
      std::set<std::int64_t> pts{0};
      for (std::size_t k = 0; k < s.size(); ++k) pts.insert(s.numerators(k)[0]);
      bool closed = true;
      for (auto a : pts)
        for (auto b : pts) closed = closed && pts.count((a + b) % N);
      CHECK(closed);
    }
  }
}

TEST_CASE("continuous with zeta = z/N agrees with the rational set") {
  std::mt19937_64 gen(2);
  for (std::int64_t N : {31, 101, 997, 9973}) {
    const std::int64_t z = 1 + static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(N - 1));
    const auto n = static_cast<std::size_t>(N);
    const NodeList r = build_rational_generated_set({{z}, N}, n);
    const NodeList c = build_generated_set({{static_cast<double>(z) / static_cast<double>(N)}}, n);
    for (std::size_t k = 0; k < n; ++k) {
      double diff = std::abs(r.node(k)[0] - c.node(k)[0]);
      diff = std::min(diff, 1.0 - diff);
      CHECK(diff <= 1e-12);
    }
  }
}

TEST_CASE("consecutive nodes differ by the generator modulo one") {
  const std::vector<double> z{0.123456789, 0.987654321, 0.5};
  const NodeList s = build_generated_set({z}, 5000);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    for (std::size_t j = 0; j < 3; ++j) {
      double d = s.node(k + 1)[j] - s.node(k)[j] - z[j];
      d -= std::round(d);
      CHECK(std::abs(d) < 1e-12);
    }
  }
}

TEST_CASE("wrap marker and validation") {
  CHECK(build_rational_generated_set({{1}, 5}, 7).wraps());
  CHECK_FALSE(build_rational_generated_set({{1}, 5}, 5).wraps());
  CHECK_THROWS(build_rational_generated_set({{1}, 6}, 3));
  CHECK_THROWS(build_generated_set({{1.0}}, 3));
  CHECK_THROWS(build_generated_set({{0.5}}, 0));
}

TEST_CASE("frac_multiple stays accurate for large k") {
  const double z = 0.7071067811865476;
  for (std::uint64_t k : {1ULL, 1000ULL, 1000000ULL, 123456789ULL}) {
    const long double exact = std::fmod(static_cast<long double>(k) * static_cast<long double>(z), 1.0L);
    CHECK(std::abs(frac_multiple(k, z) - static_cast<double>(exact)) < 1e-9);
  }
}

TEST_CASE("modular helpers") {
  CHECK(mod_floor(-3, 7) == 4);
  CHECK(mul_mod(1'000'000'007, 998'244'353, 2'147'483'647) ==
        static_cast<std::int64_t>((static_cast<__int128>(1'000'000'007) * 998'244'353) % 2'147'483'647));
}

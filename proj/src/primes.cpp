#include "genset/primes.hpp"

#include <array>
#include <cmath>

#include "genset/errors.hpp"

namespace genset {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 base, u64 exp, u64 n) {
  u64 result = 1;
  base %= n;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, n);
    base = mulmod(base, base, n);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime(std::int64_t value) {
  if (value < 2) return false;
  const auto n = static_cast<u64>(value);
  constexpr std::array<u64, 12> bases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : bases) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : bases) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::int64_t next_prime_at_least(double x) {
  constexpr double kCap = 4611686018427387904.0;  // 2^62
  if (!(x >= 2.0)) throw DomainError("next_prime_at_least requires x >= 2");
  if (x > kCap) throw DomainError("next_prime_at_least: argument above 2^62");
  auto candidate = static_cast<std::int64_t>(std::ceil(x));
  while (!is_prime(candidate)) ++candidate;
  return candidate;
}

}  // namespace genset

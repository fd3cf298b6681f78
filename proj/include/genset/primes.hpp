#pragma once

#include <cstdint>

namespace genset {

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::int64_t n);

/// Smallest prime >= ceil(x); x must lie in [2, 2^62].
std::int64_t next_prime_at_least(double x);

}  // namespace genset

#pragma once

// Generated sets {frac(k zeta) : k = 1..n} for continuous and rational
// generators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace genset {

struct ContinuousGenerator {
  std::vector<double> zeta;  ///< components in [0, 1)

  void validate() const;
};

struct RationalGenerator {
  std::vector<std::int64_t> z;  ///< components in {1, ..., N}
  std::int64_t N;               ///< prime modulus

  void validate() const;
};

using Generator = std::variant<ContinuousGenerator, RationalGenerator>;

/// Ordered node list x_k, k = 1..n (stored 0-based), duplicates retained.
class NodeList {
 public:
  NodeList(int d, std::size_t n, std::vector<double> coords, Generator provenance,
           std::vector<std::int64_t> numerators = {});

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return n_; }
  /// Node k (0-based row index; the paper-style index is k + 1).
  std::span<const double> node(std::size_t k) const {
    return {coords_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  const Generator& provenance() const noexcept { return provenance_; }
  bool is_rational() const noexcept { return std::holds_alternative<RationalGenerator>(provenance_); }
  /// Exact numerators (k z_j mod N) for rational provenance; empty otherwise.
  std::span<const std::int64_t> numerators(std::size_t k) const {
    return {numerators_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  /// Rational node lists with n > N repeat themselves.
  bool wraps() const noexcept { return wraps_; }

 private:
  int d_;
  std::size_t n_;
  std::vector<double> coords_;
  Generator provenance_;
  std::vector<std::int64_t> numerators_;
  bool wraps_ = false;
};

/// frac(k zeta_j) with the product k zeta_j carried as an exact two-term sum.
double frac_multiple(std::uint64_t k, double zeta);

NodeList build_generated_set(const ContinuousGenerator& gen, std::size_t n);
NodeList build_rational_generated_set(const RationalGenerator& gen, std::size_t n);
NodeList build_nodes(const Generator& gen, std::size_t n);

/// (a * b) mod N for 0 <= a, b and N > 0 without overflow.
std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t N);
/// Least nonnegative residue.
std::int64_t mod_floor(std::int64_t a, std::int64_t N);

}  // namespace genset

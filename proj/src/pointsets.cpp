#include "genset/pointsets.hpp"

#include <cmath>
#include <string>

#include "genset/errors.hpp"
#include "genset/primes.hpp"

namespace genset {

void ContinuousGenerator::validate() const {
  if (zeta.empty()) throw PreconditionError("generator must have at least one component");
  for (double v : zeta) {
    if (!(v >= 0.0 && v < 1.0)) throw PreconditionError("generator components must lie in [0, 1)");
  }
}

void RationalGenerator::validate() const {
  if (z.empty()) throw PreconditionError("generating vector must have at least one component");
  if (!is_prime(N)) throw PreconditionError("denominator N = " + std::to_string(N) + " is not prime");
  for (auto v : z) {
    if (v < 1 || v > N) throw PreconditionError("generating vector components must lie in [1, N]");
  }
}

NodeList::NodeList(int d, std::size_t n, std::vector<double> coords, Generator provenance,
                   std::vector<std::int64_t> numerators)
    : d_(d),
      n_(n),
      coords_(std::move(coords)),
      provenance_(std::move(provenance)),
      numerators_(std::move(numerators)) {
  if (coords_.size() != n_ * static_cast<std::size_t>(d_)) {
    throw PreconditionError("node coordinate array has the wrong size");
  }
  if (const auto* rg = std::get_if<RationalGenerator>(&provenance_)) {
    if (numerators_.size() != coords_.size()) {
      throw PreconditionError("rational node list needs exact numerators");
    }
    wraps_ = n_ > static_cast<std::size_t>(rg->N);
  }
}

double frac_multiple(std::uint64_t k, double zeta) {
  const double kd = static_cast<double>(k);
  const double p = kd * zeta;
  const double err = std::fma(kd, zeta, -p);  // k zeta = p + err exactly
  double f = (p - std::floor(p)) + err;
  if (f < 0.0) f += 1.0;
  if (f >= 1.0) f -= 1.0;
  return f;
}

std::int64_t mod_floor(std::int64_t a, std::int64_t N) {
  const std::int64_t r = a % N;
  return r < 0 ? r + N : r;
}

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t N) {
  const auto prod = static_cast<__int128>(mod_floor(a, N)) * mod_floor(b, N);
  return static_cast<std::int64_t>(prod % N);
}

NodeList build_generated_set(const ContinuousGenerator& gen, std::size_t n) {
  gen.validate();
  if (n < 1) throw PreconditionError("n must be at least 1");
  const auto d = gen.zeta.size();
  std::vector<double> coords(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) coords[k * d + j] = frac_multiple(k + 1, gen.zeta[j]);
  }
  return NodeList(static_cast<int>(d), n, std::move(coords), gen);
}

NodeList build_rational_generated_set(const RationalGenerator& gen, std::size_t n) {
  gen.validate();
  if (n < 1) throw PreconditionError("n must be at least 1");
  const auto d = gen.z.size();
  std::vector<double> coords(n * d);
  std::vector<std::int64_t> nums(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto num = mul_mod(static_cast<std::int64_t>(k + 1), gen.z[j], gen.N);
      nums[k * d + j] = num;
      coords[k * d + j] = static_cast<double>(num) / static_cast<double>(gen.N);
    }
  }
  return NodeList(static_cast<int>(d), n, std::move(coords), gen, std::move(nums));
}

NodeList build_nodes(const Generator& gen, std::size_t n) {
  return std::visit(
      [n](const auto& g) -> NodeList {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, ContinuousGenerator>) {
          return build_generated_set(g, n);
        } else {
          return build_rational_generated_set(g, n);
        }
      },
      gen);
}

}  // namespace genset

#pragma once

// CSV and JSON serialisation with fixed column names. Floating-point
// values are written with 17 significant digits.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "genset/error_analysis.hpp"
#include "genset/fourier_ls.hpp"
#include "genset/korobov.hpp"
#include "genset/pointsets.hpp"
#include "genset/search.hpp"

namespace genset {

std::string format_double(double v);

void write_index_set_csv(std::ostream& os, const IndexSet& set);
void write_nodes_csv(std::ostream& os, const NodeList& nodes);
void write_polynomial_csv(std::ostream& os, const FourierPolynomial& poly);

/// One flat WceReport record.
struct WceRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double eps = 0;
  double lambda = 0;
  double M = 0;
  std::int64_t N = 0;
  double wce_surrogate = 0;
  double wce_upper = 0;
  double sigma_m1 = 0;
  double bound = kInf;
  bool feasible = false;
  double sigma_min_sq = 0;
  double tail_op_sq = 0;
  bool cond_pass = false;

  static WceRow from(const WceReport& rep, double eps, double lambda, double M, std::int64_t N,
                     const BoundValue& bound);
};

inline constexpr const char* kWceCsvHeader =
    "n,m,eps,lambda,M,N,wce_surrogate,wce_upper,sigma_m1,bound,feasible,sigma_min_sq,tail_op_sq,"
    "cond_pass";

nlohmann::ordered_json to_json(const WceRow& row);
std::string to_csv_row(const WceRow& row);

/// {type, zeta|z, N, accepted, trials_used, sigma_min_sq, tail_op_sq, wce_surrogate}
nlohmann::ordered_json to_json(const SearchResult& result);

/// A finite double, or null for infinities and NaN.
nlohmann::ordered_json json_number(double v);

}  // namespace genset

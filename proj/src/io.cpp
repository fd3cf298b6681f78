#include "genset/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace genset {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_index_set_csv(std::ostream& os, const IndexSet& set) {
  for (int j = 1; j <= set.dim(); ++j) os << "h_" << j << ',';
  os << "sigma\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto v : set.frequency(i)) os << v << ',';
    os << format_double(set.sigma(i)) << '\n';
  }
}

void write_nodes_csv(std::ostream& os, const NodeList& nodes) {
  const auto* rational = std::get_if<RationalGenerator>(&nodes.provenance());
  os << 'k';
  for (int j = 1; j <= nodes.dim(); ++j) os << ",x_" << j;
  if (rational) {
    for (int j = 1; j <= nodes.dim(); ++j) os << ",num_" << j;
    os << ",N";
  }
  os << '\n';
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    os << k + 1;
    for (double x : nodes.node(k)) os << ',' << format_double(x);
    if (rational) {
      for (auto v : nodes.numerators(k)) os << ',' << v;
      os << ',' << rational->N;
    }
    os << '\n';
  }
}

void write_polynomial_csv(std::ostream& os, const FourierPolynomial& poly) {
  for (int j = 1; j <= poly.index_set.dim(); ++j) os << "h_" << j << ',';
  os << "re,im\n";
  for (std::size_t i = 0; i < poly.index_set.size(); ++i) {
    for (auto v : poly.index_set.frequency(i)) os << v << ',';
    const auto c = poly.coeffs(static_cast<Eigen::Index>(i));
    os << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  }
}

WceRow WceRow::from(const WceReport& rep, double eps, double lambda, double M, std::int64_t N,
                    const BoundValue& bound) {
  WceRow row;
  row.n = rep.n;
  row.m = rep.m;
  row.eps = eps;
  row.lambda = lambda;
  row.M = M;
  row.N = N;
  row.wce_surrogate = rep.wce_surrogate;
  row.wce_upper = rep.wce_upper;
  row.sigma_m1 = rep.sigma_m_plus_1;
  row.bound = bound.value;
  row.feasible = bound.feasible;
  row.sigma_min_sq = rep.cond.sigma_min_sq;
  row.tail_op_sq = rep.cond.tail_op_sq;
  row.cond_pass = rep.cond.thresholds_set && rep.cond.min_sv_pass && rep.cond.tail_pass;
  return row;
}

nlohmann::ordered_json to_json(const WceRow& row) {
  nlohmann::ordered_json j;
  j["n"] = row.n;
  j["m"] = row.m;
  j["eps"] = row.eps;
  j["lambda"] = row.lambda;
  j["M"] = json_number(row.M);
  j["N"] = row.N;
  j["wce_surrogate"] = json_number(row.wce_surrogate);
  j["wce_upper"] = json_number(row.wce_upper);
  j["sigma_m1"] = json_number(row.sigma_m1);
  j["bound"] = json_number(row.bound);
  j["feasible"] = row.feasible;
  j["sigma_min_sq"] = json_number(row.sigma_min_sq);
  j["tail_op_sq"] = json_number(row.tail_op_sq);
  j["cond_pass"] = row.cond_pass;
  return j;
}

std::string to_csv_row(const WceRow& row) {
  std::string s;
  s += std::to_string(row.n) + ',' + std::to_string(row.m) + ',' + format_double(row.eps) + ',' +
       format_double(row.lambda) + ',' + format_double(row.M) + ',' + std::to_string(row.N) + ',' +
       format_double(row.wce_surrogate) + ',' + format_double(row.wce_upper) + ',' +
       format_double(row.sigma_m1) + ',' + format_double(row.bound) + ',' +
       (row.feasible ? "true" : "false") + ',' + format_double(row.sigma_min_sq) + ',' +
       format_double(row.tail_op_sq) + ',' + (row.cond_pass ? "true" : "false");
  return s;
}

nlohmann::ordered_json to_json(const SearchResult& result) {
  nlohmann::ordered_json j;
  if (const auto* c = std::get_if<ContinuousGenerator>(&result.generator)) {
    j["type"] = "continuous";
    j["zeta"] = c->zeta;
    j["N"] = nullptr;
  } else {
    const auto& r = std::get<RationalGenerator>(result.generator);
    j["type"] = "rational";
    j["z"] = r.z;
    j["N"] = r.N;
  }
  j["accepted"] = result.accepted;
  j["trials_used"] = result.trials_used;
  j["sigma_min_sq"] = json_number(result.report.cond.sigma_min_sq);
  j["tail_op_sq"] = json_number(result.report.cond.tail_op_sq);
  j["wce_surrogate"] = json_number(result.report.wce_surrogate);
  return j;
}

}  // namespace genset

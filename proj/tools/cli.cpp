#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "genset/error_analysis.hpp"
#include "genset/errors.hpp"
#include "genset/io.hpp"
#include "genset/primes.hpp"
#include "genset/probabilistic.hpp"
#include "genset/random.hpp"
#include "genset/search.hpp"

namespace genset::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kKnownFields = {
    "d",        "alpha",     "gamma",      "subset_weights", "sigma_table", "M",
    "n",        "n_grid",    "eps",        "lambda",         "m",           "m_rule",
    "c_m",      "J_factor",  "J_cap",      "J_M",            "trials",      "max_trials",
    "seed",     "generator", "zeta",       "z",              "N",           "n_max",
    "rank_tol", "test_function", "C1",     "r",              "tamper",      "verify_systems"};

// ---------------------------------------------------------------- config

class Config {
 public:
  explicit Config(json doc) : doc_(std::move(doc)) {
    if (!doc_.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& [key, value] : doc_.items()) {
      if (!kKnownFields.count(key)) throw ConfigError("config: unknown field '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key) && !doc_[key].is_null(); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_number()) throw ConfigError("config: field '" + key + "' must be a number");
    return doc_[key].get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_number_integer()) throw ConfigError("config: field '" + key + "' must be an integer");
    return doc_[key].get<std::int64_t>();
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum = 1) const {
    const auto v = integer(key, static_cast<std::int64_t>(fallback));
    if (v < static_cast<std::int64_t>(minimum)) {
      throw ConfigError("config: field '" + key + "' must be at least " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_string()) throw ConfigError("config: field '" + key + "' must be a string");
    return doc_[key].get<std::string>();
  }

  template <class T>
  std::vector<T> list(const std::string& key) const {
    if (!doc_[key].is_array()) throw ConfigError("config: field '" + key + "' must be an array");
    std::vector<T> out;
    for (const auto& v : doc_[key]) {
      if (!v.is_number() || (std::is_integral_v<T> && !v.is_number_integer())) {
        throw ConfigError("config: field '" + key + "' has a non-numeric entry");
      }
      out.push_back(v.get<T>());
    }
    return out;
  }

  const json& raw(const std::string& key) const { return doc_.at(key); }

 private:
  json doc_;
};

Config load_config(const std::string& path) {
  if (path.empty()) return Config(json::object());
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return Config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------- context

struct Context {
  const Config& cfg;
  std::uint64_t seed;
  std::string format;
  int d = 1;
  double alpha = 0;
  double eps = 0.5;
  double lambda = 0;
  std::optional<KorobovParams> params;
  std::optional<SigmaSequence> seq;

  const SigmaSequence& sequence() const { return *seq; }
};

void build_space(Context& ctx) {
  const Config& cfg = ctx.cfg;
  ctx.d = static_cast<int>(cfg.count("d", 1));
  ctx.alpha = cfg.number("alpha", 2.0);
  ctx.eps = cfg.number("eps", 0.5);
  if (!(ctx.eps > 0 && ctx.eps <= 1)) throw ConfigError("config: field 'eps' must lie in (0, 1]");

  if (cfg.has("sigma_table")) {
    const json& table = cfg.raw("sigma_table");
    if (!table.is_array()) throw ConfigError("config: field 'sigma_table' must be an array");
    std::vector<TableEntry> entries;
    for (const auto& e : table) {
      if (!e.is_object() || !e.contains("h") || !e.contains("sigma")) {
        throw ConfigError("config: field 'sigma_table' entries need 'h' and 'sigma'");
      }
      entries.push_back({e["h"].get<std::vector<std::int64_t>>(), e["sigma"].get<double>()});
      if (entries.back().h.size() != static_cast<std::size_t>(ctx.d)) {
        throw ConfigError("config: field 'sigma_table' has a frequency of the wrong dimension");
      }
    }
    try {
      ctx.seq = SigmaSequence::table(ctx.d, entries);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config: field 'sigma_table': ") + e.what());
    }
  } else {
    try {
      if (cfg.has("subset_weights")) {
        ctx.params = KorobovParams(ctx.d, ctx.alpha, cfg.list<double>("subset_weights"));
      } else if (cfg.has("gamma") && cfg.raw("gamma").is_array()) {
        const auto g = cfg.list<double>("gamma");
        if (g.size() != static_cast<std::size_t>(ctx.d)) {
          throw ConfigError("config: field 'gamma' must have d entries");
        }
        ctx.params = KorobovParams::product(ctx.alpha, g);
      } else {
        const std::vector<double> g(static_cast<std::size_t>(ctx.d), cfg.number("gamma", 1.0));
        ctx.params = KorobovParams::product(ctx.alpha, g);
      }
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config: fields 'alpha'/'gamma': ") + e.what());
    }
    ctx.seq = SigmaSequence::korobov(*ctx.params);
  }
  ctx.lambda = cfg.number("lambda", (0.5 + ctx.alpha) / 2.0);
  if (ctx.params && !(ctx.lambda > 0.5 && ctx.lambda < ctx.alpha)) {
    throw ConfigError("config: field 'lambda' must lie in (1/2, alpha)");
  }
}

std::vector<std::size_t> n_grid(const Config& cfg, std::vector<std::size_t> fallback) {
  std::vector<std::size_t> grid;
  if (cfg.has("n_grid")) {
    for (auto v : cfg.list<std::int64_t>("n_grid")) {
      if (v < 1) throw ConfigError("config: field 'n_grid' entries must be positive");
      grid.push_back(static_cast<std::size_t>(v));
    }
  } else if (cfg.has("n")) {
    grid.push_back(cfg.count("n", 64));
  } else {
    grid = std::move(fallback);
  }
  if (grid.empty()) throw ConfigError("config: field 'n_grid' is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw ConfigError("config: field 'n_grid' must be strictly increasing");
  }
  return grid;
}

DivisorConstant divisor_constant(const Context& ctx, std::size_t largest_n) {
  return c_epsilon(ctx.eps, ctx.cfg.count("n_max", largest_n));
}

std::size_t choose_m(const Context& ctx, std::size_t n, const DivisorConstant& c) {
  const Config& cfg = ctx.cfg;
  std::size_t m = 0;
  if (cfg.has("m")) {
    m = cfg.count("m", 1);
  } else {
    const std::string rule = cfg.text("m_rule", "scaling");
    if (rule == "scaling") {
      const double cm = cfg.number("c_m", 1.0);
      if (!(cm > 0)) throw ConfigError("config: field 'c_m' must be positive");
      m = static_cast<std::size_t>(std::floor(cm * std::pow(static_cast<double>(n), (1 - ctx.eps) / (1 + ctx.eps))));
    } else if (rule == "feasible") {
      m = largest_feasible_m_general(n, ctx.eps, ctx.sequence(), c);
    } else if (rule == "mbound") {
      const double C1 = cfg.number("C1", 1.0), r = cfg.number("r", 1.0);
      while (m < n && m_condition_holds(n, m + 1, ctx.eps, C1, r, c)) ++m;
    } else if (rule == "korobov") {
      if (!ctx.params) throw ConfigError("config: m_rule 'korobov' needs a Korobov space");
      m = korobov_bound(n, ctx.eps, ctx.lambda, *ctx.params, c).m;
    } else {
      throw ConfigError("config: field 'm_rule' must be scaling, feasible, mbound or korobov");
    }
  }
  return std::clamp<std::size_t>(m, 1, n);
}

SurrogateSpace surrogate(const Context& ctx, std::size_t m) {
  if (ctx.cfg.has("J_M")) {
    if (!ctx.params) throw ConfigError("config: field 'J_M' needs a Korobov space");
    return make_surrogate_from(ctx.sequence(), enumerate_cross(*ctx.params, ctx.cfg.number("J_M", 0)));
  }
  SurrogateOptions opt;
  opt.cross_factor = ctx.cfg.number("J_factor", opt.cross_factor);
  opt.cap = ctx.cfg.count("J_cap", opt.cap);
  return make_surrogate(ctx.sequence(), m, opt);
}

WceOptions wce_options(const Context& ctx) {
  WceOptions o;
  o.rank_tol = ctx.cfg.number("rank_tol", o.rank_tol);
  return o;
}

bool wants_rational(const Context& ctx) {
  const std::string g = ctx.cfg.text("generator", ctx.cfg.has("z") ? "rational" : "continuous");
  if (g != "continuous" && g != "rational") {
    throw ConfigError("config: field 'generator' must be continuous or rational");
  }
  return g == "rational";
}

std::int64_t modulus(const Context& ctx, std::size_t n, const DivisorConstant& c) {
  if (ctx.cfg.has("N")) {
    const auto N = ctx.cfg.integer("N", 0);
    if (!is_prime(N)) throw ConfigError("config: field 'N' must be prime");
    return N;
  }
  if (!ctx.params) throw ConfigError("config: field 'N' is required for table spaces");
  return korobov_rational_bound(n, ctx.eps, ctx.lambda, *ctx.params, c).N;
}

std::optional<Generator> explicit_generator(const Context& ctx, std::size_t n, const DivisorConstant& c) {
  const Config& cfg = ctx.cfg;
  try {
    if (cfg.has("zeta")) {
      ContinuousGenerator g{cfg.list<double>("zeta")};
      if (g.zeta.size() != static_cast<std::size_t>(ctx.d)) throw ConfigError("config: field 'zeta' must have d entries");
      g.validate();
      return g;
    }
    if (cfg.has("z")) {
      RationalGenerator g{cfg.list<std::int64_t>("z"), modulus(ctx, n, c)};
      if (g.z.size() != static_cast<std::size_t>(ctx.d)) throw ConfigError("config: field 'z' must have d entries");
      g.validate();
      return g;
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: generator: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: generator: ") + e.what());
  }
  return std::nullopt;
}

struct Searched {
  SearchResult result;
  AcceptanceCriteria criteria;
};

// Evaluates the configured generator, or searches for one.
Searched find_generator(const Context& ctx, std::size_t n, std::size_t m, const SurrogateSpace& space,
                        const DivisorConstant& c) {
  const bool rational = wants_rational(ctx) || ctx.cfg.has("z");
  AcceptanceCriteria crit;
  std::int64_t N = 0;
  if (rational) {
    N = modulus(ctx, n, c);
    crit = AcceptanceCriteria::rational_modulus(n, m, ctx.eps, N, space, c);
  } else {
    crit = AcceptanceCriteria::continuous(n, m, ctx.eps, space, c);
  }
  if (auto g = explicit_generator(ctx, n, c)) return {accept(*g, n, crit, space, wce_options(ctx)), crit};
  const std::size_t trials = ctx.cfg.count("max_trials", 100);
  if (rational) return {search_rational(n, N, crit, space, trials, ctx.seed, wce_options(ctx)), crit};
  return {search_continuous(n, crit, space, trials, ctx.seed, wce_options(ctx)), crit};
}

ojson bound_json(const BoundValue& b) {
  ojson j;
  j["feasible"] = b.feasible;
  j["value"] = json_number(b.value);
  j["reason"] = b.reason;
  return j;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

template <class T>
std::string joined_vector(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    if constexpr (std::is_floating_point_v<T>) s += format_double(v[i]);
    else s += std::to_string(v[i]);
  }
  return s;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto k = static_cast<double>(x.size());
  if (x.size() < 2) return std::nan("");
  const double sx = std::accumulate(x.begin(), x.end(), 0.0);
  const double sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// ---------------------------------------------------------------- commands

int cmd_cross(Context& ctx, std::ostream& out, std::ostream& err) {
  if (!ctx.params) throw ConfigError("config: cross needs a Korobov space");
  if (!ctx.cfg.has("M")) throw ConfigError("config: field 'M' is required");
  const double M = ctx.cfg.number("M", 0);
  if (!(M >= 0)) throw ConfigError("config: field 'M' must be nonnegative");
  const IndexSet set = enumerate_cross(*ctx.params, M);
  const double hc = std::pow(M, 1.0 / ctx.lambda) * mu(ctx.lambda, *ctx.params);
  if (ctx.format == "json") {
    ojson j;
    j["d"] = ctx.d;
    j["alpha"] = ctx.alpha;
    j["M"] = M;
    j["lambda"] = ctx.lambda;
    j["cardinality"] = set.size();
    j["hc_bound"] = json_number(hc);
    j["entries"] = ojson::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto h = set.frequency(i);
      j["entries"].push_back({{"h", std::vector<std::int64_t>(h.begin(), h.end())}, {"sigma", set.sigma(i)}});
    }
    out << j.dump(2) << '\n';
  } else {
    write_index_set_csv(out, set);
    err << "cardinality=" << set.size() << " lambda=" << format_double(ctx.lambda)
        << " hc_bound=" << format_double(hc) << '\n';
  }
  return kExitOk;
}

int cmd_nodes(Context& ctx, std::ostream& out, std::ostream&) {
  const std::size_t n = ctx.cfg.count("n", 64);
  const auto c = divisor_constant(ctx, n);
  Generator gen;
  if (auto g = explicit_generator(ctx, n, c)) {
    gen = *g;
  } else if (wants_rational(ctx)) {
    gen = rational_trial(ctx.d, modulus(ctx, n, c), ctx.seed, 0);
  } else {
    gen = continuous_trial(ctx.d, ctx.seed, 0);
  }
  const NodeList nodes = build_nodes(gen, n);
  if (ctx.format == "json") {
    ojson j;
    j["n"] = n;
    j["d"] = ctx.d;
    j["wraps"] = nodes.wraps();
    ojson pts = ojson::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto x = nodes.node(k);
      pts.push_back(std::vector<double>(x.begin(), x.end()));
    }
    j["nodes"] = std::move(pts);
    if (const auto* r = std::get_if<RationalGenerator>(&gen)) {
      j["type"] = "rational";
      j["z"] = r->z;
      j["N"] = r->N;
    } else {
      j["type"] = "continuous";
      j["zeta"] = std::get<ContinuousGenerator>(gen).zeta;
    }
    out << j.dump(2) << '\n';
  } else {
    write_nodes_csv(out, nodes);
  }
  return kExitOk;
}

FourierPolynomial test_function(const Context& ctx, const IndexSet& J) {
  const std::string kind = ctx.cfg.text("test_function", "kernel");
  CVector coeffs(static_cast<Eigen::Index>(J.size()));
  if (kind == "zero") {
    coeffs.setZero();
  } else if (kind == "kernel") {
    for (std::size_t i = 0; i < J.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = J.sigma(i) * J.sigma(i);
  } else if (kind == "random") {
    const CounterRng rng = CounterRng(ctx.seed).child(1);
    for (std::size_t i = 0; i < J.size(); ++i) {
      const double re = 2 * rng.uniform(2 * i) - 1, im = 2 * rng.uniform(2 * i + 1) - 1;
      coeffs(static_cast<Eigen::Index>(i)) = J.sigma(i) * std::complex<double>(re, im);
    }
  } else {
    throw ConfigError("config: field 'test_function' must be kernel, random or zero");
  }
  FourierPolynomial f(J, coeffs);
  const double norm = std::sqrt(f.h_sigma_norm_sq());
  if (norm > 0) f.coeffs /= norm;
  return f;
}

int cmd_approx(Context& ctx, std::ostream& out, std::ostream& err) {
  const std::size_t n = ctx.cfg.count("n", 64);
  const auto c = divisor_constant(ctx, n);
  const std::size_t m = choose_m(ctx, n, c);
  const SurrogateSpace space = surrogate(ctx, m);
  const Searched found = find_generator(ctx, n, m, space, c);
  const NodeList nodes = build_nodes(found.result.generator, n);
  const FourierPolynomial f = test_function(ctx, space.J);
  const LSResult ls = approximate(f, nodes, space.J.prefix(m), ctx.cfg.number("rank_tol", kDefaultRankTol));

  double err2 = 0;
  for (std::size_t i = 0; i < space.J.size(); ++i) {
    auto diff = f.coeffs(static_cast<Eigen::Index>(i));
    if (i < m) diff -= ls.polynomial.coeffs(static_cast<Eigen::Index>(i));
    err2 += std::norm(diff);
  }
  const double l2 = std::sqrt(err2);
  if (ctx.format == "json") {
    ojson j;
    j["n"] = n;
    j["m"] = m;
    j["test_function"] = ctx.cfg.text("test_function", "kernel");
    j["h_sigma_norm"] = std::sqrt(f.h_sigma_norm_sq());
    j["l2_error"] = l2;
    j["wce_surrogate"] = json_number(found.result.report.wce_surrogate);
    j["residual_norm"] = ls.residual_norm;
    j["sigma_min"] = ls.sigma_min;
    j["sigma_max"] = ls.sigma_max;
    j["rank_deficient"] = ls.rank_deficient;
    j["coefficients"] = ojson::array();
    for (std::size_t i = 0; i < m; ++i) {
      const auto h = ls.polynomial.index_set.frequency(i);
      const auto v = ls.polynomial.coeffs(static_cast<Eigen::Index>(i));
      j["coefficients"].push_back({{"h", std::vector<std::int64_t>(h.begin(), h.end())},
                                   {"re", v.real()},
                                   {"im", v.imag()}});
    }
    out << j.dump(2) << '\n';
  } else {
    write_polynomial_csv(out, ls.polynomial);
    err << "l2_error=" << format_double(l2) << " wce_surrogate=" << format_double(found.result.report.wce_surrogate)
        << '\n';
  }
  return kExitOk;
}

double korobov_M(const Context& ctx, std::size_t n, const DivisorConstant& c) {
  return ctx.params ? korobov_bound(n, ctx.eps, ctx.lambda, *ctx.params, c).M : 0.0;
}

int cmd_wce(Context& ctx, std::ostream& out, std::ostream&) {
  const std::size_t n = ctx.cfg.count("n", 64);
  const auto c = divisor_constant(ctx, n);
  const std::size_t m = choose_m(ctx, n, c);
  const SurrogateSpace space = surrogate(ctx, m);
  const Searched found = find_generator(ctx, n, m, space, c);
  std::int64_t N = 0;
  BoundValue bound;
  if (const auto* r = std::get_if<RationalGenerator>(&found.result.generator)) {
    N = r->N;
    bound = rational_theorem_bound(n, m, ctx.eps, ctx.cfg.number("C1", 1.0), ctx.cfg.number("r", 1.0), N,
                                   space, c)
                .bound;
  } else {
    bound = theorem_bound_general(n, m, ctx.eps, space, c);
  }
  const WceRow row = WceRow::from(found.result.report, ctx.eps, ctx.lambda, korobov_M(ctx, n, c), N, bound);
  if (ctx.format == "json") {
    out << to_json(row).dump(2) << '\n';
  } else {
    out << kWceCsvHeader << '\n' << to_csv_row(row) << '\n';
  }
  return kExitOk;
}

int cmd_bound(Context& ctx, std::ostream& out, std::ostream&) {
  const auto grid = n_grid(ctx.cfg, {64, 256, 1024, 4096});
  const auto c = divisor_constant(ctx, grid.back());
  const double C1 = ctx.cfg.number("C1", 1.0), r = ctx.cfg.number("r", 1.0);
  ojson rows = ojson::array();
  std::vector<std::string> csv;
  bool any = false;
  for (std::size_t n : grid) {
    const std::size_t m = choose_m(ctx, n, c);
    const SurrogateSpace space = surrogate(ctx, m);
    const BoundValue general = theorem_bound_general(n, m, ctx.eps, space, c);
    const RegularBound regular = theorem_bound_regular(n, m, ctx.eps, C1, r, space, c);
    std::optional<KorobovBound> kc, kr;
    if (ctx.params) {
      kc = korobov_bound(n, ctx.eps, ctx.lambda, *ctx.params, c);
      kr = korobov_rational_bound(n, ctx.eps, ctx.lambda, *ctx.params, c);
    }
    const std::int64_t N = modulus(ctx, n, c);
    const RationalBound rational = rational_theorem_bound(n, m, ctx.eps, C1, r, N, space, c);
    const bool row_any = general.feasible || regular.n_form.feasible || rational.bound.feasible ||
                         (kc && kc->feasible) || (kr && kr->feasible);
    any = any || row_any;

    ojson j;
    j["n"] = n;
    j["m"] = m;
    j["eps"] = ctx.eps;
    j["lambda"] = ctx.lambda;
    j["C_eps"] = c.value;
    j["general"] = bound_json(general);
    j["regular"] = bound_json(regular.n_form);
    j["m_only"] = bound_json(regular.m_form);
    j["rational"] = bound_json(rational.bound);
    j["N"] = N;
    auto kjson = [](const std::optional<KorobovBound>& k) {
      ojson o;
      if (!k) return ojson(nullptr);
      o["feasible"] = k->feasible;
      o["value"] = json_number(k->bound);
      o["M"] = k->M;
      o["m"] = k->m;
      o["reason"] = k->reason;
      return o;
    };
    j["korobov"] = kjson(kc);
    j["korobov_rational"] = kjson(kr);
    j["feasible"] = row_any;
    rows.push_back(std::move(j));

    auto num = [](const BoundValue& b) { return format_double(b.value) + ',' + csv_bool(b.feasible); };
    std::string line = std::to_string(n) + ',' + std::to_string(m) + ',' + format_double(ctx.eps) + ',' +
                       format_double(ctx.lambda) + ',' + format_double(c.value) + ',' + num(general) + ',' +
                       num(regular.n_form) + ',' + num(regular.m_form) + ',' + num(rational.bound) + ',' +
                       std::to_string(N) + ',';
    if (kc) {
      line += format_double(kc->M) + ',' + std::to_string(kc->m) + ',' + format_double(kc->bound) + ',' +
              csv_bool(kc->feasible) + ',' + format_double(kr->bound) + ',' + csv_bool(kr->feasible);
    } else {
      line += "nan,0,nan,false,nan,false";
    }
    line += ',' + csv_bool(row_any);
    csv.push_back(line);
  }
  if (ctx.format == "json") {
    out << rows.dump(2) << '\n';
  } else {
    out << "n,m,eps,lambda,C_eps,general,general_feasible,regular,regular_feasible,m_only,m_only_feasible,"
           "rational,rational_feasible,N,korobov_M,korobov_m,korobov,korobov_feasible,korobov_rational,"
           "korobov_rational_feasible,feasible\n";
    for (const auto& l : csv) out << l << '\n';
  }
  return any ? kExitOk : kExitInfeasible;
}

int cmd_search(Context& ctx, std::ostream& out, std::ostream&) {
  const std::size_t n = ctx.cfg.count("n", 64);
  const auto c = divisor_constant(ctx, n);
  const std::size_t m = choose_m(ctx, n, c);
  const SurrogateSpace space = surrogate(ctx, m);
  const Searched found = find_generator(ctx, n, m, space, c);
  const SearchResult& res = found.result;
  std::optional<KorobovBound> kc, kr;
  if (ctx.params) {
    kc = korobov_bound(n, ctx.eps, ctx.lambda, *ctx.params, c);
    kr = korobov_rational_bound(n, ctx.eps, ctx.lambda, *ctx.params, c);
  }
  const bool rational = std::holds_alternative<RationalGenerator>(res.generator);
  const double kb = rational ? (kr ? kr->bound : kInf) : (kc ? kc->bound : kInf);
  if (ctx.format == "json") {
    ojson j;
    j["result"] = to_json(res);
    j["n"] = n;
    j["m"] = m;
    j["eps"] = ctx.eps;
    j["lambda"] = ctx.lambda;
    j["wce_upper"] = json_number(res.report.wce_upper);
    j["implied_bound"] = json_number(found.criteria.implied_bound(space));
    j["korobov_bound"] = json_number(kb);
    out << j.dump(2) << '\n';
  } else {
    std::string gen, N = "";
    if (rational) {
      const auto& r = std::get<RationalGenerator>(res.generator);
      gen = joined_vector(r.z);
      N = std::to_string(r.N);
    } else {
      gen = joined_vector(std::get<ContinuousGenerator>(res.generator).zeta);
    }
    out << "type,generator,N,accepted,trials_used,sigma_min_sq,tail_op_sq,wce_surrogate,wce_upper,"
           "implied_bound,korobov_bound\n";
    out << (rational ? "rational" : "continuous") << ',' << gen << ',' << N << ',' << csv_bool(res.accepted)
        << ',' << res.trials_used << ',' << format_double(res.report.cond.sigma_min_sq) << ','
        << format_double(res.report.cond.tail_op_sq) << ',' << format_double(res.report.wce_surrogate) << ','
        << format_double(res.report.wce_upper) << ',' << format_double(found.criteria.implied_bound(space))
        << ',' << format_double(kb) << '\n';
  }
  return kExitOk;
}

int cmd_convergence(Context& ctx, std::ostream& out, std::ostream&) {
  const auto grid = n_grid(ctx.cfg, {32, 64, 128, 256, 512, 1024, 2048});
  const auto c = divisor_constant(ctx, grid.back());
  std::vector<double> lx, ly;
  std::vector<std::string> csv;
  ojson rows = ojson::array();
  bool any = false;
  double slope = std::nan("");
  for (std::size_t n : grid) {
    const std::size_t m = choose_m(ctx, n, c);
    const SurrogateSpace space = surrogate(ctx, m);
    const Searched found = find_generator(ctx, n, m, space, c);
    const auto& rep = found.result.report;
    std::int64_t N = 0;
    if (const auto* r = std::get_if<RationalGenerator>(&found.result.generator)) N = r->N;
    BoundValue bound;
    double M = 0;
    if (ctx.params) {
      const KorobovBound kb = N ? korobov_rational_bound(n, ctx.eps, ctx.lambda, *ctx.params, c)
                                : korobov_bound(n, ctx.eps, ctx.lambda, *ctx.params, c);
      bound = {kb.feasible, kb.bound, kb.reason};
      M = kb.M;
    } else {
      bound = theorem_bound_general(n, m, ctx.eps, space, c);
    }
    any = any || bound.feasible;
    if (rep.wce_surrogate > 0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(rep.wce_surrogate));
    }
    slope = least_squares_slope(lx, ly);
    const WceRow row = WceRow::from(rep, ctx.eps, ctx.lambda, M, N, bound);
    ojson j = to_json(row);
    j["accepted"] = found.result.accepted;
    j["trials_used"] = found.result.trials_used;
    j["slope"] = json_number(slope);
    rows.push_back(std::move(j));
    csv.push_back(to_csv_row(row) + ',' + csv_bool(found.result.accepted) + ',' +
                  std::to_string(found.result.trials_used) + ',' + format_double(slope));
  }
  if (ctx.format == "json") {
    ojson j;
    j["rows"] = std::move(rows);
    j["slope"] = json_number(slope);
    if (ctx.params) {
      j["predicted_slope"] = -sobolev_rate_prediction(ctx.alpha, 0.0, 1.0, ctx.eps).exponent;
    }
    out << j.dump(2) << '\n';
  } else {
    out << kWceCsvHeader << ",accepted,trials_used,slope\n";
    for (const auto& l : csv) out << l << '\n';
  }
  return any ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string lemma, part;
  ojson params;
  double closed_form = 0, estimate = 0, std_error = 0, bound = 0;
  bool pass = false;
};

ojson system_json(const WeightedSystem& sys) {
  ojson j;
  j["n"] = sys.rows();
  j["entries"] = ojson::array();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto h = sys.h(i);
    j["entries"].push_back({{"a", sys.a(i)}, {"h", std::vector<std::int64_t>(h.begin(), h.end())}});
  }
  return j;
}

WeightedSystem random_system(const CounterRng& rng, int d) {
  const std::size_t n = 2 + static_cast<std::size_t>(rng.integer(0, 0, 4));
  const std::size_t count = 1 + static_cast<std::size_t>(rng.integer(1, 0, 3));
  std::vector<double> a;
  for (std::size_t i = 0; i < count; ++i) a.push_back(0.1 + rng.uniform(10 + i));
  std::sort(a.rbegin(), a.rend());
  std::vector<WeightedEntry> entries;
  std::set<std::vector<std::int64_t>> seen;
  std::uint64_t ctr = 100;
  while (entries.size() < count) {
    std::vector<std::int64_t> h(static_cast<std::size_t>(d));
    for (auto& v : h) v = rng.integer(ctr++, -4, 4);
    if (seen.insert(h).second) entries.push_back({a[entries.size()], h});
  }
  return WeightedSystem(d, n, std::move(entries));
}

CVector random_unit(const CounterRng& rng, std::size_t len, std::uint64_t offset) {
  CVector t(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) {
    t(static_cast<Eigen::Index>(i)) = {2 * rng.uniform(offset + 2 * i) - 1, 2 * rng.uniform(offset + 2 * i + 1) - 1};
  }
  return t / t.norm();
}

int cmd_verify(Context& ctx, std::ostream& out, std::ostream&) {
  const std::size_t trials = ctx.cfg.count("trials", 100'000, 100);
  const std::size_t systems = ctx.cfg.count("verify_systems", 3);
  const std::string tamper = ctx.cfg.text("tamper", "");
  const CounterRng root(ctx.seed);
  std::vector<Check> checks;
  // tamper moves a closed form away from the estimate or shrinks a bound below it
  auto tampered = [&](const std::string& lemma, const std::string& part, double v) {
    return tamper == lemma + "/" + part ? v * 1.5 + 1.0 : v;
  };
  auto tampered_bound = [&](const std::string& lemma, const std::string& part, double v) {
    return tamper == lemma + "/" + part ? -1.0 - std::abs(v) : v;
  };

  const auto c_half = c_epsilon(0.5, 10'000), c_one = c_epsilon(1.0, 10'000);
  for (std::size_t s = 0; s < systems; ++s) {
    const CounterRng rng = root.child(s);
    const WeightedSystem sys = random_system(rng, 1 + static_cast<int>(s % 2));
    const CVector tn = random_unit(rng, sys.rows(), 1000);
    const CVector ti = random_unit(rng, sys.size(), 2000);
    for (Moment which : {Moment::A_star, Moment::A}) {
      const bool star = which == Moment::A_star;
      const CVector& t = star ? tn : ti;
      const MomentEstimate est = mc_moments(sys, t, trials, ctx.seed + s, which);
      const std::string part = star ? "1" : "2";
      Check mean{"singvalbounds", part + "-mean", system_json(sys)};
      mean.closed_form = tampered("singvalbounds", part + "-mean", star ? expected_A_star_t(sys, t) : expected_A_t(sys, t));
      mean.estimate = est.mean;
      mean.std_error = est.std_error;
      mean.bound = 3.0 * est.std_error;
      mean.pass = std::abs(mean.estimate - mean.closed_form) <= mean.bound + 1e-12 * std::abs(mean.closed_form);
      checks.push_back(mean);
      for (const auto* c : {&c_half, &c_one}) {
        Check var{"singvalbounds", part + "-variance", system_json(sys)};
        var.params["eps"] = c->epsilon;
        var.bound = tampered_bound("singvalbounds", part + "-variance",
                                   star ? variance_bound_A_star(sys, c->epsilon, *c) : variance_bound_A(sys, c->epsilon, *c));
        var.closed_form = var.bound;
        var.estimate = est.variance;
        var.pass = var.estimate <= var.bound;
        checks.push_back(var);
      }
    }
  }

  {
    const WeightedSystem sys(1, 3, {{1.0, {1}}, {0.7, {-2}}});
    CVector t(2);
    t << 0.6, 0.8;
    const std::int64_t N = 31;
    const auto ex = exhaustive_rational_moments(sys, t, N, Moment::A);
    Check mean{"rationalbound", "2-mean", system_json(sys)};
    mean.params["N"] = N;
    mean.closed_form = tampered("rationalbound", "2-mean", expected_A_t(sys, t));
    mean.estimate = ex.mean;
    mean.bound = 1e-12;
    mean.pass = !ex.outside_hypothesis && std::abs(ex.mean - mean.closed_form) <= 1e-12;
    checks.push_back(mean);

    CVector tn(3);
    tn << 0.6, 0.0, 0.8;
    const auto ex1 = exhaustive_rational_moments(sys, tn, N, Moment::A_star);
    Check m1{"rationalbound", "1-mean", system_json(sys)};
    m1.params["N"] = N;
    m1.closed_form = tampered("rationalbound", "1-mean", expected_A_star_t_rational(sys, tn, N));
    m1.estimate = ex1.mean;
    m1.bound = 1e-12;
    m1.pass = std::abs(ex1.mean - m1.closed_form) <= 1e-12;
    checks.push_back(m1);

    Check v1{"rationalbound", "1-variance", system_json(sys)};
    v1.params["N"] = N;
    v1.estimate = ex1.variance;
    v1.bound = tampered_bound("rationalbound", "1-variance", variance_bound_A_star_rational(sys, 0.5, c_half, N));
    v1.closed_form = v1.bound;
    v1.pass = v1.estimate <= v1.bound;
    checks.push_back(v1);

    Check v2{"rationalbound", "2-variance", system_json(sys)};
    v2.params["N"] = N;
    v2.estimate = ex.variance;
    v2.bound = tampered_bound("rationalbound", "2-variance", variance_bound_A(sys, 0.5, c_half));
    v2.closed_form = v2.bound;
    v2.pass = v2.estimate <= v2.bound;
    checks.push_back(v2);
  }

  {
    const std::uint64_t n_max = 10'000;
    for (const auto* c : {&c_half, &c_one}) {
      double worst = 0;
      bool brute_ok = true;
      for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto ds = divisor_sum(n);
        if (n <= 2000) {
          std::uint64_t brute = 0;
          for (std::int64_t i = -static_cast<std::int64_t>(n); i <= static_cast<std::int64_t>(n); ++i) {
            if (i != 0 && static_cast<std::int64_t>(n) % i == 0) ++brute;
          }
          brute_ok = brute_ok && brute == ds;
        }
        worst = std::max(worst, static_cast<double>(ds) / std::pow(static_cast<double>(n), c->epsilon));
      }
      Check chk{"divisor", "bound", ojson{{"eps", c->epsilon}, {"n_max", n_max}}};
      chk.closed_form = tampered_bound("divisor", "bound", c->value);
      chk.estimate = worst;
      chk.bound = chk.closed_form;
      chk.pass = brute_ok && worst <= chk.bound;
      checks.push_back(chk);
    }
  }

  {
    bool ok = true;
    double worst_gap = 0;
    for (int d = 1; d <= 3; ++d) {
      const KorobovParams p = KorobovParams::unweighted(d, 1.0);
      for (double M = 0.5; M <= 20.0; M += 0.75) {
        const double rec = static_cast<double>(unweighted_cross_cardinality(d, M));
        const double enu = static_cast<double>(enumerate_cross(p, M).size());
        worst_gap = std::max(worst_gap, std::abs(rec - enu));
        ok = ok && rec == enu;
      }
    }
    Check chk{"hypcross", "recurrence", ojson{{"d_max", 3}, {"M_max", 20}}};
    chk.closed_form = tampered("hypcross", "recurrence", 0.0);
    chk.estimate = worst_gap;
    chk.bound = 0;
    chk.pass = ok && chk.closed_form == 0.0;
    checks.push_back(chk);
  }

  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  if (ctx.format == "json") {
    ojson j;
    j["checks"] = ojson::array();
    for (const auto& c : checks) {
      j["checks"].push_back({{"lemma", c.lemma},
                             {"part", c.part},
                             {"params", c.params},
                             {"closed_form", json_number(c.closed_form)},
                             {"estimate", json_number(c.estimate)},
                             {"std_error", json_number(c.std_error)},
                             {"bound", json_number(c.bound)},
                             {"pass", c.pass}});
    }
    j["all_pass"] = all;
    out << j.dump(2) << '\n';
  } else {
    out << "lemma,part,params,closed_form,estimate,std_error,bound,pass\n";
    for (const auto& c : checks) {
      std::string p = c.params.dump();
      std::string quoted;
      for (char ch : p) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      out << c.lemma << ',' << c.part << ",\"" << quoted << "\"," << format_double(c.closed_form) << ','
          << format_double(c.estimate) << ',' << format_double(c.std_error) << ',' << format_double(c.bound)
          << ',' << csv_bool(c.pass) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least-squares approximation on generated point sets"};
  app.require_subcommand(1);
  std::string config_path, out_path, format = "csv";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "flat JSON configuration file");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));

  using Command = std::function<int(Context&, std::ostream&, std::ostream&)>;
  const std::vector<std::pair<std::string, Command>> commands = {
      {"cross", cmd_cross},   {"nodes", cmd_nodes},   {"approx", cmd_approx},
      {"wce", cmd_wce},       {"bound", cmd_bound},   {"search", cmd_search},
      {"convergence", cmd_convergence}, {"verify", cmd_verify}};
  std::map<std::string, std::string> help = {
      {"cross", "enumerate a weighted hyperbolic cross"},
      {"nodes", "write a generated node list"},
      {"approx", "least-squares fit of a test function"},
      {"wce", "worst-case error report"},
      {"bound", "tabulate the error bounds over an n grid"},
      {"search", "search for an accepted generator"},
      {"convergence", "worst-case error against n with a fitted slope"},
      {"verify", "moment and oracle checks"}};
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help[name]);
    sub->fallthrough();
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const Config cfg = load_config(config_path);
    Context ctx{cfg, seed ? *seed : static_cast<std::uint64_t>(cfg.integer("seed", 0)), format, 1, 0, 0.5, 0,
                std::nullopt, std::nullopt};
    build_space(ctx);
    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
      sink = &file;
    }
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) return fn(ctx, *sink, err);
    }
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace genset::cli

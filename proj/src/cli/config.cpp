#include "config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "polarsturm/errors.hpp"

namespace polarsturm::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

}  // namespace

Mat parse_matrix(const Json& j, int rows, int cols,
                 const std::string& where) {
  if (j.is_number()) {
    if (rows > 1 || cols > 1) fail(where, "expected a matrix");
    Mat m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array");
  // Accept a flat vector for a single row or column.
  if (j[0].is_number()) {
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
      v(static_cast<int>(i)) = as_number(j[i], where);
    if (rows == 1 || (rows < 0 && cols > 1)) return v.transpose();
    if (cols == 1 || rows < 0) return v;
    fail(where, "expected a matrix, got a flat array");
  }
  const size_t r = j.size();
  const size_t c = j[0].is_array() ? j[0].size() : 0;
  if (c == 0) fail(where, "expected rows of numbers");
  Mat m(static_cast<int>(r), static_cast<int>(c));
  for (size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c)
      fail(where, "ragged matrix rows");
    for (size_t k = 0; k < c; ++k)
      m(static_cast<int>(i), static_cast<int>(k)) = as_number(j[i][k], where);
  }
  if (rows > 0 && (m.rows() != rows || m.cols() != cols)) {
    std::ostringstream os;
    os << "expected " << rows << "x" << cols << ", got " << m.rows() << "x"
       << m.cols();
    fail(where, os.str());
  }
  return m;
}

CoeffFn parse_coefficient(const Json& j, int n, const std::string& where) {
  if (j.is_number() || (j.is_array() && !j.empty()))
    return CoeffFn::constant(parse_matrix(j, n, n, where));
  if (!j.is_object()) fail(where, "expected a coefficient spec");
  const std::string kind = j.value("kind", std::string());
  if (kind == "zero") return CoeffFn::zero(n);
  if (kind == "constant") {
    if (!j.contains("value")) fail(where, "constant needs \"value\"");
    return CoeffFn::constant(parse_matrix(j.at("value"), n, n, where));
  }
  if (kind == "polynomial") {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array() ||
        j.at("coeffs").empty())
      fail(where, "polynomial needs a nonempty \"coeffs\" array");
    std::vector<Mat> coeffs;
    for (size_t k = 0; k < j.at("coeffs").size(); ++k)
      coeffs.push_back(parse_matrix(j.at("coeffs")[k], n, n,
                                    where + ".coeffs"));
    return CoeffFn::polynomial(coeffs);
  }
  if (kind == "tabulated") {
    if (!j.contains("grid") || !j.contains("values"))
      fail(where, "tabulated needs \"grid\" and \"values\"");
    std::vector<double> grid;
    for (const auto& g : j.at("grid")) grid.push_back(as_number(g, where));
    std::vector<Mat> values;
    for (size_t k = 0; k < j.at("values").size(); ++k)
      values.push_back(parse_matrix(j.at("values")[k], n, n,
                                    where + ".values"));
    if (grid.size() != values.size() || grid.size() < 2)
      fail(where, "grid and values must match and hold at least two nodes");
    return CoeffFn::tabulated(grid, values);
  }
  fail(where, "unknown coefficient kind \"" + kind + "\"");
}

std::string config_digest(const Json& j) {
  // Canonicalize through the key-sorted variant so member order in the
  // input file does not change the digest.
  nlohmann::json sorted = nlohmann::json::parse(j.dump());
  const std::string dump = sorted.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

ProblemKind parse_kind(const Json& j) {
  const std::string s = j.value("kind", std::string());
  if (s == "hamiltonian") return ProblemKind::kHamiltonian;
  if (s == "morse") return ProblemKind::kMorse;
  if (s == "sturm-liouville") return ProblemKind::kSturmLiouville;
  if (s == "bc-check") return ProblemKind::kBcCheck;
  if (s == "appendix") return ProblemKind::kAppendix;
  fail("kind", "expected one of hamiltonian, morse, sturm-liouville, "
               "bc-check, appendix");
}

void parse_options(const Json& j, NumericOptions& o) {
  if (!j.is_object()) fail("options", "expected an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "h") {
      o.h = as_number(val, "options.h");
      if (!(o.h > 0)) fail("options.h", "step must be positive");
    } else if (key == "grid_nodes") {
      o.grid_nodes = as_int(val, "options.grid_nodes");
    } else if (key == "tau_nodes") {
      o.tau_nodes = as_int(val, "options.tau_nodes");
    } else if (key == "lambda") {
      o.lambda = as_number(val, "options.lambda");
      o.has_lambda = true;
    } else if (key == "lambda_min") {
      o.lambda_min = as_number(val, "options.lambda_min");
    } else if (key == "lambda_max") {
      o.lambda_max = as_number(val, "options.lambda_max");
    } else if (key == "lambda_nodes") {
      o.lambda_nodes = as_int(val, "options.lambda_nodes");
    } else if (key == "count") {
      o.count = as_int(val, "options.count");
    } else if (key == "branches") {
      if (!val.is_array()) fail("options.branches", "expected an array");
      for (const auto& b : val)
        o.branches.push_back(as_int(b, "options.branches"));
    } else if (key == "seed") {
      if (!val.is_number_unsigned())
        fail("options.seed", "expected a nonnegative integer");
      o.seed = val.get<std::uint64_t>();
    } else if (key == "oracle_m") {
      o.oracle_m = as_int(val, "options.oracle_m");
    } else if (key == "fuzz_trials") {
      o.fuzz_trials = as_int(val, "options.fuzz_trials");
    } else {
      fail("options." + key, "unknown option");
    }
  }
}

std::optional<Mat> maybe_matrix(const Json& j, const char* key, int rows,
                                int cols, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return parse_matrix(j.at(key), rows, cols, where + "." + key);
}

}  // namespace

ProblemConfig parse_config(const Json& j) {
  if (!j.is_object()) fail("", "top level must be an object");
  ProblemConfig cfg;
  cfg.digest = config_digest(j);
  if (!j.contains("schema")) fail("schema", "missing");
  cfg.schema = as_int(j.at("schema"), "schema");
  if (cfg.schema != 1) fail("schema", "unsupported version");
  cfg.kind = parse_kind(j);

  if (j.contains("options")) parse_options(j.at("options"), cfg.options);

  const bool needs_model = cfg.kind == ProblemKind::kHamiltonian ||
                           cfg.kind == ProblemKind::kMorse;
  const bool needs_sl = cfg.kind == ProblemKind::kSturmLiouville;

  if (cfg.kind == ProblemKind::kAppendix) {
    cfg.n = 1;
    if (!j.contains("appendix")) fail("appendix", "missing");
    const Json& a = j.at("appendix");
    cfg.appendix.l0 = maybe_matrix(a, "l0", 2, 2, "appendix");
    cfg.appendix.l1 = maybe_matrix(a, "l1", 2, 2, "appendix");
    cfg.appendix.l2 = maybe_matrix(a, "l2", 2, 2, "appendix");
    if (a.contains("x")) {
      std::vector<double> x;
      for (const auto& v : a.at("x")) x.push_back(as_number(v, "appendix.x"));
      if (x.size() != 4)
        fail("appendix.x", "expected four entries x1..x4");
      cfg.appendix.x = x;
    }
    if (a.contains("rows")) {
      std::vector<double> rows;
      for (const auto& v : a.at("rows"))
        rows.push_back(as_number(v, "appendix.rows"));
      if (rows.size() != 8 && rows.size() != 10)
        fail("appendix.rows",
             "expected alpha0 beta0 gamma0 delta0 alpha1 beta1 gamma1 "
             "delta1 with optional r0 r1");
      cfg.appendix.rows = rows;
    }
    if (a.contains("nu")) cfg.appendix.nu = as_int(a.at("nu"), "appendix.nu");
    if (a.contains("a")) cfg.appendix.a = as_number(a.at("a"), "appendix.a");
    if (a.contains("b")) cfg.appendix.b = as_number(a.at("b"), "appendix.b");
    if (a.contains("c")) cfg.appendix.c = as_number(a.at("c"), "appendix.c");
    return cfg;
  }

  if (!j.contains("n")) fail("n", "missing");
  cfg.n = as_int(j.at("n"), "n");
  if (cfg.n < 1) fail("n", "dimension must be at least 1");

  if (needs_model || needs_sl) {
    if (!j.contains("t")) fail("t", "missing");
    cfg.t = as_number(j.at("t"), "t");
    if (!(cfg.t > 0)) fail("t", "horizon must be positive");
  }

  const Json coeffs = j.value("coefficients", Json::object());
  auto coeff_or = [&](const char* key, const CoeffFn& fallback) {
    if (!coeffs.contains(key)) return fallback;
    return parse_coefficient(coeffs.at(key), cfg.n,
                             std::string("coefficients.") + key);
  };

  if (needs_model) {
    cfg.model.n = cfg.n;
    cfg.model.a_base = coeff_or("a", CoeffFn::zero(cfg.n));
    cfg.model.b_base = coeff_or("b", CoeffFn::zero(cfg.n));
    cfg.model.c_base = coeff_or(
        "c", CoeffFn::constant(Mat::Identity(cfg.n, cfg.n)));
    cfg.model.a_lin = coeff_or("a_lin", CoeffFn::zero(cfg.n));
    cfg.model.b_lin = coeff_or("b_lin", CoeffFn::zero(cfg.n));
    cfg.model.c_lin = coeff_or("c_lin", CoeffFn::zero(cfg.n));
    cfg.model.validate(cfg.t);
  }
  if (needs_sl) {
    cfg.c0 = coeff_or("c0", CoeffFn::constant(Mat::Identity(cfg.n, cfg.n)));
    cfg.d = coeff_or("d", CoeffFn::zero(cfg.n));
    cfg.e = coeff_or("e", CoeffFn::constant(Mat::Identity(cfg.n, cfg.n)));
  }

  const Json b = j.value("boundary", Json::object());
  const int n = cfg.n;
  cfg.boundary.n_left = maybe_matrix(b, "n_left", n, n, "boundary");
  cfg.boundary.alpha0 = maybe_matrix(b, "alpha0", n, n, "boundary");
  cfg.boundary.beta0 = maybe_matrix(b, "beta0", n, n, "boundary");
  cfg.boundary.gamma1 = maybe_matrix(b, "gamma1", n, n, "boundary");
  cfg.boundary.delta1 = maybe_matrix(b, "delta1", n, n, "boundary");
  cfg.boundary.row0_alpha = maybe_matrix(b, "row0_alpha", n, n, "boundary");
  cfg.boundary.row0_beta = maybe_matrix(b, "row0_beta", n, n, "boundary");
  cfg.boundary.row0_gamma = maybe_matrix(b, "row0_gamma", n, n, "boundary");
  cfg.boundary.row0_delta = maybe_matrix(b, "row0_delta", n, n, "boundary");
  cfg.boundary.row1_alpha = maybe_matrix(b, "row1_alpha", n, n, "boundary");
  cfg.boundary.row1_beta = maybe_matrix(b, "row1_beta", n, n, "boundary");
  cfg.boundary.row1_gamma = maybe_matrix(b, "row1_gamma", n, n, "boundary");
  cfg.boundary.row1_delta = maybe_matrix(b, "row1_delta", n, n, "boundary");
  cfg.boundary.rho0 = maybe_matrix(b, "rho0", n, n, "boundary");
  cfg.boundary.rho1 = maybe_matrix(b, "rho1", n, n, "boundary");

  if (needs_sl) {
    if (!cfg.boundary.alpha0 || !cfg.boundary.beta0 ||
        !cfg.boundary.gamma1 || !cfg.boundary.delta1)
      fail("boundary", "sturm-liouville needs alpha0, beta0, gamma1, delta1");
  }
  if (cfg.kind == ProblemKind::kBcCheck) {
    const bool coupled =
        cfg.boundary.row0_alpha.has_value() ||
        cfg.boundary.row1_alpha.has_value();
    const bool separated =
        cfg.boundary.alpha0.has_value() && cfg.boundary.beta0.has_value() &&
        cfg.boundary.gamma1.has_value() && cfg.boundary.delta1.has_value();
    if (!coupled && !separated)
      fail("boundary", "bc-check needs either coupled rows or the "
                       "separated alpha0/beta0/gamma1/delta1 blocks");
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("config: parse failure: ") + ex.what());
  }
  return parse_config(j);
}

}  // namespace polarsturm::cli

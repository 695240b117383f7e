#include "toruslab/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "toruslab/errors.hpp"

namespace toruslab {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<long>();
}

Mat3 matrix(const json& j, const std::string& field) {
  Mat3 m;
  if (j.is_array() && j.size() == 9) {
    for (int t = 0; t < 9; ++t) m(t / 3, t % 3) = number(j[t], field + "[" + std::to_string(t) + "]");
  } else if (j.is_array() && j.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      const auto& row = j[r];
      std::string rf = field + "[" + std::to_string(r) + "]";
      if (!row.is_array() || row.size() != 3) fail(rf, "expected 3 numbers");
      for (int c = 0; c < 3; ++c) m(r, c) = number(row[c], rf + "[" + std::to_string(c) + "]");
    }
  } else {
    fail(field, "expected 9 numbers (row-major) or 3 rows of 3");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    fail(field, "matrix is not symmetric");
  return m;
}

std::vector<FourierTerm> terms(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list of terms");
  std::vector<FourierTerm> out;
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string tf = field + "[" + std::to_string(t) + "]";
    const auto& e = j[t];
    if (!e.is_object()) fail(tf, "expected an object");
    FourierTerm term;
    if (!e.contains("amplitude")) fail(tf + ".amplitude", "missing");
    term.amplitude = number(e["amplitude"], tf + ".amplitude");
    if (!e.contains("wave") || !e["wave"].is_array() || e["wave"].size() != 3)
      fail(tf + ".wave", "expected 3 integers");
    for (int a = 0; a < 3; ++a)
      term.wave(a) = static_cast<int>(integer(e["wave"][a], tf + ".wave[" + std::to_string(a) + "]"));
    if (e.contains("phase")) term.phase = number(e["phase"], tf + ".phase");
    out.push_back(term);
  }
  return out;
}

MetricSpec metric(const json& j) {
  if (!j.is_object()) fail("metric", "expected an object");
  if (!j.contains("kind") || !j["kind"].is_string()) fail("metric.kind", "expected a string");
  std::string kind = j["kind"];
  MetricSpec spec;
  if (kind == "constant") {
    if (!j.contains("matrix")) fail("metric.matrix", "missing");
    spec = MetricSpec::constant(matrix(j["matrix"], "metric.matrix"));
  } else if (kind == "conformal") {
    Mat3 base = j.contains("base") ? matrix(j["base"], "metric.base") : Mat3::Identity();
    if (!j.contains("terms")) fail("metric.terms", "missing");
    spec = MetricSpec::conformal(base, terms(j["terms"], "metric.terms"));
  } else if (kind == "direct_fourier") {
    spec.kind = MetricSpec::Kind::direct_fourier;
    spec.base = j.contains("base") ? matrix(j["base"], "metric.base") : Mat3::Identity();
    if (!j.contains("components") || !j["components"].is_array()) fail("metric.components", "expected a list");
    for (std::size_t t = 0; t < j["components"].size(); ++t) {
      std::string cf = "metric.components[" + std::to_string(t) + "]";
      const auto& e = j["components"][t];
      if (!e.is_object()) fail(cf, "expected an object");
      FourierComponent comp;
      if (!e.contains("i") || !e.contains("j")) fail(cf, "missing i or j");
      comp.i = static_cast<int>(integer(e["i"], cf + ".i"));
      comp.j = static_cast<int>(integer(e["j"], cf + ".j"));
      if (comp.i < 0 || comp.i > 2 || comp.j < 0 || comp.j > 2) fail(cf, "indices must be 0, 1 or 2");
      if (!e.contains("terms")) fail(cf + ".terms", "missing");
      comp.terms = terms(e["terms"], cf + ".terms");
      spec.components.push_back(comp);
    }
  } else {
    fail("metric.kind", "unknown kind '" + kind + "'");
  }
  return spec;
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (c.grid < 4) fail("grid", "N must be at least 4");
  if (!(c.eps >= 0.0)) fail("eps", "must be non-negative");
  const auto& p = c.params;
  if (!(p.sigma > 0.0)) fail("params.sigma", "must be positive");
  if (!(p.lambda > 0.0)) fail("params.lambda", "must be positive");
  if (!(p.eta > 0.0)) fail("params.eta", "must be positive");
  if (!(p.cap_volume > 0.0)) fail("params.caps.volume", "must be positive");
  if (!(p.cap_rneg > 0.0)) fail("params.caps.rneg", "must be positive");
  if (!(p.cap_kappa > 0.0)) fail("params.caps.kappa", "must be positive");
  if (!(p.solver.tol > 0.0)) fail("solver.tol", "must be positive");
  if (p.solver.max_iter < 0) fail("solver.max_iter", "must be non-negative");
  if (p.samples < 1) fail("samples", "must be at least 1");
  if (p.injectivity_samples < 0) fail("injectivity_samples", "must be non-negative");
  for (std::size_t i = 0; i < c.sweep_eps.size(); ++i) {
    if (!(c.sweep_eps[i] >= 0.0)) fail("sweep.eps[" + std::to_string(i) + "]", "must be non-negative");
    if (i > 0 && !(c.sweep_eps[i] < c.sweep_eps[i - 1])) fail("sweep.eps", "must be strictly decreasing");
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config", "expected a JSON object");
  RunConfig c;
  if (j.contains("grid")) c.grid = static_cast<int>(integer(j["grid"], "grid"));
  if (!j.contains("metric")) fail("metric", "missing");
  c.metric = metric(j["metric"]);
  if (j.contains("eps")) c.eps = number(j["eps"], "eps");
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) fail("params", "expected an object");
    if (p.contains("sigma")) c.params.sigma = number(p["sigma"], "params.sigma");
    if (p.contains("lambda")) c.params.lambda = number(p["lambda"], "params.lambda");
    if (p.contains("eta")) c.params.eta = number(p["eta"], "params.eta");
    if (p.contains("caps")) {
      const auto& k = p["caps"];
      if (!k.is_object()) fail("params.caps", "expected an object");
      if (k.contains("volume")) c.params.cap_volume = number(k["volume"], "params.caps.volume");
      if (k.contains("rneg")) c.params.cap_rneg = number(k["rneg"], "params.caps.rneg");
      if (k.contains("kappa")) c.params.cap_kappa = number(k["kappa"], "params.caps.kappa");
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) fail("solver", "expected an object");
    if (s.contains("tol")) c.params.solver.tol = number(s["tol"], "solver.tol");
    if (s.contains("max_iter")) c.params.solver.max_iter = integer(s["max_iter"], "solver.max_iter");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object() || !s.contains("eps") || !s["eps"].is_array()) fail("sweep.eps", "expected a list");
    for (std::size_t i = 0; i < s["eps"].size(); ++i)
      c.sweep_eps.push_back(number(s["eps"][i], "sweep.eps[" + std::to_string(i) + "]"));
  }
  if (j.contains("samples")) c.params.samples = static_cast<int>(integer(j["samples"], "samples"));
  if (j.contains("injectivity_samples"))
    c.params.injectivity_samples = static_cast<int>(integer(j["injectivity_samples"], "injectivity_samples"));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    c.params.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) fail("output", "expected an object");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) fail("output.dir", "expected a string");
      c.output_dir = o["dir"];
    }
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Mat3 load_gram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gram file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (j.is_object()) {
    if (!j.contains("gram")) fail("gram", "missing");
    return matrix(j["gram"], "gram");
  }
  return matrix(j, "gram");
}

}  // namespace toruslab

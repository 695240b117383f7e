#include "toruslab/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toruslab/approx.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/lattice.hpp"

namespace toruslab {

using json = nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }
json ivec_json(const IVec3& v) { return json::array({v(0), v(1), v(2)}); }

json minima_json(const SuccessiveMinima& m) {
  json out;
  out["lambda"] = json::array({m.lambda[0], m.lambda[1], m.lambda[2]});
  json vs = json::array();
  for (const auto& v : m.vectors) vs.push_back(ivec_json(v));
  out["vectors"] = vs;
  return out;
}

json basis_json(const ReducedBasis& b) {
  json out;
  out["basis"] = matrix_json(b.basis);
  out["norms"] = json::array({b.norms[0], b.norms[1], b.norms[2]});
  out["unimodular"] = b.unimodular;
  return out;
}

json metric_json(const MetricSpec& spec) {
  json out;
  auto terms = [](const std::vector<FourierTerm>& ts) {
    json arr = json::array();
    for (const auto& t : ts) arr.push_back({{"amplitude", t.amplitude}, {"wave", ivec_json(t.wave)}, {"phase", t.phase}});
    return arr;
  };
  switch (spec.kind) {
    case MetricSpec::Kind::constant:
      out["kind"] = "constant";
      out["matrix"] = matrix_json(spec.base);
      break;
    case MetricSpec::Kind::conformal:
      out["kind"] = "conformal";
      out["base"] = matrix_json(spec.base);
      out["terms"] = terms(spec.terms);
      break;
    case MetricSpec::Kind::direct_fourier: {
      out["kind"] = "direct_fourier";
      out["base"] = matrix_json(spec.base);
      json comps = json::array();
      for (const auto& c : spec.components) comps.push_back({{"i", c.i}, {"j", c.j}, {"terms", terms(c.terms)}});
      out["components"] = comps;
      break;
    }
  }
  return out;
}

json row_json(const SweepRow& r) {
  return {{"eps", r.eps},
          {"rneg_l2", r.rneg_l2},
          {"tau", r.tau},
          {"omega_c_vol", r.omega_c_vol},
          {"omega_bdry", r.omega_bdry},
          {"c0_deficit", r.c0_deficit},
          {"gh_bound", r.gh_bound},
          {"a_drift", r.a_drift},
          {"gh_exact", r.gh_exact},
          {"volume", r.volume},
          {"degree", r.degree},
          {"stern_min_slack", r.stern_min_slack},
          {"int_det_omega", r.int_det_omega},
          {"measured_b_c0", r.measured_b_c0},
          {"injectivity", r.injectivity},
          {"kappa", r.kappa},
          {"cheeger_upper", r.cheeger_upper},
          {"tau_warning", r.tau_warning},
          {"membership", {{"volume", r.in_volume}, {"rneg", r.in_rneg}, {"kappa", r.in_kappa},
                          {"lambda_plausible", r.lambda_plausible}}}};
}

std::string component_suffix(int j) { return ":u" + std::to_string(j + 1); }

}  // namespace

json config_json(const RunConfig& c) {
  const auto& p = c.params;
  json out;
  out["grid"] = c.grid;
  out["metric"] = metric_json(c.metric);
  out["eps"] = c.eps;
  out["params"] = {{"sigma", p.sigma},
                   {"lambda", p.lambda},
                   {"eta", p.eta},
                   {"caps", {{"volume", p.cap_volume}, {"rneg", p.cap_rneg}, {"kappa", p.cap_kappa}}}};
  out["solver"] = {{"tol", p.solver.tol}, {"max_iter", p.solver.max_iter}};
  out["sweep"] = {{"eps", c.sweep_eps}};
  out["samples"] = p.samples;
  out["injectivity_samples"] = p.injectivity_samples;
  out["seed"] = p.seed;
  return out;
}

json verdict_json(const Verdict& v) {
  return {{"anchor", v.anchor}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}, {"pass", v.pass}};
}

json matrix_json(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

json matrix_json(const IMat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

void RunReport::add(const std::vector<Verdict>& vs, const std::string& suffix) {
  for (auto v : vs) {
    v.anchor += suffix;
    verdicts.push_back(std::move(v));
  }
}

json RunReport::to_json() const {
  json out = blocks;
  json vs = json::array();
  for (const auto& v : verdicts) vs.push_back(verdict_json(v));
  out["verdicts"] = vs;
  out["all_pass"] = all_pass(verdicts);
  return out;
}

int RunReport::exit_code() const { return all_pass(verdicts) ? 0 : 2; }

RunContext::RunContext(RunConfig config) : config_(std::move(config)) { validate_config(config_); }

const MetricField& RunContext::field() {
  if (!field_) field_ = std::make_unique<MetricField>(MetricField::sample(PeriodicGrid(config_.grid), config_.metric.scaled(config_.eps)));
  return *field_;
}

const HarmonicTorusMap& RunContext::map() {
  if (!map_) map_ = build_map(field(), config_.params.solver);
  return *map_;
}

const std::array<HarmonicOneForm, 3>& RunContext::standard() { return map().standard; }

const SternReport& RunContext::stern() {
  if (!stern_) stern_ = stern_report(map(), field());
  return *stern_;
}

const FundamentalDomainCells& RunContext::domain() {
  if (!domain_) domain_ = dirichlet_domain(field(), IVec3::Zero());
  return *domain_;
}

int RunContext::kappa() {
  if (!kappa_) kappa_ = covering_constant(domain(), config_.params.eta, field());
  return *kappa_;
}

void hodge_stage(RunContext& ctx, RunReport& report) {
  const auto& field = ctx.field();
  const auto& std3 = ctx.standard();
  auto q1 = gram_matrix(std3, field).matrix;
  auto q2 = dual_gram(std3, field).matrix;
  HodgeSolver solver(field, ctx.config().params.solver);
  json forms = json::array();
  for (int i = 0; i < 3; ++i) {
    forms.push_back({{"periods", ivec_json(std3[i].cls.periods)},
                     {"residual", solver.residual(std3[i])},
                     {"iterations", std3[i].iterations},
                     {"loop_periods", vec_json(std3[i].loop_periods())},
                     {"slice_flux", vec_json(slice_flux(std3[i], field))}});
  }
  auto curvature = scalar_curvature(field);
  double rmin = kInfinityNorm, rmax = -kInfinityNorm;
  for (double r : curvature.r) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  report.n = field.grid().n();
  report.blocks["mesh"] = {{"n", field.grid().n()},
                           {"volume", field.total_volume()},
                           {"scalar_curvature_min", rmin},
                           {"scalar_curvature_max", rmax},
                           {"rneg_l2", lp_norm(curvature.negative_part(), 2.0, field)}};
  report.blocks["hodge"] = {{"h1_gram", matrix_json(q1)},
                            {"h2_gram", matrix_json(q2)},
                            {"det_h1", q1.determinant()},
                            {"det_h2", q2.determinant()},
                            {"det_product", q1.determinant() * q2.determinant()},
                            {"forms", forms}};
}

void lattice_stage(RunContext& ctx, RunReport& report) {
  const auto& field = ctx.field();
  const auto& std3 = ctx.standard();
  auto q1 = gram_matrix(std3, field).matrix;
  auto q2 = dual_gram(std3, field).matrix;
  const double vol = field.total_volume();
  const double sigma = ctx.config().params.sigma;
  double dual_tol = field.grid().n() >= 64 ? 1e-3 : 5e-3;
  auto rep = minkowski_and_dual_checks(q1, q2, sigma, vol, dual_tol);
  double sys1 = systole_bound(q2, vol), sys2 = systole_bound(q1, vol);
  report.add(rep.verdicts);
  report.verdicts.push_back(upper_bound("latice_constant_systole_bound:p1", sigma, sys1, 1e-9 * sys1));
  report.verdicts.push_back(upper_bound("latice_constant_systole_bound:p2", sigma, sys2, 1e-9 * sys2));
  report.blocks["lattice"] = {{"h1_minima", minima_json(rep.minima1)},
                              {"h2_minima", minima_json(rep.minima2)},
                              {"h1_reduced_basis", basis_json(rep.basis1)},
                              {"det_h1", rep.det1},
                              {"det_h2", rep.det2},
                              {"systole_bound_p1", sys1},
                              {"systole_bound_p2", sys2},
                              {"product_minima_bound", product_minima_bound(3, sigma, vol)},
                              {"first_minimum_bound", first_minimum_bound(3, sigma, vol)}};
}

void map_stage(RunContext& ctx, RunReport& report) {
  const auto& field = ctx.field();
  const auto& map = ctx.map();
  const auto& stern = ctx.stern();
  const auto& p = ctx.config().params;
  const int kappa = ctx.kappa();
  const double vol = field.total_volume();
  auto l3 = l3_inequality_check(stern, p.sigma, p.eta, kappa, vol);
  json comps = json::array();
  for (int j = 0; j < 3; ++j) {
    const auto& c = map.components[j];
    const auto& s = stern.components[j];
    comps.push_back({{"periods", ivec_json(c.cls.periods)},
                     {"residual", c.residual},
                     {"l2", s.l2},
                     {"l3", s.l3},
                     {"stern_deficit", s.deficit},
                     {"stern_rhs", s.rhs},
                     {"stern_slack", s.slack},
                     {"l3_rhs", l3.components[j].rhs},
                     {"l3_slack", l3.components[j].slack}});
    report.verdicts.push_back(upper_bound("stern_ineq" + component_suffix(j), s.deficit, s.rhs + stern.disc_slack, 1e-8));
    report.verdicts.push_back(upper_bound("L2_to_L3" + component_suffix(j), l3.components[j].lhs, l3.components[j].rhs));
  }
  report.blocks["map"] = {{"basis_transform", matrix_json(map.basis_transform)},
                          {"orientation", map.orientation},
                          {"degree", map.degree},
                          {"deg_tol", deg_tol(field.grid().n())},
                          {"kappa", kappa},
                          {"rneg_l2", stern.rneg_l2},
                          {"components", comps}};
}

void cover_stage(RunContext& ctx, RunReport& report) {
  const auto& field = ctx.field();
  const auto& map = ctx.map();
  const auto& stern = ctx.stern();
  const auto& p = ctx.config().params;
  const auto& domain = ctx.domain();
  auto check = verify_domain(domain);
  auto nbhd = eta_neighborhood(domain, p.eta, field);
  int kappa_cube = covering_constant(unit_cube_domain(field.grid()), p.eta, field);
  const double tol = 2.0 * field.grid().h();
  json osc = json::array();
  for (int j = 0; j < 3; ++j) {
    auto u = lift(map.components[j]);
    auto rep = oscillation_bounds(u, domain, nbhd, p.sigma, field, stern.components[j].l2, tol);
    osc.push_back({{"osc_domain", rep.osc_domain},
                   {"osc_neighborhood", rep.osc_neighborhood},
                   {"bound_domain", rep.bound_domain},
                   {"bound_neighborhood", rep.bound_neighborhood}});
    report.add(rep.verdicts, component_suffix(j));
  }
  report.blocks["cover"] = {{"eta", p.eta},
                            {"kappa", nbhd.kappa},
                            {"kappa_cube", kappa_cube},
                            {"window", nbhd.window},
                            {"domain", {{"covers", check.covers},
                                        {"injective", check.injective},
                                        {"connected", check.connected},
                                        {"boundary_fraction", check.boundary_fraction}}},
                            {"oscillation", osc}};
}

void omega_stage(RunContext& ctx, RunReport& report) {
  const auto& field = ctx.field();
  const auto& p = ctx.config().params;
  auto an = analyze_metric(field, p, &ctx.map(), &ctx.stern(), ctx.kappa());
  const auto& ap = an.approx;
  const auto& om = an.omega;
  report.add(ap.verdicts);
  if (an.levels.half_volume_applies)
    report.verdicts.push_back(
        upper_bound("first_approximating_set", 0.5 * field.total_volume(), an.levels.volume_e1, 1e-12));
  report.add(om.verdicts);
  report.omega = om.omega;
  report.n = field.grid().n();
  report.blocks["approx"] = {{"a", matrix_json(ap.a)},
                             {"tau", ap.tau},
                             {"lambda", ap.lambda},
                             {"stern_term", ap.stern_term},
                             {"l1_deficit", matrix_json(ap.l1_deficit)},
                             {"l1_bound", ap.l1_bound},
                             {"a_sup", ap.a_sup},
                             {"a_bound", ap.a_bound},
                             {"min_eigenvalue", ap.min_eigenvalue},
                             {"e1_volume", an.levels.volume_e1},
                             {"e2_volume", an.levels.volume_e2},
                             {"e1_subset_e2", an.levels_nested},
                             {"half_volume_applies", an.levels.half_volume_applies},
                             {"half_volume_holds", an.levels.half_volume_holds}};
  std::size_t cells = 0;
  for (auto f : om.omega) cells += f;
  report.blocks["omega"] = {
      {"cells", cells},
      {"t0", om.t0},
      {"tau_warning", om.tau_warning},
      {"volume", om.volume},
      {"complement_volume", om.complement_volume},
      {"boundary", om.boundary},
      {"sup_deviation", om.sup_deviation},
      {"sup_sum_deviation", om.sup_sum_deviation},
      {"int_det_omega", om.int_det_omega},
      {"int_det_complement", om.int_det_complement},
      {"int_abs_det_omega", om.int_abs_det_omega},
      {"degree", om.degree},
      {"additivity_defect", std::abs(om.int_det_omega + om.int_det_complement - om.degree)},
      {"det_identity_defect", om.det_identity_defect},
      {"sign_constant", om.sign_constant},
      {"l3_complement_cubed", om.l3_complement_cubed},
      {"image_complement_bound", om.image_complement_bound},
      {"det_gap_violation", om.det_gap_violation},
      {"min_det_g", om.min_det_g},
      {"det_a", om.det_a},
      {"det_lead", om.det_lead},
      {"injectivity", om.injectivity},
      {"g_flat", matrix_json(om.g_flat)},
      {"c0_deficit", om.c0_deficit},
      {"measured_b", {{"l3_complement", om.measured_b_l3},
                      {"int_det", om.measured_b_det},
                      {"image_complement", om.measured_b_image},
                      {"det_g", om.measured_b_det_g},
                      {"det_a", om.measured_b_det_a},
                      {"c0", om.measured_b_c0}}}};
  report.blocks["convergence"] = {{"gh_bound", an.gh_bound},
                                  {"gh_exact", an.gh_exact},
                                  {"samples", p.samples},
                                  {"kappa", an.kappa},
                                  {"cheeger_upper", an.cheeger_upper},
                                  {"membership", {{"volume", an.volume <= p.cap_volume},
                                                  {"rneg", an.stern.rneg_l2 <= p.cap_rneg},
                                                  {"kappa", an.kappa <= p.cap_kappa},
                                                  {"lambda_plausible", an.cheeger_upper >= p.lambda}}}};
}

void sweep_stage(RunContext& ctx, RunReport& report) {
  const auto& c = ctx.config();
  if (c.sweep_eps.empty()) throw ConfigError("sweep.eps: no eps values to sweep");
  auto res = sweep(c.metric, c.grid, c.sweep_eps, c.params);
  report.add(res.verdicts);
  json rows = json::array();
  for (const auto& r : res.rows) rows.push_back(row_json(r));
  report.blocks["sweep"] = {{"rows", rows}, {"rneg_floor", res.rneg_floor}, {"rneg_ratios", res.rneg_ratios}};
  report.sweep_csv = sweep_csv(res);
}

RunReport run_all(const RunConfig& config) {
  RunContext ctx(config);
  RunReport report;
  report.blocks["config"] = config_json(config);
  hodge_stage(ctx, report);
  lattice_stage(ctx, report);
  map_stage(ctx, report);
  cover_stage(ctx, report);
  omega_stage(ctx, report);
  if (!config.sweep_eps.empty()) sweep_stage(ctx, report);
  return report;
}

RunReport lattice_from_gram(const Mat3& q) {
  validate_gram(q);
  RunReport report;
  auto minima = successive_minima(q);
  auto basis = reduced_basis(q);
  double prod = minima.lambda[0] * minima.lambda[1] * minima.lambda[2];
  report.verdicts.push_back(
      upper_bound("lat_minima_det_ineq", prod, minkowski_constant(3) * std::sqrt(q.determinant()), 1e-12));
  report.verdicts.push_back(upper_bound("bounded_lat_basis:b1", std::abs(basis.norms[0] - minima.lambda[0]), 1e-12));
  for (int j = 2; j <= 3; ++j)
    report.verdicts.push_back(upper_bound("bounded_lat_basis:b" + std::to_string(j), basis.norms[j - 1],
                                          0.5 * j * minima.lambda[j - 1], 1e-12));
  report.blocks["lattice"] = {{"gram", matrix_json(q)},
                              {"det", q.determinant()},
                              {"minima", minima_json(minima)},
                              {"reduced_basis", basis_json(basis)}};
  return report;
}

std::string omega_csv(const CellMask& omega, int n) {
  PeriodicGrid grid(n);
  if (omega.size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  std::ostringstream os;
  os << "i,j,k,in_omega\n";
  for (std::size_t c = 0; c < omega.size(); ++c) {
    auto x = grid.coords(c);
    os << x[0] << ',' << x[1] << ',' << x[2] << ',' << int(omega[c]) << '\n';
  }
  return os.str();
}

void write_outputs(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
    out << text;
  };
  put("report.json", report.to_json().dump(2) + "\n");
  put("sweep.csv", report.sweep_csv.empty()
                       ? std::string("eps,rneg_l2,tau,omega_c_vol,omega_bdry,c0_deficit,gh_bound,a_drift\n")
                       : report.sweep_csv);
  if (!report.omega.empty()) put("omega.csv", omega_csv(report.omega, report.n));
}

}  // namespace toruslab

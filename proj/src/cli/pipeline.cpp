#include "pobs/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "pobs/analysis.hpp"
#include "pobs/energy.hpp"
#include "pobs/fieldio.hpp"
#include "pobs/freeboundary.hpp"

namespace pobs {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

json point_json(const Point& x, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(x[k]);
  return a;
}

json energy_json(const EnergyBreakdown& e) {
  return {{"gradient_term", e.gradient_term}, {"penalty_term", e.penalty_term},
          {"reaction_term", e.reaction_term}, {"total", e.total}};
}

json config_echo(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = get_config_value(cfg, key);
  }
  return j;
}

ProblemParams final_params(const RunConfig& cfg) { return cfg.problem.with_eps(cfg.schedule.final_eps()); }

json criterion(const std::string& name, bool pass, double value, const std::string& relation, double tolerance) {
  return {{"name", name}, {"pass", pass}, {"value", value}, {"relation", relation}, {"tolerance", tolerance}};
}

}  // namespace

// ---------------------------------------------------------------------------

SolveOutcome run_solve(const RunConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.output.dir);
  {
    std::ofstream out(cfg.output.dir + "/config.ini", std::ios::trunc);
    if (!out) throw IoError("cannot write config echo into '" + cfg.output.dir + "'");
    out << serialize_config(cfg);
  }
  const Grid grid = cfg.make_grid();
  const CoefficientField a = eval_coefficient(cfg.coefficient, grid);
  const ProblemParams p0 = cfg.problem.with_eps(cfg.schedule.eps0);
  const DescentSeed seed = find_descent_seed(a, p0, cfg.make_bump(grid));
  GridField init = seed.w0;
  for (double& v : init.values) v *= seed.t_peak;

  SolveOutcome out;
  out.continuation = continuation_solve(a, cfg.problem, cfg.schedule.eps0, cfg.schedule.factor,
                                        cfg.schedule.steps, &init);
  const ContinuationResult& c = out.continuation;
  const SolveResult& last = c.solutions.back();
  out.ok = c.ok() && last.nontrivial;

  // The discrete embedding constant barely moves with resolution; a coarse copy of the box suffices.
  std::vector<int> coarse_cells;
  for (int k = 0; k < grid.dim(); ++k) coarse_cells.push_back(std::min(grid.cells(k), 64));
  const SobolevEstimate S =
      estimate_sobolev_constant(Grid(grid.extents(), coarse_cells), cfg.problem.p, cfg.problem.lambda);
  const double floor = mountain_pass_floor(cfg.problem, a.a0, S.value);
  const UniformBounds ub = uniform_bounds_report(c, c.interior_margin);

  json steps = json::array();
  for (std::size_t k = 0; k < c.solutions.size(); ++k) {
    const SolveResult& s = c.solutions[k];
    steps.push_back({{"eps", c.schedule[k]},
                     {"converged", s.converged},
                     {"nontrivial", s.nontrivial},
                     {"residual_norm", s.residual_norm},
                     {"tol_res", cfg.problem.tol_res},
                     {"newton_iterations", s.iterations},
                     {"flow_steps", s.flow_steps},
                     {"min_before_clamp", s.min_before_clamp},
                     {"sup_norm", c.sup_norm_track[k]},
                     {"grad_sup_norm", c.grad_sup_track[k]},
                     {"energy", energy_json(s.energy)},
                     {"below_mountain_pass_floor", s.nontrivial && s.energy.total < floor}});
    if (cfg.output.save_steps)
      save_field(cfg.output.dir + "/u_step_" + std::to_string(k) + ".pobs", s.u);
  }
  out.log = {{"format", "pobs-solve-log/1"},
             {"config", config_echo(cfg)},
             {"coefficient", {{"a0", a.a0}, {"a1", a.a1}}},
             {"seed", {{"t0", seed.t0}, {"t_peak", seed.t_peak}, {"peak_energy", seed.peak_energy}, {"doublings", seed.doublings}}},
             {"mountain_pass", {{"sobolev_estimate", S.value}, {"iterations", S.iterations}, {"floor", floor}}},
             {"schedule", c.schedule},
             {"steps", steps},
             {"drift", c.drift},
             {"failed_index", c.failed_index},
             {"uniform_bounds",
              {{"interior_margin", ub.interior_margin},
               {"c1", ub.c1},
               {"relative_spread", ub.relative_spread},
               {"sup_track", ub.sup_track},
               {"grad_track", ub.grad_track},
               {"global_sup_track", ub.global_sup_track}}},
             {"ok", out.ok}};
  out.field_path = cfg.output.dir + "/u.pobs";
  save_field(out.field_path, last.u);
  write_json(cfg.output.dir + "/solve_log.json", out.log);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct VerifyContext {
  const RunConfig& cfg;
  const GridField& u;
  const CoefficientField& a;
  const ProblemParams params;
  const double h;
  const FreeBoundary& fb;
  const PositivityMask& mask;
  json criteria = json::array();
  std::vector<GrowthFit> fits;
};

json growth_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  const auto radii = geometric_radii(A.growth_lo_cells * ctx.h, A.growth_hi_cells * ctx.h, A.growth_radii);
  const double beta = ctx.params.growth_exponent();
  json fits = json::array();
  std::size_t in_band = 0, skipped = 0;
  for (const Point& y : ctx.fb.points) {
    try {
      GrowthFit f = growth_fit(ctx.u, y, radii);
      const bool ok = std::abs(f.slope - beta) <= A.growth_band;
      in_band += ok;
      fits.push_back({{"center", point_json(y, ctx.u.grid.dim())},
                      {"radii", f.radii},
                      {"sup_values", f.sup_values},
                      {"grad_sup_values", f.grad_sup_values},
                      {"slope", f.slope},
                      {"grad_slope", f.grad_slope},
                      {"c1_growth", f.c1_growth},
                      {"in_band", ok}});
      ctx.fits.push_back(std::move(f));
    } catch (const FitError&) {
      ++skipped;
    } catch (const DomainError&) {
      ++skipped;
    }
  }
  const double frac = ctx.fits.empty() ? 0.0 : static_cast<double>(in_band) / ctx.fits.size();
  const bool pass = !ctx.fits.empty() && frac >= A.growth_fraction;
  ctx.criteria.push_back(criterion("growth_slope_fraction", pass, frac, ">=", A.growth_fraction));
  return {{"radii", radii},
          {"expected_slope", beta},
          {"band", A.growth_band},
          {"fraction_required", A.growth_fraction},
          {"fraction_in_band", frac},
          {"fitted_points", ctx.fits.size()},
          {"skipped_points", skipped},
          {"fits", fits},
          {"pass", pass}};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// r2 from the fitted growth prefactor and r1 = half the smallest boundary distance.
double r2_from_fits(const VerifyContext& ctx) {
  if (ctx.fits.empty()) return 0.0;
  std::vector<double> c1;
  for (const auto& f : ctx.fits) c1.push_back(f.c1_growth);
  double r1 = std::numeric_limits<double>::infinity();
  for (const Point& y : ctx.fb.points) r1 = std::min(r1, 0.5 * ctx.u.grid.distance_to_boundary(y));
  return r2_bound(ctx.params, ctx.a.a1, median(c1), r1);
}

json nondegeneracy_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  std::vector<double> radii;
  for (double c : A.nondeg_radii_cells) radii.push_back(c * ctx.h);
  const double r2 = r2_from_fits(ctx);
  const NondegeneracyReport rep =
      nondegeneracy_check(ctx.u, ctx.fb, radii, ctx.params, ctx.a.a1, 0.5 * r2, A.nondeg_slack);
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"point", point_json(e.point, ctx.u.grid.dim())},
                       {"radius", e.radius},
                       {"measured", e.measured},
                       {"threshold", rep.c2_theoretical * std::pow(e.radius, ctx.params.growth_exponent())},
                       {"margin", e.margin},
                       {"pass", e.pass}});
  ctx.criteria.push_back(criterion("nondegeneracy_min_margin", rep.all_pass, rep.min_margin, ">=", rep.slack));
  return {{"c2", rep.c2_theoretical}, {"slack", rep.slack}, {"r2_bound", r2},
          {"radii", rep.radii},       {"min_margin", rep.min_margin}, {"entries", entries},
          {"pass", rep.all_pass}};
}

json porosity_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  std::vector<double> radii;
  for (double c : A.porosity_radii_cells) radii.push_back(c * ctx.h);
  const auto rows = porosity_estimate(ctx.fb, ctx.mask, radii);
  json jr = json::array();
  bool pass = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    pass = pass && r.min_delta >= A.porosity_min;
    worst = std::min(worst, r.min_delta);
    jr.push_back({{"radius", r.radius}, {"min_delta", r.min_delta}, {"mean_delta", r.mean_delta},
                  {"samples", r.samples}, {"worst_point", point_json(r.worst_point, ctx.u.grid.dim())}});
  }
  ctx.criteria.push_back(criterion("porosity_min_delta", pass, worst, ">=", A.porosity_min));
  return {{"threshold", A.porosity_min}, {"rows", jr}, {"pass", pass}};
}

json boxcount_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  std::vector<double> scales;
  for (double c : A.box_scales_cells) scales.push_back(c * ctx.h);
  std::sort(scales.begin(), scales.end());
  const BoxCountResult bc = box_count_measure(ctx.fb, scales);
  const double target = ctx.u.grid.dim() - 1.0;
  const bool dim_ok = std::abs(bc.dimension - target) <= A.box_dim_tol;
  const auto first = bc.proxies.begin();
  const auto [mn, mx] = std::minmax_element(first, first + 3);
  const double spread = (*mx - *mn) / *mx;
  const bool spread_ok = spread <= A.box_proxy_spread;
  ctx.criteria.push_back(criterion("boxcount_dimension", dim_ok, bc.dimension, "within", A.box_dim_tol));
  ctx.criteria.push_back(criterion("boxcount_proxy_spread", spread_ok, spread, "<=", A.box_proxy_spread));
  return {{"scales", bc.scales},
          {"counts", bc.counts},
          {"mesh_counts", bc.mesh_counts},
          {"proxies", bc.proxies},
          {"dimension", bc.dimension},
          {"dimension_target", target},
          {"dimension_tol", A.box_dim_tol},
          {"proxy_spread", spread},
          {"proxy_spread_max", A.box_proxy_spread},
          {"pass", dim_ok && spread_ok}};
}

json sigma_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  std::vector<std::size_t> order(ctx.fb.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(ctx.cfg.sample_seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(A.sigma_points)));
  std::sort(order.begin(), order.end());

  json rows = json::array();
  bool pass = true;
  double worst = 0.0;
  std::size_t evaluated = 0, skipped = 0;
  for (std::size_t idx : order) {
    const Point& y = ctx.fb.points[idx];
    for (double r : A.sigma_radii) {
      if (ctx.u.grid.distance_to_boundary(y) < r) {
        ++skipped;
        continue;
      }
      for (double s : A.sigmas) {
        const double I = gradient_smallness_measure(ctx.u, ctx.params.p, s, y, r, A.s_samples, ctx.mask.tau_pos);
        const double Ih = gradient_smallness_measure(ctx.u, ctx.params.p, 0.5 * s, y, r, A.s_samples, ctx.mask.tau_pos);
        const double ratio = I > 0.0 ? Ih / I : std::numeric_limits<double>::infinity();
        const bool ok = ratio <= A.sigma_ratio_max;
        pass = pass && ok;
        worst = std::max(worst, ratio);
        ++evaluated;
        rows.push_back({{"point_index", idx}, {"point", point_json(y, ctx.u.grid.dim())}, {"radius", r},
                        {"sigma", s}, {"measure", I}, {"measure_half", Ih},
                        {"ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)}, {"pass", ok}});
      }
    }
  }
  pass = pass && evaluated > 0;
  ctx.criteria.push_back(criterion("sigma_scaling_worst_ratio", pass, worst, "<=", A.sigma_ratio_max));
  return {{"ratio_max", A.sigma_ratio_max}, {"s_samples", A.s_samples}, {"tau_pos", ctx.mask.tau_pos},
          {"rows", rows}, {"worst_ratio", worst}, {"skipped", skipped}, {"pass", pass}};
}

json pointwise_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  const PointwiseReport rep = pointwise_inequality_check(ctx.u, ctx.a.a1, ctx.params);
  const bool pass = rep.worst_ratio <= A.pointwise_slack;
  ctx.criteria.push_back(criterion("pointwise_worst_ratio", pass, rep.worst_ratio, "<=", A.pointwise_slack));
  return {{"c3", rep.c3}, {"eps", ctx.params.eps}, {"slack", A.pointwise_slack}, {"worst_ratio", rep.worst_ratio},
          {"worst_point", point_json(rep.worst_point, ctx.u.grid.dim())}, {"nodes", rep.nodes_checked},
          {"pass", pass}};
}

json barrier_section(VerifyContext& ctx) {
  const Point& y = ctx.fb.points.front();
  double r = std::min(1.0 / ctx.a.a1, ctx.u.grid.distance_to_boundary(y));
  const double r2 = r2_from_fits(ctx);
  if (r2 > 0.0) r = std::min(r, r2);
  const BarrierCheck b = barrier_comparison_check(ctx.params, ctx.a, y, r);
  ctx.criteria.push_back(criterion("barrier_max_divergence", b.pass, b.max_divergence, "<=", b.bound + b.slack));
  return {{"center", point_json(y, ctx.u.grid.dim())}, {"radius", r}, {"c2", b.c2},
          {"max_divergence", b.max_divergence}, {"bound", b.bound}, {"slack", b.slack},
          {"nodes", b.nodes}, {"pass", b.pass}};
}

json holder_section(VerifyContext& ctx) {
  const auto& A = ctx.cfg.analysis;
  const Grid& g = ctx.u.grid;
  double shortest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.dim(); ++k) shortest = std::min(shortest, g.hi(k) - g.lo(k));
  const HolderProbe hp = holder_seminorm_probe(ctx.u, A.holder_alphas, 0.1 * shortest, A.holder_factor);
  json rows = json::array();
  for (const auto& r : hp.rows)
    rows.push_back({{"alpha", r.alpha}, {"fine", r.fine}, {"coarse", r.coarse}, {"stable", r.stable}});
  const bool pass = hp.stable_alpha > 0.0;
  ctx.criteria.push_back(criterion("holder_stable_alpha", pass, hp.stable_alpha, ">", 0.0));
  return {{"factor", hp.factor}, {"rows", rows}, {"stable_alpha", hp.stable_alpha}, {"pass", pass}};
}

}  // namespace

VerifyOutcome verify_field(const RunConfig& cfg, const GridField& u) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  if (!(u.grid == grid)) throw LoadError("field grid does not match the configured grid", 8);
  const CoefficientField a = eval_coefficient(cfg.coefficient, grid);
  const auto& A = cfg.analysis;
  const ProblemParams params = final_params(cfg);
  const PositivityMask mask = positivity_set(u, A.tau_factor * default_tau_pos(grid, params.p));
  const FreeBoundary fb = extract_free_boundary(mask);
  VerifyContext ctx{cfg, u, a, params, grid.max_h(), fb, mask, json::array(), {}};

  json sections = json::object();
  auto run = [&](bool enabled, const char* name, bool needs_fb, json (*fn)(VerifyContext&)) {
    if (!enabled) return;
    if (needs_fb && fb.empty()) {
      sections[name] = {{"error", "no free boundary"}, {"pass", false}};
      ctx.criteria.push_back(criterion(name, false, 0.0, "requires", 1.0));
      return;
    }
    try {
      sections[name] = fn(ctx);
    } catch (const Error& e) {
      sections[name] = {{"error", e.what()}, {"pass", false}};
      ctx.criteria.push_back(criterion(name, false, 0.0, "error", 0.0));
    }
  };
  // Nondegeneracy and barrier use r2 from the growth fits; growth runs first.
  const bool need_fits = A.growth || A.nondegeneracy || A.barrier;
  if (need_fits && !A.growth && !fb.empty()) {
    json scratch = json::array();
    std::swap(scratch, ctx.criteria);
    try {
      growth_section(ctx);
    } catch (const Error&) {
    }
    std::swap(scratch, ctx.criteria);
  }
  run(A.growth, "growth", true, growth_section);
  run(A.nondegeneracy, "nondegeneracy", true, nondegeneracy_section);
  run(A.porosity, "porosity", true, porosity_section);
  run(A.boxcount, "boxcount", true, boxcount_section);
  run(A.sigma_scaling, "sigma_scaling", true, sigma_section);
  run(A.pointwise, "pointwise", false, pointwise_section);
  run(A.barrier, "barrier", true, barrier_section);
  run(A.holder, "holder", false, holder_section);

  json fbj = json::array();
  for (const Point& x : fb.points) fbj.push_back(point_json(x, grid.dim()));
  bool pass = true;
  for (const auto& c : ctx.criteria) pass = pass && c["pass"].get<bool>();

  VerifyOutcome out;
  out.pass = pass;
  out.report = {{"format", "pobs-report/1"},
                {"config", config_echo(cfg)},
                {"params", {{"p", params.p}, {"lambda", params.lambda}, {"m1", params.m1}, {"m2", params.m2},
                            {"dim", params.dim}, {"eps", params.eps}, {"delta_reg", params.delta_reg},
                            {"tol_res", params.tol_res}, {"growth_exponent", params.growth_exponent()}}},
                {"grid", {{"lo", [&] { json j = json::array(); for (int k = 0; k < grid.dim(); ++k) j.push_back(grid.lo(k)); return j; }()},
                          {"hi", [&] { json j = json::array(); for (int k = 0; k < grid.dim(); ++k) j.push_back(grid.hi(k)); return j; }()},
                          {"cells", grid.cell_counts()},
                          {"h", grid.max_h()}}},
                {"coefficient", {{"a0", a.a0}, {"a1", a.a1}}},
                {"field", {{"sup_norm", u.sup_norm()}, {"min", u.min()}}},
                {"free_boundary", {{"tau_pos", mask.tau_pos}, {"count", fb.size()}, {"points", fbj}}},
                {"sections", sections},
                {"criteria", ctx.criteria},
                {"pass", pass}};
  return out;
}

VerifyOutcome run_verify(const RunConfig& cfg, const std::string& field_path) {
  const GridField u = load_field(field_path);
  VerifyOutcome out = verify_field(cfg, u);
  ensure_dir(cfg.output.dir);
  out.report["field"]["path"] = field_path;
  out.report_path = cfg.output.dir + "/report.json";
  write_json(out.report_path, out.report);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return num(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return csv_escape(v.dump());
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<json>& values) { rows_.push_back(values); }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << csv_escape(header_[i]);
    out << "\r\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << cell(r[i]);
      out << "\r\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<json>> rows_;
};

std::vector<std::string> coord_names(int dim) {
  static const char* names[] = {"x", "y", "z"};
  return {names, names + dim};
}

void append_coords(std::vector<json>& row, const json& point) {
  for (const auto& c : point) row.push_back(c);
}

}  // namespace

std::vector<std::string> emit_plot_data(const json& report, const std::string& outdir) {
  ensure_dir(outdir);
  const json sections = report.value("sections", json::object());
  const int dim = report.contains("params") ? report["params"].value("dim", 2) : 2;
  std::vector<std::pair<std::string, Csv>> families;

  auto with_coords = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    for (const auto& c : coord_names(dim)) head.push_back(c);
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };

  if (sections.contains("growth") && sections["growth"].contains("fits")) {
    Csv csv(with_coords({"point_index"}, {"radius", "sup_u", "sup_grad", "slope", "grad_slope", "c1_growth"}));
    std::size_t i = 0;
    for (const auto& f : sections["growth"]["fits"]) {
      for (std::size_t k = 0; k < f["radii"].size(); ++k) {
        std::vector<json> row{i};
        append_coords(row, f["center"]);
        row.insert(row.end(), {f["radii"][k], f["sup_values"][k], f["grad_sup_values"][k], f["slope"],
                               f["grad_slope"], f["c1_growth"]});
        csv.row(row);
      }
      ++i;
    }
    families.emplace_back("growth", std::move(csv));
  }
  if (sections.contains("nondegeneracy") && sections["nondegeneracy"].contains("entries")) {
    Csv csv(with_coords({}, {"radius", "measured", "threshold", "margin", "pass"}));
    for (const auto& e : sections["nondegeneracy"]["entries"]) {
      std::vector<json> row;
      append_coords(row, e["point"]);
      row.insert(row.end(), {e["radius"], e["measured"], e["threshold"], e["margin"], e["pass"]});
      csv.row(row);
    }
    families.emplace_back("nondegeneracy", std::move(csv));
  }
  if (sections.contains("porosity") && sections["porosity"].contains("rows")) {
    Csv csv({"radius", "min_delta", "mean_delta", "samples", "threshold"});
    for (const auto& r : sections["porosity"]["rows"])
      csv.row({r["radius"], r["min_delta"], r["mean_delta"], r["samples"], sections["porosity"]["threshold"]});
    families.emplace_back("porosity", std::move(csv));
  }
  if (sections.contains("boxcount") && sections["boxcount"].contains("scales")) {
    const json& b = sections["boxcount"];
    Csv csv({"scale", "count", "mesh_count", "proxy"});
    for (std::size_t k = 0; k < b["scales"].size(); ++k)
      csv.row({b["scales"][k], b["counts"][k], b["mesh_counts"][k], b["proxies"][k]});
    families.emplace_back("boxcount", std::move(csv));
  }
  if (sections.contains("sigma_scaling") && sections["sigma_scaling"].contains("rows")) {
    Csv csv(with_coords({"point_index"}, {"radius", "sigma", "measure", "measure_half", "ratio"}));
    for (const auto& r : sections["sigma_scaling"]["rows"]) {
      std::vector<json> row{r["point_index"]};
      append_coords(row, r["point"]);
      row.insert(row.end(), {r["radius"], r["sigma"], r["measure"], r["measure_half"], r["ratio"]});
      csv.row(row);
    }
    families.emplace_back("sigma_scaling", std::move(csv));
  }

  std::vector<std::string> written;
  json list = json::array();
  for (const auto& [name, csv] : families) {
    const std::string file = name + ".csv";
    csv.write(outdir + "/" + file);
    written.push_back(outdir + "/" + file);
    list.push_back({{"name", name}, {"file", file}, {"columns", csv.header()}, {"rows", csv.rows()}});
  }
  json manifest = {{"format", "pobs-plots/1"}, {"families", list}};
  if (report.contains("params")) {
    const json& p = report["params"];
    manifest["reference"] = {{"growth_slope", p.value("growth_exponent", 0.0)},
                             {"boxcount_slope", p.value("dim", 2) - 1},
                             {"sigma_slope", 1.0}};
  }
  write_json(outdir + "/manifest.json", manifest);
  written.push_back(outdir + "/manifest.json");
  return written;
}

// ---------------------------------------------------------------------------

std::vector<SweepRun> run_sweep(const RunConfig& cfg,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& axes,
                                int workers) {
  std::vector<SweepRun> runs(1);
  for (const auto& [key, values] : axes) {
    if (values.empty()) throw ConfigError("sweep axis '" + key + "' has no values");
    std::vector<SweepRun> next;
    for (const auto& r : runs)
      for (const auto& v : values) {
        SweepRun n = r;
        n.overrides.emplace_back(key, v);
        next.push_back(n);
      }
    runs = std::move(next);
  }
  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    RunConfig c = cfg;
    for (const auto& [k, v] : runs[i].overrides) set_config_value(c, k, v);
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", i);
    c.output.dir = cfg.output.dir + "/" + name;
    runs[i].dir = c.output.dir;
    c.validate();
    configs.push_back(std::move(c));
  }
  ensure_dir(cfg.output.dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        const SolveOutcome s = run_solve(configs[i]);
        const VerifyOutcome v = run_verify(configs[i], s.field_path);
        runs[i].exit_code = s.ok && v.pass ? kExitPass : kExitCriterion;
      } catch (const ConfigError& e) {
        runs[i].exit_code = kExitConfig;
        runs[i].error = e.what();
      } catch (const std::exception& e) {
        runs[i].exit_code = kExitRuntime;
        runs[i].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json list = json::array();
  for (const auto& r : runs) {
    json ov = json::object();
    for (const auto& [k, v] : r.overrides) ov[k] = v;
    list.push_back({{"dir", r.dir}, {"overrides", ov}, {"exit_code", r.exit_code}, {"error", r.error}});
  }
  write_json(cfg.output.dir + "/sweep.json", {{"format", "pobs-sweep/1"}, {"runs", list}});
  return runs;
}

}  // namespace pobs

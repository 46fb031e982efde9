#include "pobs/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

namespace pobs {

double ScheduleSpec::final_eps() const { return eps0 * std::pow(factor, steps - 1); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

template <class T>
T to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc::result_out_of_range) throw ConfigError(key + ": value out of range");
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_double(key, s));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

struct Entry {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class M>
Entry real(std::string key, M member) {
  return {key, [member](const RunConfig& c) { return fmt(member(const_cast<RunConfig&>(c))); },
          [member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_double(k, v); }};
}

template <class M>
Entry integer(std::string key, M member) {
  return {key, [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); },
          [member](RunConfig& c, const std::string& k, const std::string& v) {
            using T = std::remove_reference_t<decltype(member(c))>;
            member(c) = to_integer<T>(k, v);
          }};
}

template <class M>
Entry boolean(std::string key, M member) {
  return {key, [member](const RunConfig& c) -> std::string { return member(const_cast<RunConfig&>(c)) ? "true" : "false"; },
          [member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_bool(k, v); }};
}

template <class M>
Entry reals(std::string key, M member) {
  return {key, [member](const RunConfig& c) { return join(member(const_cast<RunConfig&>(c))); },
          [member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_doubles(k, v); }};
}

#define FIELD(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(real("problem.p", FIELD(problem.p)));
    t.push_back(real("problem.lambda", FIELD(problem.lambda)));
    t.push_back(real("problem.m1", FIELD(problem.m1)));
    t.push_back(real("problem.m2", FIELD(problem.m2)));
    t.push_back(integer("problem.dim", FIELD(problem.dim)));
    t.push_back(real("problem.eps", FIELD(problem.eps)));
    t.push_back(real("problem.delta_reg", FIELD(problem.delta_reg)));
    t.push_back(real("problem.tol_res", FIELD(problem.tol_res)));

    auto bound = [](bool lo) {
      return [lo](RunConfig& c, const std::string& k, const std::string& v) {
        const auto vals = to_doubles(k, v);
        c.grid.extents.resize(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) (lo ? c.grid.extents[i].lo : c.grid.extents[i].hi) = vals[i];
      };
    };
    auto show = [](bool lo) {
      return [lo](const RunConfig& c) {
        std::vector<double> v;
        for (const auto& iv : c.grid.extents) v.push_back(lo ? iv.lo : iv.hi);
        return join(v);
      };
    };
    t.push_back({"grid.lo", show(true), bound(true)});
    t.push_back({"grid.hi", show(false), bound(false)});
    t.push_back({"grid.cells",
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.grid.cells.size(); ++i) s += (i ? ", " : "") + std::to_string(c.grid.cells[i]);
                   return s;
                 },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.grid.cells.clear();
                   for (const auto& s : split_list(v)) c.grid.cells.push_back(to_integer<int>(k, s));
                 }});

    t.push_back({"coefficient.kind", [](const RunConfig& c) { return c.coefficient.kind; },
                 [](RunConfig& c, const std::string&, const std::string& v) { c.coefficient.kind = trim(v); }});
    t.push_back(real("coefficient.c0", FIELD(coefficient.c0)));
    t.push_back(real("coefficient.amp", FIELD(coefficient.amp)));
    t.push_back(real("coefficient.freq", FIELD(coefficient.freq)));

    t.push_back(real("schedule.eps0", FIELD(schedule.eps0)));
    t.push_back(real("schedule.factor", FIELD(schedule.factor)));
    t.push_back(integer("schedule.steps", FIELD(schedule.steps)));

    t.push_back(reals("seed.center", FIELD(seed.center)));
    t.push_back(real("seed.radius", FIELD(seed.radius)));
    t.push_back(real("seed.amplitude", FIELD(seed.amplitude)));
    t.push_back(integer("seed.sample_seed", FIELD(sample_seed)));

    t.push_back(boolean("analysis.growth", FIELD(analysis.growth)));
    t.push_back(boolean("analysis.nondegeneracy", FIELD(analysis.nondegeneracy)));
    t.push_back(boolean("analysis.porosity", FIELD(analysis.porosity)));
    t.push_back(boolean("analysis.boxcount", FIELD(analysis.boxcount)));
    t.push_back(boolean("analysis.sigma_scaling", FIELD(analysis.sigma_scaling)));
    t.push_back(boolean("analysis.pointwise", FIELD(analysis.pointwise)));
    t.push_back(boolean("analysis.barrier", FIELD(analysis.barrier)));
    t.push_back(boolean("analysis.holder", FIELD(analysis.holder)));
    t.push_back(real("analysis.tau_factor", FIELD(analysis.tau_factor)));
    t.push_back(real("analysis.growth_lo_cells", FIELD(analysis.growth_lo_cells)));
    t.push_back(real("analysis.growth_hi_cells", FIELD(analysis.growth_hi_cells)));
    t.push_back(integer("analysis.growth_radii", FIELD(analysis.growth_radii)));
    t.push_back(real("analysis.growth_band", FIELD(analysis.growth_band)));
    t.push_back(real("analysis.growth_fraction", FIELD(analysis.growth_fraction)));
    t.push_back(reals("analysis.nondeg_radii_cells", FIELD(analysis.nondeg_radii_cells)));
    t.push_back(real("analysis.nondeg_slack", FIELD(analysis.nondeg_slack)));
    t.push_back(reals("analysis.porosity_radii_cells", FIELD(analysis.porosity_radii_cells)));
    t.push_back(real("analysis.porosity_min", FIELD(analysis.porosity_min)));
    t.push_back(reals("analysis.box_scales_cells", FIELD(analysis.box_scales_cells)));
    t.push_back(real("analysis.box_dim_tol", FIELD(analysis.box_dim_tol)));
    t.push_back(real("analysis.box_proxy_spread", FIELD(analysis.box_proxy_spread)));
    t.push_back(reals("analysis.sigmas", FIELD(analysis.sigmas)));
    t.push_back(reals("analysis.sigma_radii", FIELD(analysis.sigma_radii)));
    t.push_back(integer("analysis.sigma_points", FIELD(analysis.sigma_points)));
    t.push_back(integer("analysis.s_samples", FIELD(analysis.s_samples)));
    t.push_back(real("analysis.sigma_ratio_max", FIELD(analysis.sigma_ratio_max)));
    t.push_back(real("analysis.pointwise_slack", FIELD(analysis.pointwise_slack)));
    t.push_back(reals("analysis.holder_alphas", FIELD(analysis.holder_alphas)));
    t.push_back(real("analysis.holder_factor", FIELD(analysis.holder_factor)));

    t.push_back({"output.dir", [](const RunConfig& c) { return c.output.dir; },
                 [](RunConfig& c, const std::string&, const std::string& v) { c.output.dir = trim(v); }});
    t.push_back(boolean("output.save_steps", FIELD(output.save_steps)));
    return t;
  }();
  return table;
}

#undef FIELD

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, key, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  return find_entry(key).get(cfg);
}

void RunConfig::validate() const {
  problem.validate();
  const std::size_t n = static_cast<std::size_t>(problem.dim);
  if (grid.extents.size() != n || grid.cells.size() != n)
    throw ConfigError("grid.lo, grid.hi and grid.cells need problem.dim = " + std::to_string(n) + " entries");
  (void)make_grid();
  (void)coefficient.function(problem.dim);
  if (!(schedule.eps0 > 0.0 && schedule.eps0 < 1.0)) throw ConfigError("schedule.eps0 must lie in (0, 1)");
  if (!(schedule.factor > 0.0 && schedule.factor < 1.0)) throw ConfigError("schedule.factor must lie in (0, 1)");
  if (schedule.steps < 1) throw ConfigError("schedule.steps must be at least 1");
  if (!seed.center.empty() && seed.center.size() != n) throw ConfigError("seed.center needs problem.dim entries");
  if (!(seed.amplitude > 0.0)) throw ConfigError("seed.amplitude must be positive");
  const auto& a = analysis;
  if (!(a.tau_factor >= 0.0)) throw ConfigError("analysis.tau_factor must be non-negative");
  if (a.growth_radii < 4) throw ConfigError("analysis.growth_radii must be at least 4");
  if (!(a.growth_lo_cells > 0.0 && a.growth_hi_cells >= 2.0 * a.growth_lo_cells))
    throw ConfigError("analysis.growth_hi_cells must be at least twice analysis.growth_lo_cells > 0");
  if (a.box_scales_cells.size() < 3) throw ConfigError("analysis.box_scales_cells needs at least 3 scales");
  for (double s : a.box_scales_cells)
    if (!(s >= 1.0)) throw ConfigError("analysis.box_scales_cells entries must be >= 1");
  for (double s : a.sigmas)
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("analysis.sigmas entries must lie in (0, 1)");
  for (double x : a.holder_alphas)
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError("analysis.holder_alphas entries must lie in (0, 1]");
  if (a.sigma_points < 1 || a.s_samples < 1) throw ConfigError("analysis.sigma_points and s_samples must be positive");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

Grid RunConfig::make_grid() const { return build_grid(grid.extents, grid.cells); }

BumpSpec RunConfig::make_bump(const Grid& g) const {
  BumpSpec b = default_bump(g);
  for (std::size_t k = 0; k < seed.center.size(); ++k) b.center[k] = seed.center[k];
  if (seed.radius > 0.0) b.radius = seed.radius;
  b.amplitude = seed.amplitude;
  return b;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    set_config_value(cfg, section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& e : entries()) {
    const auto dot = e.key.find('.');
    const std::string sec = e.key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + ("[" + sec + "]\n");
      section = sec;
    }
    out += e.key.substr(dot + 1) + " = " + e.get(cfg) + "\n";
  }
  return out;
}

}  // namespace pobs

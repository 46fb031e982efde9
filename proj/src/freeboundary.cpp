#include "pobs/freeboundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace pobs {

std::size_t PositivityMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

double default_tau_pos(const Grid& grid, double p) {
  return std::pow(grid.max_h(), p / (p - 1.0));
}

PositivityMask positivity_set(const GridField& u, double tau_pos) {
  if (!(tau_pos >= 0.0) || !std::isfinite(tau_pos))
    throw ParameterError("positivity threshold must be finite and non-negative");
  PositivityMask m;
  m.grid = u.grid;
  m.tau_pos = tau_pos;
  m.inside.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) m.inside[i] = u[i] > tau_pos ? 1 : 0;
  return m;
}

FreeBoundary free_boundary_from_nodes(const Grid& grid, std::vector<std::size_t> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  FreeBoundary fb;
  fb.grid = grid;
  for (std::size_t n : nodes) {
    if (n >= grid.node_count()) throw RangeError("free-boundary node outside the grid");
    fb.points.push_back(grid.point(n));
  }
  fb.nodes = std::move(nodes);
  return fb;
}

FreeBoundary extract_free_boundary(const PositivityMask& mask) {
  const Grid& g = mask.grid;
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!mask[i] || g.is_boundary(i)) continue;
    const Index idx = g.multi(i);
    bool edge = false;
    for (int k = 0; k < g.dim() && !edge; ++k) {
      const std::size_t s = g.stride(k);
      if (idx[k] - 1 > 0 && !mask[i - s]) edge = true;
      if (idx[k] + 1 < g.cells(k) && !mask[i + s]) edge = true;
    }
    if (edge) nodes.push_back(i);
  }
  return free_boundary_from_nodes(g, std::move(nodes));
}

namespace {

// Squared-distance lower envelope along one line (Felzenszwalb–Huttenlocher).
void edt_line(std::vector<double>& f, double h, std::vector<double>& d, std::vector<int>& v,
              std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    const double xq = q * h;
    while (k >= 0) {
      const double xv = v[k] * h;
      const double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : ((f[q] + xq * xq) - (f[v[k - 1]] + v[k - 1] * h * v[k - 1] * h)) /
                               (2.0 * (xq - v[k - 1] * h));
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q * h) ++j;
    const double dx = (q - v[j]) * h;
    d[q] = dx * dx + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_transform(const Grid& g, const std::vector<std::size_t>& targets) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  for (std::size_t t : targets) dist[t] = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const int n = g.nodes(axis);
    const std::size_t s = g.stride(axis);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (std::size_t start = 0; start < g.node_count(); ++start) {
      if (g.multi(start)[axis] != 0) continue;
      for (int q = 0; q < n; ++q) f[q] = dist[start + q * s];
      edt_line(f, g.h(axis), d, v, z);
      for (int q = 0; q < n; ++q) dist[start + q * s] = d[q];
    }
  }
  for (double& x : dist) x = std::sqrt(x);
  return dist;
}

std::vector<PorosityRow> porosity_estimate(const FreeBoundary& fb, const PositivityMask& mask,
                                           const std::vector<double>& radii) {
  require_same_grid(fb.grid, mask.grid, "porosity_estimate");
  if (fb.empty()) throw RangeError("porosity needs a non-empty free boundary");
  const Grid& g = fb.grid;
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("porosity radius must be positive");
    for (const Point& x : fb.points)
      if (g.distance_to_boundary(x) < r) {
        std::ostringstream os;
        os << "porosity radius " << r << " exceeds the interior margin at a free-boundary point";
        throw DomainError(os.str());
      }
  }
  const std::vector<double> dt = distance_transform(g, fb.nodes);
  std::vector<PorosityRow> rows;
  for (double r : radii) {
    PorosityRow row;
    row.radius = r;
    row.min_delta = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t j = 0; j < fb.size(); ++j) {
      const Point& x = fb.points[j];
      const Index c = g.multi(fb.nodes[j]);
      Index lo{}, hi{};
      for (int k = 0; k < g.dim(); ++k) {
        const int span = static_cast<int>(std::ceil(r / g.h(k)));
        lo[k] = std::max(0, c[k] - span);
        hi[k] = std::min(g.cells(k), c[k] + span);
      }
      double best = 0.0;
      Index z = lo;
      for (z[0] = lo[0]; z[0] <= hi[0]; ++z[0])
        for (z[1] = lo[1]; z[1] <= hi[1]; ++z[1])
          for (z[2] = lo[2]; z[2] <= hi[2]; ++z[2]) {
            double d2 = 0.0;
            for (int k = 0; k < g.dim(); ++k) {
              const double dx = g.coord(k, z[k]) - x[k];
              d2 += dx * dx;
            }
            const double rem = r - std::sqrt(d2);
            if (rem <= 0.0) continue;
            best = std::max(best, std::min(dt[g.flat(z)], rem));
          }
      const double delta = best / r;
      sum += delta;
      if (delta < row.min_delta) {
        row.min_delta = delta;
        row.worst_point = x;
      }
    }
    row.samples = fb.size();
    row.mean_delta = sum / static_cast<double>(fb.size());
    rows.push_back(row);
  }
  return rows;
}

namespace {

long cell_of(double x, double lo, double s) { return static_cast<long>(std::floor((x - lo) / s)); }

std::size_t cover_count(const FreeBoundary& fb, double s, int axis) {
  const Grid& g = fb.grid;
  std::map<std::array<long, kMaxDim>, std::vector<double>> columns;
  for (const Point& x : fb.points) {
    std::array<long, kMaxDim> key{};
    for (int k = 0; k < g.dim(); ++k)
      if (k != axis) key[k] = cell_of(x[k], g.lo(k), s);
    columns[key].push_back(x[axis]);
  }
  std::size_t count = 0;
  const double slack = 1e-9 * s;
  for (auto& [key, coords] : columns) {
    std::sort(coords.begin(), coords.end());
    double end = -std::numeric_limits<double>::infinity();
    for (double c : coords)
      if (c >= end - slack) {
        ++count;
        end = c + s;
      }
  }
  return count;
}

}  // namespace

BoxCountResult box_count_measure(const FreeBoundary& fb, const std::vector<double>& scales) {
  if (scales.size() < 3) throw FitError("box counting needs at least 3 scales");
  if (fb.empty()) throw RangeError("box counting needs a non-empty free boundary");
  const Grid& g = fb.grid;
  BoxCountResult out;
  for (double s : scales) {
    if (!(s >= g.min_h() * (1.0 - 1e-12))) throw RangeError("box scale below the grid spacing");
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (int axis = 0; axis < g.dim(); ++axis) best = std::min(best, cover_count(fb, s, axis));
    std::vector<std::array<long, kMaxDim>> cells;
    for (const Point& x : fb.points) {
      std::array<long, kMaxDim> key{};
      for (int k = 0; k < g.dim(); ++k) key[k] = cell_of(x[k], g.lo(k), s);
      cells.push_back(key);
    }
    std::sort(cells.begin(), cells.end());
    const auto mesh = static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
    out.scales.push_back(s);
    out.counts.push_back(best);
    out.mesh_counts.push_back(mesh);
    out.proxies.push_back(static_cast<double>(best) * std::pow(s, g.dim() - 1));
  }
  const std::size_t n = scales.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(out.scales[i]);
    my += std::log(static_cast<double>(out.counts[i]));
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(out.scales[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(static_cast<double>(out.counts[i])) - my);
  }
  if (!(sxx > 0.0)) throw FitError("box counting needs at least two distinct scales");
  out.dimension = -sxy / sxx;
  return out;
}

SmallGradientSet small_gradient_set(const GridField& u, double p, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("sigma must lie in (0, 1)");
  if (!(p >= 2.0)) throw ParameterError("p must be at least 2");
  SmallGradientSet out;
  out.sigma = sigma;
  out.threshold = std::pow(sigma, 1.0 / (p - 1.0));
  const auto grad = node_gradients(u);
  out.inside.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < u.grid.dim(); ++k) s += grad[i][k] * grad[i][k];
    out.inside[i] = std::sqrt(s) <= out.threshold ? 1 : 0;
  }
  return out;
}

double gradient_smallness_measure(const GridField& u, double p, double sigma, const Point& center,
                                  double r, int s_samples, double tau_pos) {
  const Grid& g = u.grid;
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (g.distance_to_boundary(center) < r) throw DomainError("ball leaves the interior margin");
  if (s_samples < 1) throw ParameterError("s_samples must be positive");
  const double tau = tau_pos < 0.0 ? default_tau_pos(g, p) : tau_pos;
  const SmallGradientSet small = small_gradient_set(u, p, sigma);
  double hits = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!small.inside[i] || !(u[i] > tau)) continue;
    const Point x = g.point(i);
    double d2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) d2 += (x[k] - center[k]) * (x[k] - center[k]);
    const double d = std::sqrt(d2);
    if (d >= r) continue;
    // number of midpoints s_k = (k + 1/2)/S with d < r s_k
    const double kmin = d / r * s_samples - 0.5;
    const int first = std::max(0, static_cast<int>(std::floor(kmin)) + 1);
    hits += s_samples - first;
  }
  return hits / s_samples * g.cell_volume();
}

}  // namespace pobs

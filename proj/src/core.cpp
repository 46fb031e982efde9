#include "pobs/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pobs {

ProblemParams::ProblemParams(double p_, double lambda_, double m1_, double m2_, int dim_,
                             double eps_, double delta_reg_, double tol_res_)
    : p(p_), lambda(lambda_), m1(m1_), m2(m2_), dim(dim_), eps(eps_), delta_reg(delta_reg_),
      tol_res(tol_res_) {
  validate();
}

double critical_exponent(int dim, double p) {
  if (dim >= 3 && p < dim) return dim * p / (dim - p);
  return std::numeric_limits<double>::infinity();
}

void ProblemParams::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(std::isfinite(p) && std::isfinite(lambda) && std::isfinite(m1) && std::isfinite(m2) &&
        std::isfinite(eps) && std::isfinite(delta_reg) && std::isfinite(tol_res)))
    fail("problem parameters must be finite");
  if (dim < 1 || dim > kMaxDim) fail("dim must be 1, 2 or 3");
  if (!(p >= 2.0)) fail("exponent window violated: need p >= 2");
  if (!(p < lambda)) fail("exponent window violated: need p < lambda");
  const double pstar = critical_exponent(dim, p);
  if (!(lambda < pstar)) {
    std::ostringstream os;
    os << "exponent window violated: need lambda < N p/(N-p) = " << pstar;
    fail(os.str());
  }
  if (!(m1 > 0.0)) fail("m1 must be positive");
  if (!(m2 > 0.0)) fail("m2 must be positive");
  if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0, 1)");
  if (!(delta_reg >= 0.0)) fail("delta_reg must be non-negative");
  if (!(tol_res > 0.0)) fail("tol_res must be positive");
}

ProblemParams ProblemParams::with_eps(double new_eps) const {
  ProblemParams out = *this;
  out.eps = new_eps;
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::vector<Interval> extents, std::vector<int> cells) {
  if (extents.empty() || extents.size() > static_cast<std::size_t>(kMaxDim))
    throw ConfigError("grid dimension must be 1, 2 or 3");
  if (extents.size() != cells.size())
    throw ConfigError("grid extents and cell counts differ in length");
  dim_ = static_cast<int>(extents.size());
  extents_ = std::move(extents);
  for (int k = 0; k < dim_; ++k) {
    const Interval& iv = extents_[k];
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.hi > iv.lo))
      throw ConfigError("degenerate grid interval on axis " + std::to_string(k));
    if (cells[k] < 4)
      throw ConfigError("grid needs at least 4 cells on axis " + std::to_string(k));
    cells_[k] = cells[k];
    h_[k] = (iv.hi - iv.lo) / cells[k];
  }
  std::size_t s = 1;
  for (int k = dim_ - 1; k >= 0; --k) {
    stride_[k] = s;
    s *= static_cast<std::size_t>(cells_[k] + 1);
  }
  node_count_ = s;
  cell_volume_ = 1.0;
  for (int k = 0; k < dim_; ++k) cell_volume_ *= h_[k];
}

Grid build_grid(const std::vector<Interval>& extents, const std::vector<int>& cells) {
  return Grid(extents, cells);
}

double Grid::max_h() const { return *std::max_element(h_.begin(), h_.begin() + dim_); }
double Grid::min_h() const { return *std::min_element(h_.begin(), h_.begin() + dim_); }

std::size_t Grid::flat(const Index& idx) const {
  std::size_t f = 0;
  for (int k = 0; k < dim_; ++k) f += static_cast<std::size_t>(idx[k]) * stride_[k];
  return f;
}

Index Grid::multi(std::size_t f) const {
  Index idx{};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>(f / stride_[k]);
    f %= stride_[k];
  }
  return idx;
}

Point Grid::point(std::size_t f) const {
  const Index idx = multi(f);
  Point x{};
  for (int k = 0; k < dim_; ++k) x[k] = coord(k, idx[k]);
  return x;
}

bool Grid::is_boundary(std::size_t f) const {
  const Index idx = multi(f);
  for (int k = 0; k < dim_; ++k)
    if (idx[k] == 0 || idx[k] == cells_[k]) return true;
  return false;
}

double Grid::distance_to_boundary(const Point& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dim_; ++k) d = std::min({d, x[k] - lo(k), hi(k) - x[k]});
  return d;
}

bool Grid::operator==(const Grid& o) const {
  if (dim_ != o.dim_) return false;
  for (int k = 0; k < dim_; ++k)
    if (cells_[k] != o.cells_[k] || !(extents_[k] == o.extents_[k])) return false;
  return true;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------

GridField::GridField(Grid g, double fill) : grid(std::move(g)), values(grid.node_count(), fill) {}

GridField::GridField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.node_count())
    throw ShapeError("field has " + std::to_string(values.size()) + " values, grid has " +
                     std::to_string(grid.node_count()) + " nodes");
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridField::min() const { return *std::min_element(values.begin(), values.end()); }
double GridField::max() const { return *std::max_element(values.begin(), values.end()); }

bool GridField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

GridField sample(const Grid& grid, const std::function<double(const Point&)>& f) {
  GridField out(grid);
  for (std::size_t i = 0; i < grid.node_count(); ++i) out[i] = f(grid.point(i));
  return out;
}

std::vector<Point> node_gradients(const GridField& u) {
  const Grid& g = u.grid;
  std::vector<Point> grad(g.node_count(), Point{});
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Index idx = g.multi(i);
    for (int k = 0; k < g.dim(); ++k) {
      const std::size_t s = g.stride(k);
      const double h = g.h(k);
      if (idx[k] == 0)
        grad[i][k] = (u[i + s] - u[i]) / h;
      else if (idx[k] == g.cells(k))
        grad[i][k] = (u[i] - u[i - s]) / h;
      else
        grad[i][k] = (u[i + s] - u[i - s]) / (2.0 * h);
    }
  }
  return grad;
}

std::vector<double> hessian_norms(const GridField& u) {
  const Grid& g = u.grid;
  std::vector<double> out(g.node_count(), 0.0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.is_boundary(i)) continue;
    double sum = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const std::size_t sk = g.stride(k);
      const double hk = g.h(k);
      const double dkk = (u[i + sk] - 2.0 * u[i] + u[i - sk]) / (hk * hk);
      sum += dkk * dkk;
      for (int l = k + 1; l < g.dim(); ++l) {
        const std::size_t sl = g.stride(l);
        const double dkl =
            (u[i + sk + sl] - u[i + sk - sl] - u[i - sk + sl] + u[i - sk - sl]) / (4.0 * hk * g.h(l));
        sum += 2.0 * dkl * dkl;
      }
    }
    out[i] = std::sqrt(sum);
  }
  return out;
}

double interpolate(const GridField& u, const Point& x) {
  const Grid& g = u.grid;
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int k = 0; k < g.dim(); ++k) {
    double t = (x[k] - g.lo(k)) / g.h(k);
    t = std::clamp(t, 0.0, static_cast<double>(g.cells(k)));
    int i = static_cast<int>(std::floor(t));
    if (i >= g.cells(k)) i = g.cells(k) - 1;
    base[k] = i;
    frac[k] = t - i;
  }
  double acc = 0.0;
  const int corners = 1 << g.dim();
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t f = 0;
    for (int k = 0; k < g.dim(); ++k) {
      const int bit = (c >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      f += static_cast<std::size_t>(base[k] + bit) * g.stride(k);
    }
    if (w != 0.0) acc += w * u[f];
  }
  return acc;
}

// ---------------------------------------------------------------------------

std::function<double(const Point&)> CoefficientSpec::function(int dim) const {
  const double c0_ = c0, amp_ = amp, freq_ = freq;
  if (kind == "constant") return [c0_](const Point&) { return c0_; };
  if (kind == "sin_x")
    return [c0_, amp_, freq_](const Point& x) { return c0_ + amp_ * std::sin(freq_ * x[0]); };
  if (kind == "sin_product")
    return [c0_, amp_, freq_, dim](const Point& x) {
      double prod = 1.0;
      for (int k = 0; k < dim; ++k) prod *= std::sin(freq_ * x[k]);
      return c0_ + amp_ * prod;
    };
  throw ConfigError("unknown coefficient kind '" + kind + "'");
}

CoefficientField eval_coefficient(const std::function<double(const Point&)>& a, const Grid& grid) {
  CoefficientField out;
  out.grid = grid;
  out.values.resize(grid.node_count());
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const double v = a(grid.point(i));
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << "coefficient violation: a = " << v << " at node " << i << " (need a > 0)";
      throw CoefficientError(os.str());
    }
    out.values[i] = v;
  }
  GridField field(grid, out.values);
  const auto grad = node_gradients(field);
  const auto hess = hessian_norms(field);
  double a0 = std::numeric_limits<double>::infinity();
  double a1 = 0.0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    a0 = std::min(a0, out.values[i]);
    a1 = std::max(a1, std::abs(out.values[i]));
    if (grid.is_boundary(i)) continue;
    double gn = 0.0;
    for (int k = 0; k < grid.dim(); ++k) gn += grad[i][k] * grad[i][k];
    a1 = std::max({a1, std::sqrt(gn), hess[i]});
  }
  out.a0 = a0;
  out.a1 = a1;
  return out;
}

CoefficientField eval_coefficient(const CoefficientSpec& spec, const Grid& grid) {
  return eval_coefficient(spec.function(grid.dim()), grid);
}

}  // namespace pobs

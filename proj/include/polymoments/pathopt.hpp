#pragma once

// Upper bounds on limsup |M_p|^{1/p} from paths between the interval
// endpoints. f^p is entire, so M_p is the integral along any such path and
// the ML inequality gives limsup |M_p|^{1/p} <= max over the path of |f|.
// The optimizer is a bottleneck Dijkstra on a lattice, refined by repeated
// 2x zooms inside a tube around the incumbent path.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "polymoments/contour.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/roots.hpp"

namespace polymoments {

struct GridSpec {
  double x_lo = -1.0, x_hi = 1.0;
  double y_lo = -1.0, y_hi = 1.0;
  int nx = 512;
  int ny = 512;
};

/// Bounding box of {a, b} and the roots of f', inflated by 50% about its
/// center. A degenerate side is first widened to a quarter of the other.
inline GridSpec default_grid(const Poly& f, ComplexFloat a, ComplexFloat b, int nx = 512, int ny = 512) {
  std::vector<ComplexFloat> pts{a, b};
  if (f.degree() >= 2)
    for (const auto& r : complex_roots(derivative(f))) pts.push_back(r.root);
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (auto z : pts) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  double hw = 0.5 * (xmax - xmin), hh = 0.5 * (ymax - ymin);
  hw = std::max(hw, 0.25 * hh);
  hh = std::max(hh, 0.25 * hw);
  if (hw == 0.0) hw = hh = 0.5;
  hw *= 1.5;
  hh *= 1.5;
  return {cx - hw, cx + hw, cy - hh, cy + hh, nx, ny};
}

struct PathBound {
  Polyline path;
  double bound = 0.0;            ///< max of |f| over the path nodes
  double certified_bound = 0.0;  ///< bound plus per-segment Lipschitz inflation
  int grid_levels = 0;
  std::vector<double> level_bounds;  ///< incumbent bound after each level
};

inline constexpr int kTubeCells = 6;

namespace detail {

// Lattice anchored at `origin` with the given spacings; node (i, j) sits at
// origin + i hx + i j hy.
struct Lattice {
  ComplexFloat origin;
  double hx = 1.0, hy = 1.0;

  ComplexFloat at(long i, long j) const { return origin + ComplexFloat(i * hx, j * hy); }
};

struct Node {
  long i, j;
};

inline std::uint64_t node_key(long i, long j) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) | static_cast<std::uint32_t>(j);
}

struct SearchResult {
  double value = INFINITY;
  std::vector<int> path;  ///< node indices from start to goal
};

// Minimizes max node weight along 8-connected paths.
template <class IndexOf>
SearchResult bottleneck_dijkstra(const std::vector<Node>& nodes, const std::vector<double>& weight,
                                 IndexOf&& index_of, int start, int goal) {
  const std::size_t n = nodes.size();
  std::vector<double> best(n, INFINITY);
  std::vector<int> prev(n, -1);
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  best[start] = weight[start];
  queue.push({best[start], start});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u == goal) break;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int v = index_of(nodes[u].i + di, nodes[u].j + dj);
        if (v < 0 || settled[v]) continue;
        const double cand = std::max(d, weight[v]);
        if (cand < best[v]) {
          best[v] = cand;
          prev[v] = u;
          queue.push({cand, v});
        }
      }
    }
  }
  SearchResult r;
  if (!settled[goal]) return r;
  r.value = best[goal];
  for (int v = goal; v >= 0; v = prev[v]) r.path.push_back(v);
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

inline double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

// Bound of |f'| on the disk |z| <= R from the coefficients.
inline double derivative_bound(const std::vector<ComplexFloat>& c, double R) {
  double acc = 0.0, rpow = 1.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    acc += std::abs(c[k]) * k * rpow;
    rpow *= R;
  }
  return acc;
}

inline long snap(double offset, double h) { return std::lround(offset / h); }

}  // namespace detail

/// max over segments of max(|f(p)|, |f(q)|) + |q - p|/2 * sup |f'|.
inline double certified_path_bound(const std::vector<ComplexFloat>& coeffs, const Polyline& path) {
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const ComplexFloat p = path.points[k], q = path.points[k + 1];
    const double R = std::max(std::abs(p), std::abs(q));
    const double ends = std::max(std::abs(eval_float(coeffs, p)), std::abs(eval_float(coeffs, q)));
    out = std::max(out, ends + 0.5 * std::abs(q - p) * detail::derivative_bound(coeffs, R));
  }
  if (path.points.size() == 1) out = std::abs(eval_float(coeffs, path.points[0]));
  return out;
}

/// Bottleneck path from a to b. The lattice is anchored at a with spacings
/// chosen so that b is also a node; for real a, b the straight segment is a
/// lattice row, so the bound never exceeds the sup-norm on [a, b].
inline PathBound minimax_path(const Poly& f, ComplexFloat a, ComplexFloat b, const GridSpec& grid, int levels = 3) {
  if (a == b) throw DomainError("minimax path needs distinct endpoints");
  if (grid.nx < 16 || grid.ny < 16) throw DomainError("grid needs at least 16 nodes per axis");
  if (!(grid.x_lo < grid.x_hi) || !(grid.y_lo < grid.y_hi)) throw DomainError("grid box is empty");
  const double slack = 1e-12 * std::max({1.0, std::abs(grid.x_lo), std::abs(grid.x_hi), std::abs(grid.y_lo), std::abs(grid.y_hi)});
  for (auto z : {a, b})
    if (z.real() < grid.x_lo - slack || z.real() > grid.x_hi + slack || z.imag() < grid.y_lo - slack ||
        z.imag() > grid.y_hi + slack)
      throw DomainError("minimax path endpoint outside the grid box");
  if (levels < 0) throw DomainError("refinement levels must be >= 0");

  const auto coeffs = to_float_coeffs(f);
  auto weight_at = [&](ComplexFloat z) { return std::abs(eval_float(coeffs, z)); };

  // Spacing close to the requested one with b on the lattice.
  auto pick_spacing = [](double delta, double extent, int count) {
    const double target = extent / (count - 1);
    if (std::abs(delta) <= 0.0) return target;
    const long k = std::max(1L, std::lround(std::abs(delta) / target));
    return std::abs(delta) / k;
  };
  detail::Lattice lat{a, pick_spacing(b.real() - a.real(), grid.x_hi - grid.x_lo, grid.nx),
                      pick_spacing(b.imag() - a.imag(), grid.y_hi - grid.y_lo, grid.ny)};
  const long bi = detail::snap(b.real() - a.real(), lat.hx), bj = detail::snap(b.imag() - a.imag(), lat.hy);

  // Level 0: dense lattice over the box.
  const long i_lo = std::min(0L, static_cast<long>(std::floor((grid.x_lo - a.real()) / lat.hx + 1e-9)));
  const long i_hi = std::max(bi, static_cast<long>(std::ceil((grid.x_hi - a.real()) / lat.hx - 1e-9)));
  const long j_lo = std::min({0L, bj, static_cast<long>(std::floor((grid.y_lo - a.imag()) / lat.hy + 1e-9))});
  const long j_hi = std::max({0L, bj, static_cast<long>(std::ceil((grid.y_hi - a.imag()) / lat.hy - 1e-9))});
  const long NX = i_hi - i_lo + 1, NY = j_hi - j_lo + 1;

  std::vector<detail::Node> nodes;
  std::vector<double> weight;
  nodes.reserve(NX * NY);
  weight.reserve(NX * NY);
  for (long i = i_lo; i <= i_hi; ++i)
    for (long j = j_lo; j <= j_hi; ++j) {
      nodes.push_back({i, j});
      weight.push_back(weight_at(lat.at(i, j)));
    }
  auto dense_index = [&](long i, long j) -> int {
    if (i < i_lo || i > i_hi || j < j_lo || j > j_hi) return -1;
    return static_cast<int>((i - i_lo) * NY + (j - j_lo));
  };
  auto result = detail::bottleneck_dijkstra(nodes, weight, dense_index, dense_index(0, 0), dense_index(bi, bj));
  if (result.path.empty()) throw ConvergenceError("no lattice path between the endpoints");

  PathBound out;
  out.bound = result.value;
  for (int v : result.path) out.path.points.push_back(lat.at(nodes[v].i, nodes[v].j));
  out.level_bounds.push_back(out.bound);

  for (int level = 1; level <= levels; ++level) {
    const detail::Lattice fine{a, lat.hx / (1L << level), lat.hy / (1L << level)};
    const long scale = 1L << level;
    const double radius = 2.0 * kTubeCells;  // previous-level cells, in fine cells

    std::vector<detail::Node> tube;
    std::unordered_map<std::uint64_t, int> index;
    auto coords = [&](ComplexFloat z) {
      return std::pair{(z.real() - a.real()) / fine.hx, (z.imag() - a.imag()) / fine.hy};
    };
    for (std::size_t k = 0; k + 1 < out.path.points.size(); ++k) {
      auto [u0, v0] = coords(out.path.points[k]);
      auto [u1, v1] = coords(out.path.points[k + 1]);
      const long ia = static_cast<long>(std::floor(std::min(u0, u1) - radius));
      const long ib = static_cast<long>(std::ceil(std::max(u0, u1) + radius));
      const long ja = static_cast<long>(std::floor(std::min(v0, v1) - radius));
      const long jb = static_cast<long>(std::ceil(std::max(v0, v1) + radius));
      for (long i = ia; i <= ib; ++i)
        for (long j = ja; j <= jb; ++j) {
          if (detail::segment_distance(i, j, u0, v0, u1, v1) > radius) continue;
          const auto key = detail::node_key(i, j);
          if (index.count(key)) continue;
          index.emplace(key, static_cast<int>(tube.size()));
          tube.push_back({i, j});
        }
    }
    std::vector<double> w(tube.size());
    for (std::size_t k = 0; k < tube.size(); ++k) w[k] = weight_at(fine.at(tube[k].i, tube[k].j));
    auto sparse_index = [&](long i, long j) -> int {
      auto it = index.find(detail::node_key(i, j));
      return it == index.end() ? -1 : it->second;
    };
    const int start = sparse_index(0, 0), goal = sparse_index(bi * scale, bj * scale);
    if (start >= 0 && goal >= 0) {
      auto refined = detail::bottleneck_dijkstra(tube, w, sparse_index, start, goal);
      if (!refined.path.empty() && refined.value <= out.bound) {
        out.bound = refined.value;
        out.path.points.clear();
        for (int v : refined.path) out.path.points.push_back(fine.at(tube[v].i, tube[v].j));
      }
    }
    out.level_bounds.push_back(out.bound);
  }
  out.grid_levels = levels;

  // Endpoints are lattice nodes; pin them to the exact inputs.
  out.path.points.front() = a;
  out.path.points.back() = b;
  out.bound = std::max({out.bound, weight_at(a), weight_at(b)});
  out.certified_bound = std::max(out.bound, certified_path_bound(coeffs, out.path));
  return out;
}

/// Real-interval convenience with the default box.
inline PathBound minimax_path(const Poly& f, const Interval& I, int nx = 512, int ny = 512, int levels = 3) {
  const ComplexFloat a(to_double(I.a), 0.0), b(to_double(I.b), 0.0);
  return minimax_path(f, a, b, default_grid(f, a, b, nx, ny), levels);
}

struct BoundReport {
  double tail_max = 0.0;
  double bound = 0.0;
  double certified_bound = 0.0;
  bool consistent = false;  ///< tail_max <= certified_bound + 1e-6
};

inline BoundReport bound_report(const Poly&, const Interval& I, const PathBound& pb, const MomentSeries& s) {
  if (!(s.interval == I)) throw DomainError("bound report: series interval differs from the requested interval");
  BoundReport r;
  r.tail_max = limsup_estimate(s).tail_max;
  r.bound = pb.bound;
  r.certified_bound = pb.certified_bound;
  r.consistent = r.tail_max <= pb.certified_bound + 1e-6;
  return r;
}

inline nlohmann::json to_json(const PathBound& pb) {
  nlohmann::json pts = nlohmann::json::array();
  for (auto z : pb.path.points) pts.push_back({z.real(), z.imag()});
  return {{"bound", pb.bound},
          {"certified_bound", pb.certified_bound},
          {"levels", pb.grid_levels},
          {"level_bounds", pb.level_bounds},
          {"path_points", pts}};
}

inline nlohmann::json to_json(const BoundReport& r) {
  return {{"tail_max", r.tail_max},
          {"bound", r.bound},
          {"certified_bound", r.certified_bound},
          {"consistent", r.consistent}};
}

inline nlohmann::json to_json(const GridSpec& g) {
  return {{"box", {g.x_lo, g.x_hi, g.y_lo, g.y_hi}}, {"nx", g.nx}, {"ny", g.ny}};
}

}  // namespace polymoments

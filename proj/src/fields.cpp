#include "kplane/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "kplane/errors.hpp"

namespace kplane {

namespace {

constexpr int kMaxDim = 8;

// Per-axis stencil: up to W node indices and weights; `count` valid taps.
template <int W>
struct AxisStencil {
  std::array<std::ptrdiff_t, W> offset{};  // already multiplied by stride
  std::array<double, W> weight{};
  int count = 0;
};

// Returns false when x lies outside the bounding box on this axis.
bool linear_axis(double x, double origin, double h, int n, std::size_t stride, AxisStencil<2>& s) {
  const double u = (x - origin) / h;
  if (!(u >= 0.0) || u > n - 1) return false;
  if (n == 1) {
    s.offset[0] = 0;
    s.weight[0] = 1.0;
    s.count = 1;
    return true;
  }
  int i = static_cast<int>(std::floor(u));
  if (i > n - 2) i = n - 2;
  const double f = u - i;
  s.offset[0] = static_cast<std::ptrdiff_t>(i * stride);
  s.offset[1] = static_cast<std::ptrdiff_t>((i + 1) * stride);
  s.weight[0] = 1.0 - f;
  s.weight[1] = f;
  s.count = 2;
  return true;
}

bool cubic_axis(double x, double origin, double h, int n, std::size_t stride, AxisStencil<4>& s) {
  const double u = (x - origin) / h;
  if (!(u >= 0.0) || u > n - 1) return false;
  int i = static_cast<int>(std::floor(u));
  if (i > n - 1) i = n - 1;
  const double f = u - i;
  const double w[4] = {((-0.5 * f + 1.0) * f - 0.5) * f, (1.5 * f - 2.5) * f * f + 1.0,
                       ((-1.5 * f + 2.0) * f + 0.5) * f, (0.5 * f - 0.5) * f * f};
  s.count = 0;
  for (int j = 0; j < 4; ++j) {
    const int idx = i - 1 + j;
    if (idx < 0 || idx >= n) continue;
    s.offset[s.count] = static_cast<std::ptrdiff_t>(idx * stride);
    s.weight[s.count] = w[j];
    ++s.count;
  }
  return true;
}

template <int W>
double accumulate(const double* v, const AxisStencil<W>* s, int d) {
  switch (d) {
    case 1: {
      double acc = 0.0;
      for (int a = 0; a < s[0].count; ++a) acc += s[0].weight[a] * v[s[0].offset[a]];
      return acc;
    }
    case 2: {
      double acc = 0.0;
      for (int a = 0; a < s[0].count; ++a) {
        const double* row = v + s[0].offset[a];
        double inner = 0.0;
        for (int b = 0; b < s[1].count; ++b) inner += s[1].weight[b] * row[s[1].offset[b]];
        acc += s[0].weight[a] * inner;
      }
      return acc;
    }
    case 3: {
      double acc = 0.0;
      for (int a = 0; a < s[0].count; ++a) {
        const double* slab = v + s[0].offset[a];
        double mid = 0.0;
        for (int b = 0; b < s[1].count; ++b) {
          const double* row = slab + s[1].offset[b];
          double inner = 0.0;
          for (int c = 0; c < s[2].count; ++c) inner += s[2].weight[c] * row[s[2].offset[c]];
          mid += s[1].weight[b] * inner;
        }
        acc += s[0].weight[a] * mid;
      }
      return acc;
    }
    default: {
      std::array<int, kMaxDim> pos{};
      double acc = 0.0;
      for (;;) {
        std::ptrdiff_t off = 0;
        double w = 1.0;
        for (int ax = 0; ax < d; ++ax) {
          off += s[ax].offset[pos[ax]];
          w *= s[ax].weight[pos[ax]];
        }
        acc += w * v[off];
        int ax = d - 1;
        while (ax >= 0 && ++pos[ax] == s[ax].count) pos[ax--] = 0;
        if (ax < 0) break;
      }
      return acc;
    }
  }
}

template <int W, typename AxisFn>
double interpolate_impl(const GridSpec& g, const std::vector<double>& values, std::span<const double> x,
                        AxisFn axis_fn) {
  const int d = g.dim();
  if (static_cast<int>(x.size()) != d) throw DomainError("interpolate: point dimension mismatch");
  std::array<AxisStencil<W>, kMaxDim> st;
  std::size_t stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    if (!axis_fn(x[a], g.origin[a], g.spacing, g.shape[a], stride, st[a])) return 0.0;
    stride *= static_cast<std::size_t>(g.shape[a]);
  }
  return accumulate<W>(values.data(), st.data(), d);
}

}  // namespace

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::vector<std::size_t> GridSpec::strides() const {
  std::vector<std::size_t> st(shape.size(), 1);
  for (int a = dim() - 2; a >= 0; --a) st[a] = st[a + 1] * static_cast<std::size_t>(shape[a + 1]);
  return st;
}

void GridSpec::node(std::size_t flat, std::span<double> out) const {
  for (int a = dim() - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(shape[a]);
    out[a] = origin[a] + static_cast<double>(flat % n) * spacing;
    flat /= n;
  }
}

double GridSpec::max_corner_norm() const {
  double sq = 0.0;
  for (int a = 0; a < dim(); ++a) {
    const double lo = origin[a];
    const double hi = origin[a] + (shape[a] - 1) * spacing;
    sq += std::max(lo * lo, hi * hi);
  }
  return std::sqrt(sq);
}

void GridSpec::validate() const {
  if (shape.empty() || shape.size() > static_cast<std::size_t>(kMaxDim)) {
    throw DomainError("grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (origin.size() != shape.size()) throw DomainError("grid origin/shape length mismatch");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive and finite");
  for (int s : shape)
    if (s < 1) throw DomainError("grid shape entries must be >= 1");
  for (double o : origin)
    if (!std::isfinite(o)) throw DomainError("grid origin must be finite");
}

GridSpec GridSpec::centered(int dim, int n, double spacing) {
  GridSpec g;
  g.spacing = spacing;
  g.shape.assign(static_cast<std::size_t>(dim), n);
  g.origin.assign(static_cast<std::size_t>(dim), -0.5 * (n - 1) * spacing);
  return g;
}

GridField::GridField(GridSpec g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  grid.validate();
  if (values.size() != grid.size()) {
    throw DomainError("grid field has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(grid.size()));
  }
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("grid field has non-finite values");
}

GridField::GridField(GridSpec g) : grid(std::move(g)) {
  grid.validate();
  values.assign(grid.size(), 0.0);
}

GridField GridField::sample(const GridSpec& g, const std::function<double(std::span<const double>)>& f) {
  GridField out(g);
  std::vector<double> x(static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    g.node(i, x);
    out.values[i] = f(x);
  }
  return out;
}

double interpolate(const GridField& field, std::span<const double> x) {
  return interpolate_impl<2>(field.grid, field.values, x, linear_axis);
}

double interpolate_cubic(const GridField& field, std::span<const double> x) {
  return interpolate_impl<4>(field.grid, field.values, x, cubic_axis);
}

double interpolate(const GridField& field, std::span<const double> x, Interp mode) {
  return mode == Interp::Cubic ? interpolate_cubic(field, x) : interpolate(field, x);
}

double integrate(const GridField& field) {
  const double sum = std::accumulate(field.values.begin(), field.values.end(), 0.0);
  return std::pow(field.grid.spacing, field.dim()) * sum;
}

Sinogram::Sinogram(int d_, int k_, std::vector<Frame> frames_, GridSpec t_grid_)
    : d(d_), k(k_), frames(std::move(frames_)), t_grid(std::move(t_grid_)) {
  t_grid.validate();
  values.assign(frames.size() * t_grid.size(), 0.0);
  validate();
}

std::span<double> Sinogram::block(std::size_t frame) {
  return {values.data() + frame * block_size(), block_size()};
}

std::span<const double> Sinogram::block(std::size_t frame) const {
  return {values.data() + frame * block_size(), block_size()};
}

double Sinogram::interpolate_t(std::size_t frame, std::span<const double> t) const {
  const int n = t_grid.dim();
  if (static_cast<int>(t.size()) != n) throw DomainError("interpolate_t: offset dimension mismatch");
  std::array<AxisStencil<2>, kMaxDim> st;
  std::size_t stride = 1;
  for (int a = n - 1; a >= 0; --a) {
    if (!linear_axis(t[a], t_grid.origin[a], t_grid.spacing, t_grid.shape[a], stride, st[a])) return 0.0;
    stride *= static_cast<std::size_t>(t_grid.shape[a]);
  }
  return accumulate<2>(values.data() + frame * block_size(), st.data(), n);
}

void Sinogram::validate() const {
  check_dimensions(d, k);
  t_grid.validate();
  if (t_grid.dim() != d - k) throw DomainError("sinogram t-grid must have d-k dimensions");
  for (const auto& f : frames)
    if (f.d() != d || f.k() != k) throw DomainError("sinogram frames must share (d, k)");
  if (values.size() != frames.size() * t_grid.size()) throw DomainError("sinogram value count mismatch");
}

std::vector<double> QuadSpec::weights_1d() const {
  validate();
  std::vector<double> w(static_cast<std::size_t>(nodes_per_axis), step());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

void QuadSpec::validate() const {
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) throw DomainError("quadrature halfwidth must be positive");
  if (nodes_per_axis < 2) throw DomainError("quadrature needs at least 2 nodes per axis");
}

QuadSpec QuadSpec::defaults_for(const GridSpec& grid) {
  QuadSpec q;
  double diag_sq = 0.0;
  for (int s : grid.shape) diag_sq += std::pow((s - 1) * grid.spacing, 2);
  q.halfwidth = 0.5 * std::sqrt(diag_sq);
  q.nodes_per_axis = 2 * *std::max_element(grid.shape.begin(), grid.shape.end());
  return q;
}

}  // namespace kplane

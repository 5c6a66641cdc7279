#include "kplane/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "kplane/errors.hpp"
#include "kplane/filters.hpp"
#include "kplane/parallel.hpp"

namespace kplane {

namespace {

// Tensor quadrature nodes on the plane: offsets B y_q (row-major, d per node)
// and weights.
struct PlaneNodes {
  std::vector<double> offsets;
  std::vector<double> weights;
};

PlaneNodes plane_nodes(const Eigen::MatrixXd& basis, const QuadSpec& quad) {
  const int d = static_cast<int>(basis.rows());
  const int k = static_cast<int>(basis.cols());
  const int n = quad.nodes_per_axis;
  const auto w1 = quad.weights_1d();
  const double step = quad.step();
  std::size_t count = 1;
  for (int a = 0; a < k; ++a) count *= static_cast<std::size_t>(n);
  PlaneNodes nodes;
  nodes.offsets.resize(count * static_cast<std::size_t>(d));
  nodes.weights.resize(count);
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (std::size_t q = 0; q < count; ++q) {
    std::size_t rem = q;
    double w = 1.0;
    for (int a = k - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
      w *= w1[static_cast<std::size_t>(idx[a])];
    }
    nodes.weights[q] = w;
    for (int c = 0; c < d; ++c) {
      double v = 0.0;
      for (int a = 0; a < k; ++a) v += basis(c, a) * (-quad.halfwidth + idx[a] * step);
      nodes.offsets[q * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = v;
    }
  }
  return nodes;
}

double plane_integral(const GridField& field, const PlaneNodes& nodes, std::span<const double> base, Interp mode) {
  const std::size_t d = base.size();
  std::array<double, 8> x{};
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes.weights.size(); ++q) {
    const double* off = nodes.offsets.data() + q * d;
    for (std::size_t c = 0; c < d; ++c) x[c] = base[c] + off[c];
    const double v = interpolate(field, std::span<const double>(x.data(), d), mode);
    if (v != 0.0) acc += nodes.weights[q] * v;
  }
  return acc;
}

// Largest |x| over nodes where |f| exceeds 1e-6 of its maximum.
double support_radius(const GridField& field) {
  double peak = 0.0;
  for (double v : field.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  std::vector<double> x(static_cast<std::size_t>(field.dim()));
  double radius = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (std::abs(field.values[i]) <= 1e-6 * peak) continue;
    field.grid.node(i, x);
    double sq = 0.0;
    for (double c : x) sq += c * c;
    radius = std::max(radius, std::sqrt(sq));
  }
  return radius;
}

}  // namespace

FrameSet FrameSet::circle(int count) {
  if (count < 1) throw DomainError("frame count must be >= 1");
  FrameSet fs;
  fs.mode = Mode::DeterministicCircle;
  fs.frames.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) fs.frames.push_back(circle_frame(2.0 * std::numbers::pi * j / count));
  return fs;
}

FrameSet FrameSet::monte_carlo(int d, int k, int count, RngSeed seed) {
  if (count < 1) throw DomainError("frame count must be >= 1");
  FrameSet fs;
  fs.mode = Mode::MonteCarlo;
  fs.seed = seed;
  Rng rng(seed);
  fs.frames.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) fs.frames.push_back(haar_frame_sample(d, k, rng));
  return fs;
}

FrameSet FrameSet::from(std::vector<Frame> frames) {
  FrameSet fs;
  fs.frames = std::move(frames);
  fs.validate();
  return fs;
}

void FrameSet::validate() const {
  if (frames.empty()) throw DomainError("frame set is empty");
  for (const auto& f : frames)
    if (f.d() != frames.front().d() || f.k() != frames.front().k()) throw DomainError("frame set mixes (d, k)");
}

GridSpec default_t_grid(const GridSpec& field_grid, int d, int k) {
  check_dimensions(d, k);
  const double h = field_grid.spacing;
  const int half = static_cast<int>(std::ceil(field_grid.max_corner_norm() / h - 1e-9));
  GridSpec t;
  t.spacing = h;
  t.shape.assign(static_cast<std::size_t>(d - k), 2 * half + 1);
  t.origin.assign(static_cast<std::size_t>(d - k), -half * h);
  return t;
}

double forward_point(const GridField& field, const Frame& frame, std::span<const double> t, const QuadSpec& quad) {
  quad.validate();
  if (field.dim() != frame.d()) throw DomainError("forward: field dimension differs from frame dimension");
  if (static_cast<int>(t.size()) != frame.m()) throw DomainError("forward: offset dimension must be d-k");
  const PlaneNodes nodes = plane_nodes(complete_frame(frame), quad);
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  const Eigen::VectorXd base = frame.rows().transpose() * tv;
  return plane_integral(field, nodes, std::span<const double>(base.data(), static_cast<std::size_t>(base.size())),
                        quad.interp);
}

Sinogram forward(const GridField& field, const FrameSet& frames, const GridSpec& t_grid, const QuadSpec& quad,
                 Diagnostics* diag) {
  frames.validate();
  quad.validate();
  const int d = frames.d();
  const int k = frames.k();
  if (field.dim() != d) throw DomainError("forward: field dimension differs from frame dimension");
  Sinogram sino(d, k, frames.frames, t_grid);

  if (diag) {
    const double radius = support_radius(field);
    if (quad.halfwidth < radius) {
      diag->warn("forward: quadrature halfwidth " + std::to_string(quad.halfwidth) +
                 " is smaller than the field support radius " + std::to_string(radius) + " (truncation risk)");
    }
  }

  const std::size_t nt = t_grid.size();
  parallel_for(sino.frames.size(), [&](std::size_t j) {
    const Frame& a = sino.frames[j];
    const PlaneNodes nodes = plane_nodes(complete_frame(a), quad);
    auto out = sino.block(j);
    std::vector<double> t(static_cast<std::size_t>(d - k));
    std::vector<double> base(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < nt; ++i) {
      t_grid.node(i, t);
      for (int c = 0; c < d; ++c) {
        double v = 0.0;
        for (int r = 0; r < d - k; ++r) v += a.rows()(r, c) * t[static_cast<std::size_t>(r)];
        base[static_cast<std::size_t>(c)] = v;
      }
      out[i] = plane_integral(field, nodes, base, quad.interp);
    }
  });

  auto source = std::make_shared<const GridField>(field);
  sino.generator = std::make_shared<const SinogramGenerator>(
      [source, quad](const Frame& a, std::span<const double> t) { return forward_point(*source, a, t, quad); });
  return sino;
}

GridField backproject(const Sinogram& sino, const GridSpec& grid, Diagnostics* diag) {
  sino.validate();
  grid.validate();
  if (sino.frames.empty()) throw DomainError("backproject: empty frame set");
  const int d = sino.d;
  const int m = sino.d - sino.k;
  if (grid.dim() != d) throw DomainError("backproject: output grid dimension differs from d");

  if (diag) {
    int uncovered = 0;
    for (const auto& f : sino.frames) {
      for (int r = 0; r < m; ++r) {
        double lo = 0.0;
        double hi = 0.0;
        for (int a = 0; a < d; ++a) {
          const double c = f.rows()(r, a);
          const double e0 = c * grid.origin[a];
          const double e1 = c * (grid.origin[a] + (grid.shape[a] - 1) * grid.spacing);
          lo += std::min(e0, e1);
          hi += std::max(e0, e1);
        }
        const double tlo = sino.t_grid.origin[r];
        const double thi = tlo + (sino.t_grid.shape[r] - 1) * sino.t_grid.spacing;
        if (lo < tlo - 1e-12 || hi > thi + 1e-12) {
          ++uncovered;
          break;
        }
      }
    }
    if (uncovered > 0) {
      diag->warn("backproject: t-grid does not cover A x on " + std::to_string(uncovered) +
                 " frame(s); uncovered points read 0");
    }
  }

  GridField out(grid);
  const std::size_t total = grid.size();
  const double scale = stiefel_total_mass(sino.d, sino.k) / static_cast<double>(sino.frames.size());
  constexpr std::size_t kChunk = 2048;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;

  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(total, lo + kChunk);
    const std::size_t len = hi - lo;
    std::vector<double> coords(len * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < len; ++i) grid.node(lo + i, std::span<double>(coords.data() + i * d, d));
    std::vector<double> acc(len, 0.0);
    std::vector<double> t(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < sino.frames.size(); ++j) {
      const auto& a = sino.frames[j].rows();
      for (std::size_t i = 0; i < len; ++i) {
        const double* x = coords.data() + i * d;
        for (int r = 0; r < m; ++r) {
          double v = 0.0;
          for (int col = 0; col < d; ++col) v += a(r, col) * x[col];
          t[static_cast<std::size_t>(r)] = v;
        }
        acc[i] += sino.interpolate_t(j, t);
      }
    }
    for (std::size_t i = 0; i < len; ++i) out.values[lo + i] = scale * acc[i];
  });
  return out;
}

GridField fbp(const Sinogram& sino, int d, int k, const GridSpec& grid, double pad_factor, Diagnostics* diag) {
  return backproject(ramp_filter(sino, d, k, pad_factor), grid, diag);
}

double least_squares_gain(const GridField& estimate, const GridField& truth) {
  if (estimate.values.size() != truth.values.size()) throw DomainError("least_squares_gain: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    num += estimate.values[i] * truth.values[i];
    den += estimate.values[i] * estimate.values[i];
  }
  if (den == 0.0) throw DomainError("least_squares_gain: estimate is identically zero");
  return num / den;
}

double relative_l2(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw DomainError("relative_l2: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double calibrate_gain(int d, int k, const FrameSet& frames, const GridSpec& grid, const GridSpec& t_grid,
                      const QuadSpec& quad, double pad_factor) {
  check_dimensions(d, k);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  const auto gaussian = [norm](std::span<const double> x) {
    double sq = 0.0;
    for (double c : x) sq += c * c;
    return norm * std::exp(-0.5 * sq);
  };
  const GridField truth = GridField::sample(grid, gaussian);
  const Sinogram sino = forward(truth, frames, t_grid, quad);
  return least_squares_gain(fbp(sino, d, k, grid, pad_factor), truth);
}

std::vector<double> moment_integral(const Sinogram& sino, int axis, int order) {
  sino.validate();
  const int m = sino.d - sino.k;
  if (order != 0 && order != 1) throw DomainError("moment_integral: order must be 0 or 1");
  if (axis < 1 || axis > m) throw DomainError("moment_integral: axis must be in [1, d-k]");
  const double cell = std::pow(sino.t_grid.spacing, m);
  std::vector<double> out(sino.frames.size());
  std::vector<double> t(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < sino.frames.size(); ++j) {
    const auto block = sino.block(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      double w = 1.0;
      if (order == 1) {
        sino.t_grid.node(i, t);
        w = t[static_cast<std::size_t>(axis - 1)];
      }
      acc += block[i] * w;
    }
    out[j] = cell * acc;
  }
  return out;
}

}  // namespace kplane

namespace kplane {

namespace {
double sinogram_cell(const Sinogram& s) {
  return stiefel_total_mass(s.d, s.k) / static_cast<double>(s.frames.size()) *
         std::pow(s.t_grid.spacing, s.d - s.k);
}
}  // namespace

double sinogram_inner(const Sinogram& a, const Sinogram& b) {
  if (a.values.size() != b.values.size() || a.frames.size() != b.frames.size() || !(a.t_grid == b.t_grid)) {
    throw DomainError("sinogram_inner: sinograms have different layouts");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
  return sinogram_cell(a) * acc;
}

double sinogram_norm(const Sinogram& s) { return std::sqrt(sinogram_inner(s, s)); }

double sinogram_mass(const Sinogram& s) {
  double acc = 0.0;
  for (double v : s.values) acc += v;
  return sinogram_cell(s) * acc;
}

double field_inner(const GridField& f, const GridField& g) {
  if (!(f.grid == g.grid)) throw DomainError("field_inner: fields live on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * g.values[i];
  return std::pow(f.grid.spacing, f.dim()) * acc;
}

}  // namespace kplane

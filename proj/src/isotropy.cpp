#include "kplane/isotropy.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "kplane/errors.hpp"
#include "kplane/filters.hpp"
#include "kplane/parallel.hpp"

namespace kplane {

namespace {

constexpr double kSameFrame = 1e-12;

struct Nearest {
  std::size_t index = 0;
  double distance = std::numeric_limits<double>::infinity();
};

Nearest nearest_frame(const std::vector<Frame>& frames, const Eigen::MatrixXd& a) {
  Nearest best;
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const double dist = (frames[j].rows() - a).norm();
    if (dist < best.distance) best = {j, dist};
  }
  return best;
}

std::vector<double> rotate_vector(const Rotation& u, std::span<const double> t) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t r = 0; r < t.size(); ++r)
    for (std::size_t c = 0; c < t.size(); ++c)
      out[r] += u.mat()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * t[c];
  return out;
}

Frame rotate_frame(const Rotation& u, const Frame& a) { return Frame(a.d(), a.k(), u.mat() * a.rows()); }

bool is_identity(const Rotation& u) {
  return (u.mat() - Eigen::MatrixXd::Identity(u.dim(), u.dim())).norm() == 0.0;
}

bool on_node(const GridSpec& g, std::span<const double> t) {
  for (std::size_t a = 0; a < t.size(); ++a) {
    const double u = (t[a] - g.origin[a]) / g.spacing;
    if (std::abs(u - std::round(u)) > 1e-9) return false;
  }
  return true;
}

/// Stored values when the frame is stored and t is a node (or nothing better
/// exists), otherwise the generator.
double lookup(const Sinogram& sino, const Nearest& hit, const Frame& a, std::span<const double> t,
              double tolerance) {
  if (hit.distance <= kSameFrame && (!sino.generator || on_node(sino.t_grid, t))) {
    return sino.interpolate_t(hit.index, t);
  }
  if (sino.generator) return (*sino.generator)(a, t);
  if (hit.distance > tolerance) {
    throw DomainError("no stored frame within " + std::to_string(tolerance) + " of the requested frame (nearest at " +
                      std::to_string(hit.distance) + ") and no generator attached");
  }
  return sino.interpolate_t(hit.index, t);
}

/// Evaluator of g at arbitrary (A, t), sharing a stripped copy of the stored
/// values when no generator is attached.
SinogramGenerator make_evaluator(const Sinogram& sino, double tolerance) {
  if (sino.generator) return *sino.generator;
  auto stored = std::make_shared<Sinogram>(sino);
  return [stored, tolerance](const Frame& a, std::span<const double> t) {
    return sinogram_at(*stored, a, t, tolerance);
  };
}

}  // namespace

void MollifiedAtom::validate() const {
  if (!(frame_width > 0.0) || !(t_width > 0.0)) throw DomainError("mollified atom widths must be positive");
  if (static_cast<int>(offset.size()) != frame.m()) throw DomainError("mollified atom offset must have d-k entries");
  for (double v : offset)
    if (!std::isfinite(v)) throw DomainError("mollified atom offset must be finite");
}

std::vector<Rotation> iso_rotations(int m, int n_rotations, RngSeed seed) {
  if (m < 1) throw DomainError("iso_rotations: dimension must be >= 1");
  if (m == 1) {
    return {Rotation(Eigen::MatrixXd::Constant(1, 1, 1.0)), Rotation(Eigen::MatrixXd::Constant(1, 1, -1.0))};
  }
  if (n_rotations < 1) throw DomainError("iso_rotations: n_rotations must be >= 1");
  std::vector<Rotation> out;
  out.reserve(static_cast<std::size_t>(n_rotations));
  if (m == 2) {
    if (n_rotations % 2 != 0) throw DomainError("iso_rotations: n_rotations must be even for d-k = 2");
    const int q = n_rotations / 2;
    for (int reflect = 0; reflect < 2; ++reflect) {
      for (int j = 0; j < q; ++j) {
        const double th = 2.0 * std::numbers::pi * j / q;
        Eigen::MatrixXd u(2, 2);
        u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        if (reflect) u.col(1) *= -1.0;
        out.emplace_back(std::move(u));
      }
    }
    return out;
  }
  Rng rng(seed);
  while (static_cast<int>(out.size()) < n_rotations) {
    Rotation u = haar_orthogonal_sample(m, rng);
    if (static_cast<int>(out.size()) + 1 < n_rotations) out.push_back(u.transpose());
    out.push_back(std::move(u));
  }
  return out;
}

double sinogram_at(const Sinogram& sino, const Frame& a, std::span<const double> t, double frame_tolerance) {
  if (a.d() != sino.d || a.k() != sino.k) throw DomainError("sinogram_at: frame dimensions differ from sinogram");
  const Nearest hit = nearest_frame(sino.frames, a.rows());
  return lookup(sino, hit, a, t, frame_tolerance);
}

Sinogram project_iso(const Sinogram& sino, int n_rotations, RngSeed seed, double frame_tolerance) {
  sino.validate();
  const int m = sino.d - sino.k;
  const auto rotations = std::make_shared<const std::vector<Rotation>>(iso_rotations(m, n_rotations, seed));
  const double inv = 1.0 / static_cast<double>(rotations->size());

  Sinogram out(sino.d, sino.k, sino.frames, sino.t_grid);
  const std::size_t nt = sino.block_size();
  parallel_for(sino.frames.size(), [&](std::size_t j) {
    auto dst = out.block(j);
    std::vector<double> t(static_cast<std::size_t>(m));
    for (const Rotation& u : *rotations) {
      if (is_identity(u)) {
        const auto src = sino.block(j);
        for (std::size_t i = 0; i < nt; ++i) dst[i] += src[i];
        continue;
      }
      const Frame ua = rotate_frame(u, sino.frames[j]);
      const Nearest hit = nearest_frame(sino.frames, ua.rows());
      for (std::size_t i = 0; i < nt; ++i) {
        sino.t_grid.node(i, t);
        dst[i] += lookup(sino, hit, ua, rotate_vector(u, t), frame_tolerance);
      }
    }
    for (std::size_t i = 0; i < nt; ++i) dst[i] *= inv;
  });

  auto source = std::make_shared<const SinogramGenerator>(make_evaluator(sino, frame_tolerance));
  out.generator = std::make_shared<const SinogramGenerator>(
      [source, rotations, inv](const Frame& a, std::span<const double> t) {
        double acc = 0.0;
        for (const Rotation& u : *rotations) {
          if (is_identity(u)) {
            acc += (*source)(a, t);
          } else {
            const auto ut = rotate_vector(u, t);
            acc += (*source)(rotate_frame(u, a), ut);
          }
        }
        return acc * inv;
      });
  return out;
}

Sinogram pk_project(const Sinogram& sino, const GridSpec& grid, const QuadSpec& quad, double pad_factor,
                    Diagnostics* diag) {
  const GridField mid = fbp(sino, sino.d, sino.k, grid, pad_factor, diag);
  return forward(mid, FrameSet::from(sino.frames), sino.t_grid, quad, diag);
}

Sinogram render_delta_iso(const MollifiedAtom& atom, const std::vector<Frame>& frames, const GridSpec& t_grid,
                          int n_rotations, RngSeed seed) {
  atom.validate();
  if (frames.empty()) throw DomainError("render_delta_iso: empty frame set");
  const int d = atom.frame.d();
  const int k = atom.frame.k();
  const int m = d - k;
  if (atom.t_width < 2.0 * t_grid.spacing) {
    throw DomainError("render_delta_iso: t_width must be at least two t-grid cells");
  }
  Sinogram out(d, k, frames, t_grid);
  const auto rotations = iso_rotations(m, n_rotations, seed);
  const double cell = stiefel_total_mass(d, k) / static_cast<double>(frames.size());
  const double t_cell = std::pow(t_grid.spacing, m);
  const std::size_t nt = t_grid.size();

  std::vector<double> w(frames.size());
  std::vector<double> g(nt);
  std::vector<double> t(static_cast<std::size_t>(m));
  for (const Rotation& u : rotations) {
    const FramePoint centre = rotate_pair(atom.frame, atom.offset, u);

    double w_sum = 0.0;
    for (std::size_t j = 0; j < frames.size(); ++j) {
      const double dist = (frames[j].rows() - centre.frame.rows()).norm();
      w[j] = std::exp(-dist * dist / (2.0 * atom.frame_width * atom.frame_width));
      w_sum += w[j];
    }
    if (!(w_sum * cell > 0.0)) {
      throw DomainError("render_delta_iso: no frame carries weight near the atom; widen frame_width");
    }

    double g_sum = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      t_grid.node(i, t);
      double sq = 0.0;
      for (int r = 0; r < m; ++r) {
        const double diff = t[static_cast<std::size_t>(r)] - centre.t[static_cast<std::size_t>(r)];
        sq += diff * diff;
      }
      g[i] = std::exp(-sq / (2.0 * atom.t_width * atom.t_width));
      g_sum += g[i];
    }
    if (!(g_sum > 0.0)) throw DomainError("render_delta_iso: t-grid does not reach the atom offset");

    const double scale = 1.0 / (w_sum * cell * g_sum * t_cell * static_cast<double>(rotations.size()));
    for (std::size_t j = 0; j < frames.size(); ++j) {
      if (w[j] == 0.0) continue;
      auto dst = out.block(j);
      for (std::size_t i = 0; i < nt; ++i) dst[i] += scale * w[j] * g[i];
    }
  }
  return out;
}

}  // namespace kplane

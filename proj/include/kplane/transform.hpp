#pragma once

// Discrete k-plane transform, backprojection, filtered backprojection, gain
// calibration and moment diagnostics.

#include <string>
#include <vector>

#include "kplane/fields.hpp"

namespace kplane {

/// Warnings collected by operations that can silently truncate (quadrature
/// window smaller than the support, t-grid not covering A x).
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

struct FrameSet {
  enum class Mode { DeterministicCircle, MonteCarlo, Explicit };

  std::vector<Frame> frames;
  Mode mode = Mode::Explicit;
  RngSeed seed{};

  /// Equiangular frames (cos theta_j, sin theta_j), theta_j = 2 pi j / count.
  static FrameSet circle(int count);
  /// `count` Haar frames drawn sequentially from one (seed, stream) generator.
  static FrameSet monte_carlo(int d, int k, int count, RngSeed seed);
  static FrameSet from(std::vector<Frame> frames);

  int d() const { return frames.front().d(); }
  int k() const { return frames.front().k(); }
  void validate() const;
};

/// Default offset grid: spacing of the field grid, symmetric about 0, wide
/// enough to cover A x for every node x.
GridSpec default_t_grid(const GridSpec& field_grid, int d, int k);

/// Trapezoid quadrature of field(B y + A^T t) over y in [-L, L]^k for every
/// frame and every t node. The result carries a generator that re-renders the
/// transform at arbitrary (A, t).
Sinogram forward(const GridField& field, const FrameSet& frames, const GridSpec& t_grid, const QuadSpec& quad,
                 Diagnostics* diag = nullptr);

/// Single value of the discrete transform at (A, t).
double forward_point(const GridField& field, const Frame& frame, std::span<const double> t, const QuadSpec& quad);

/// stiefel_total_mass(d, k) times the mean over frames of g(A, A x), with
/// multilinear interpolation in t only.
GridField backproject(const Sinogram& sino, const GridSpec& grid, Diagnostics* diag = nullptr);

/// backproject(ramp_filter(sino)).
GridField fbp(const Sinogram& sino, int d, int k, const GridSpec& grid, double pad_factor = 2.0,
              Diagnostics* diag = nullptr);

/// Least-squares scalar s minimizing ||s * estimate - truth||.
double least_squares_gain(const GridField& estimate, const GridField& truth);

/// ||estimate - truth|| / ||truth||.
double relative_l2(std::span<const double> estimate, std::span<const double> truth);

/// Runs forward + fbp on the unit Gaussian sampled on `grid` and returns the
/// least-squares gain against the analytic Gaussian (ideally 1).
double calibrate_gain(int d, int k, const FrameSet& frames, const GridSpec& grid, const GridSpec& t_grid,
                      const QuadSpec& quad, double pad_factor = 2.0);

/// Per frame: t_spacing^{d-k} * sum over t of g(A, t) * t_axis^order, with
/// axis in [1, d-k] and order in {0, 1}.
std::vector<double> moment_integral(const Sinogram& sino, int axis, int order);

/// Discrete pairing on the k-plane domain:
/// stiefel_total_mass / N * t_spacing^{d-k} * sum of a * b over frames and t.
double sinogram_inner(const Sinogram& a, const Sinogram& b);
double sinogram_norm(const Sinogram& s);
/// sinogram_inner against the constant 1.
double sinogram_mass(const Sinogram& s);

/// h^d * sum of f * g.
double field_inner(const GridField& f, const GridField& g);

}  // namespace kplane

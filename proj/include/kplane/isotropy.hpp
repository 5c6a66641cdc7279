#pragma once

// Isotropic projector on sinograms, the sinogram-domain projector
// R_k R_k^* K_{d-k}, and mollified isotropic point atoms.

#include <span>
#include <vector>

#include "kplane/fields.hpp"
#include "kplane/geometry.hpp"
#include "kplane/transform.hpp"

namespace kplane {

/// Point mass at (A0, t0) smoothed by a Gaussian in the frame (Frobenius
/// distance, width frame_width) and in t (width t_width), each factor with
/// unit discrete mass.
struct MollifiedAtom {
  Frame frame;
  std::vector<double> offset;
  double frame_width = 0.25;
  double t_width = 1.0;

  void validate() const;
};

/// Rotations of O(m) averaged over: {+1, -1} for m = 1; the dihedral group
/// of order n_rotations (n_rotations / 2 rotations and as many reflections)
/// for m = 2; otherwise n_rotations Haar draws arranged in (U, U^T) pairs.
std::vector<Rotation> iso_rotations(int m, int n_rotations, RngSeed seed);

/// Value of a sinogram at an arbitrary (A, t). A stored frame equal to A with
/// t on a grid node is read directly; otherwise the attached generator
/// re-renders the value; otherwise the nearest stored frame within
/// frame_tolerance (Frobenius) is interpolated in t. Throws DomainError on a
/// lookup miss.
double sinogram_at(const Sinogram& sino, const Frame& a, std::span<const double> t, double frame_tolerance = 0.15);

/// Average of g(UA, Ut) over iso_rotations(d-k, n_rotations, seed). The result
/// carries a generator evaluating the same average at arbitrary (A, t).
Sinogram project_iso(const Sinogram& sino, int n_rotations = 64, RngSeed seed = {}, double frame_tolerance = 0.15);

/// forward(backproject(ramp_filter(sino)), same frames and t-grid), through
/// the intermediate field on `grid`.
Sinogram pk_project(const Sinogram& sino, const GridSpec& grid, const QuadSpec& quad, double pad_factor = 2.0,
                    Diagnostics* diag = nullptr);

/// Mollified atom rendered on frames x t_grid and averaged over rotated
/// centres (U A0, U t0), U in iso_rotations(d-k, n_rotations, seed).
Sinogram render_delta_iso(const MollifiedAtom& atom, const std::vector<Frame>& frames, const GridSpec& t_grid,
                          int n_rotations = 64, RngSeed seed = {});

}  // namespace kplane

#pragma once

// Closed-form and semi-analytic oracles: Gaussian k-plane transforms, the
// Fourier slice identity, transforms of isotropic functions, and ridges.

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "kplane/fields.hpp"
#include "kplane/filters.hpp"

namespace kplane {

/// R_k of the unit isotropic Gaussian centred at x0:
/// (2 pi)^{-(d-k)/2} exp(-|t - A x0|^2 / 2).
double gaussian_kplane(const Frame& a, std::span<const double> t, std::span<const double> x0);

/// Unit isotropic Gaussian density in R^n centred at `center`.
double gaussian_density(std::span<const double> x, std::span<const double> center);

struct SlicePair {
  std::complex<double> lhs;  // (d-k)-D transform of R_k phi(A, .) at omega
  std::complex<double> rhs;  // d-D transform of phi at A^T omega
};

/// Both sides of the Fourier slice identity, each by grid quadrature.
SlicePair slice_pair(const GridField& field, const Frame& a, std::span<const double> omega, const GridSpec& t_grid,
                     const QuadSpec& quad);

struct IsotropicOptions {
  double d_omega = 0.005;
  /// Spectrum is computed until it stays below this fraction of its DC value.
  double spectrum_floor = 1e-14;
  double omega_max = 200.0;
};

/// R_k of the isotropic function with radial profile `rho`, as a radial table
/// in |t| with `count` nodes spaced `step`: the d-D Hankel transform followed
/// by the inverse (d-k)-D Hankel transform.
RadialTable isotropic_kplane(const RadialTable& rho, int d, int k, double step, std::size_t count,
                             const IsotropicOptions& options = {});

struct RidgeProfile {
  enum class Kind { Gaussian, Rbf };
  Kind kind = Kind::Gaussian;
  double s = 0.0;                              // rbf order
  std::shared_ptr<const RadialTable> table;    // rbf: green_rbf(s, d-k)

  static RidgeProfile gaussian();
  static RidgeProfile rbf(double s, int n);
};

/// x -> weight * profile(A0 x - t0).
struct RidgeAtom {
  double weight = 1.0;
  Frame frame;
  std::vector<double> offset;
  RidgeProfile profile;

  void validate() const;
};

double ridge_eval(const RidgeAtom& atom, std::span<const double> x);

/// The atom sampled on a grid.
GridField ridge_field(const RidgeAtom& atom, const GridSpec& grid);

}  // namespace kplane

#pragma once

// Isotropic Fourier multipliers (ramp filter, Bessel potentials, Gaussian
// smoothing), Bessel functions, Hankel transforms, and the Bessel-potential
// Green's function.
//
// Fourier convention: F{f}(xi) = int f(x) e^{-i xi.x} dx, with the inverse
// carrying (2 pi)^{-n}.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kplane/fields.hpp"

namespace kplane {

/// Radial frequency profile rho -> m(rho) of an isotropic multiplier.
struct RadialSpec {
  enum class Kind { Ramp, Bessel, Gaussian, Custom };

  Kind kind = Kind::Gaussian;
  int d = 0;
  int k = 0;           // ramp: c_{d,k} rho^k
  double s = 0.0;      // bessel: (1 + rho^2)^{sign * s / 2}
  int sign = 1;
  double sigma = 1.0;  // gaussian: exp(-sigma^2 rho^2 / 2)
  double table_step = 1.0;    // custom: profile sampled at i * table_step,
  std::vector<double> table;  // linear interpolation, clamped past the end

  static RadialSpec ramp(int d, int k);
  static RadialSpec bessel(double s, int sign);
  static RadialSpec gaussian(double sigma);
  static RadialSpec custom(double step, std::vector<double> table);

  double profile(double rho) const;
};

/// Zero-pads every axis to pad_factor * N (rounded up to even), multiplies
/// the DFT by spec.profile(|omega|), inverts, and crops.
GridField apply_radial(const GridField& field, const RadialSpec& spec, double pad_factor = 2.0);

/// Filters each frame's t-block independently.
Sinogram apply_radial(const Sinogram& sino, const RadialSpec& spec, double pad_factor = 2.0);

/// Filters one row-major block sampled on `grid` in place.
void apply_radial_block(std::span<double> block, const GridSpec& grid, const RadialSpec& spec,
                        double pad_factor = 2.0);

/// K_{d-k}: ramp multiplier c_{d,k} |omega|^k applied along t on every frame.
Sinogram ramp_filter(const Sinogram& sino, int d, int k, double pad_factor = 2.0);

/// Bessel function of the first kind for nu in {-1/2, 0, 1/2, 1, 3/2, 2}.
/// Half-integer orders use closed forms; integer orders use the power series
/// for x <= 12 and the Hankel asymptotic expansion beyond.
double bessel_j(double nu, double x);

/// (2 pi)^{n/2} x^{1-n/2} J_{n/2-1}(x): the Fourier transform of the surface
/// measure on S^{n-1} at radius x. Equals |S^{n-1}| at x = 0.
double sphere_kernel(int n, double x);

/// Samples r_i = i * step of a radial function, linearly interpolated.
/// Lookups beyond the last node call `extend` when it is set, otherwise
/// return 0.
struct RadialTable {
  double step = 1.0;
  std::vector<double> values;
  std::function<double(double)> extend;

  double operator()(double r) const;
  double max_radius() const { return step * static_cast<double>(values.size() - 1); }
};

/// Radial frequency profile of the isotropic function with radial profile
/// `rho` in R^d, by trapezoid quadrature of the Hankel integral at each omega.
/// d must be in [1, 6].
std::vector<double> hankel_profile(const RadialTable& rho, int d, std::span<const double> omegas);

/// Inverse of hankel_profile in R^n: spectrum sampled on a uniform omega
/// grid (omega_i = i * d_omega) mapped to radii r.
std::vector<double> inverse_hankel(std::span<const double> spectrum, double d_omega, int n,
                                   std::span<const double> radii);

/// Green's function of the Bessel potential (I - Delta)^{s/2} in R^n, i.e.
/// the inverse Fourier transform of (1 + |omega|^2)^{-s/2}, tabulated on
/// [0, r_max] with the given step. Requires s > n. Values past r_max are
/// computed on demand.
std::shared_ptr<const RadialTable> green_rbf(double s, int n, double r_max = 20.0, double step = 1e-3);

/// Direct evaluation behind green_rbf.
double green_rbf_value(double s, int n, double r);

}  // namespace kplane

#include "kplane/analytic.hpp"

#include <cmath>
#include <numbers>

#include "kplane/errors.hpp"
#include "kplane/transform.hpp"

namespace kplane {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double gaussian_density(std::span<const double> x, std::span<const double> center) {
  if (x.size() != center.size()) throw DomainError("gaussian_density: dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - center[i]) * (x[i] - center[i]);
  return std::pow(kTwoPi, -0.5 * static_cast<double>(x.size())) * std::exp(-0.5 * sq);
}

double gaussian_kplane(const Frame& a, std::span<const double> t, std::span<const double> x0) {
  const int m = a.m();
  if (static_cast<int>(t.size()) != m || static_cast<int>(x0.size()) != a.d()) {
    throw DomainError("gaussian_kplane: dimension mismatch");
  }
  double sq = 0.0;
  for (int r = 0; r < m; ++r) {
    double ax = 0.0;
    for (int c = 0; c < a.d(); ++c) ax += a.rows()(r, c) * x0[static_cast<std::size_t>(c)];
    const double diff = t[static_cast<std::size_t>(r)] - ax;
    sq += diff * diff;
  }
  return std::pow(kTwoPi, -0.5 * m) * std::exp(-0.5 * sq);
}

SlicePair slice_pair(const GridField& field, const Frame& a, std::span<const double> omega, const GridSpec& t_grid,
                     const QuadSpec& quad) {
  const int d = a.d();
  const int m = a.m();
  if (static_cast<int>(omega.size()) != m) throw DomainError("slice_pair: omega must have d-k entries");
  if (field.dim() != d) throw DomainError("slice_pair: field dimension differs from frame");

  const Sinogram sino = forward(field, FrameSet::from({a}), t_grid, quad);
  std::complex<double> lhs = 0.0;
  std::vector<double> t(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < sino.block_size(); ++i) {
    t_grid.node(i, t);
    double phase = 0.0;
    for (int r = 0; r < m; ++r) phase += omega[static_cast<std::size_t>(r)] * t[static_cast<std::size_t>(r)];
    lhs += sino.values[i] * std::polar(1.0, -phase);
  }
  lhs *= std::pow(t_grid.spacing, m);

  std::vector<double> xi(static_cast<std::size_t>(d), 0.0);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < m; ++r) xi[static_cast<std::size_t>(c)] += a.rows()(r, c) * omega[static_cast<std::size_t>(r)];
  std::complex<double> rhs = 0.0;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.values[i] == 0.0) continue;
    field.grid.node(i, x);
    double phase = 0.0;
    for (int c = 0; c < d; ++c) phase += xi[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    rhs += field.values[i] * std::polar(1.0, -phase);
  }
  rhs *= std::pow(field.grid.spacing, d);
  return {lhs, rhs};
}

RadialTable isotropic_kplane(const RadialTable& rho, int d, int k, double step, std::size_t count,
                             const IsotropicOptions& options) {
  check_dimensions(d, k);
  if (count < 2 || !(step > 0.0)) throw DomainError("isotropic_kplane: output table needs step > 0 and >= 2 nodes");
  const double omega_cap = std::min(options.omega_max, std::numbers::pi / rho.step);

  // Spectrum in blocks until it has decayed below the floor for a full block.
  std::vector<double> spectrum;
  constexpr std::size_t kBlock = 200;
  double dc = 0.0;
  for (;;) {
    std::vector<double> omegas;
    for (std::size_t i = 0; i < kBlock; ++i) omegas.push_back(options.d_omega * static_cast<double>(spectrum.size() + i));
    const auto part = hankel_profile(rho, d, omegas);
    if (spectrum.empty()) dc = std::abs(part.front());
    spectrum.insert(spectrum.end(), part.begin(), part.end());
    double tail = 0.0;
    for (double v : part) tail = std::max(tail, std::abs(v));
    if (tail <= options.spectrum_floor * std::max(dc, 1e-300) || dc == 0.0) break;
    if (options.d_omega * static_cast<double>(spectrum.size()) >= omega_cap) break;
  }

  std::vector<double> radii(count);
  for (std::size_t i = 0; i < count; ++i) radii[i] = step * static_cast<double>(i);
  RadialTable out;
  out.step = step;
  out.values = inverse_hankel(spectrum, options.d_omega, d - k, radii);
  return out;
}

RidgeProfile RidgeProfile::gaussian() { return {}; }

RidgeProfile RidgeProfile::rbf(double s, int n) {
  RidgeProfile p;
  p.kind = Kind::Rbf;
  p.s = s;
  p.table = green_rbf(s, n);
  return p;
}

void RidgeAtom::validate() const {
  if (!std::isfinite(weight)) throw DomainError("ridge atom weight must be finite");
  if (static_cast<int>(offset.size()) != frame.m()) throw DomainError("ridge atom offset must have d-k entries");
  for (double v : offset)
    if (!std::isfinite(v)) throw DomainError("ridge atom offset must be finite");
  if (profile.kind == RidgeProfile::Kind::Rbf && !profile.table) throw DomainError("rbf ridge atom has no profile table");
}

double ridge_eval(const RidgeAtom& atom, std::span<const double> x) {
  const int m = atom.frame.m();
  const int d = atom.frame.d();
  if (static_cast<int>(x.size()) != d) throw DomainError("ridge_eval: point dimension mismatch");
  double sq = 0.0;
  for (int r = 0; r < m; ++r) {
    double v = -atom.offset[static_cast<std::size_t>(r)];
    for (int c = 0; c < d; ++c) v += atom.frame.rows()(r, c) * x[static_cast<std::size_t>(c)];
    sq += v * v;
  }
  if (atom.profile.kind == RidgeProfile::Kind::Gaussian) {
    return atom.weight * std::pow(kTwoPi, -0.5 * m) * std::exp(-0.5 * sq);
  }
  return atom.weight * (*atom.profile.table)(std::sqrt(sq));
}

GridField ridge_field(const RidgeAtom& atom, const GridSpec& grid) {
  atom.validate();
  return GridField::sample(grid, [&](std::span<const double> x) { return ridge_eval(atom, x); });
}

}  // namespace kplane

#include "kplane/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include <fftw3.h>

#include "kplane/errors.hpp"
#include "kplane/parallel.hpp"

namespace kplane {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int padded_size(int n, double pad_factor) {
  int p = static_cast<int>(std::ceil(pad_factor * n - 1e-9));
  p = std::max(p, n);
  if (p % 2 != 0) ++p;
  return p;
}

// Forward/backward n-D complex plans for one padded shape, plus the
// multiplier sampled on that shape (row-major).
class MultiplierPlan {
 public:
  MultiplierPlan(const GridSpec& grid, const RadialSpec& spec, double pad_factor) : grid_(grid) {
    const int n = grid.dim();
    padded_.resize(static_cast<std::size_t>(n));
    total_ = 1;
    for (int a = 0; a < n; ++a) {
      padded_[a] = padded_size(grid.shape[a], pad_factor);
      total_ *= static_cast<std::size_t>(padded_[a]);
    }
    multiplier_.resize(total_);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t flat = 0; flat < total_; ++flat) {
      std::size_t rem = flat;
      double rho_sq = 0.0;
      for (int a = n - 1; a >= 0; --a) {
        const int np = padded_[a];
        const int m = static_cast<int>(rem % static_cast<std::size_t>(np));
        rem /= static_cast<std::size_t>(np);
        idx[a] = m;
        const int freq = m < np / 2 ? m : m - np;
        const double w = 2.0 * kPi * freq / (np * grid.spacing);
        rho_sq += w * w;
      }
      const double value = spec.profile(std::sqrt(rho_sq));
      if (!std::isfinite(value)) {
        std::string bin;
        for (int a = 0; a < n; ++a) bin += (a ? "," : "") + std::to_string(idx[a]);
        throw DomainError("apply_radial: non-finite multiplier at frequency bin (" + bin + ")");
      }
      multiplier_[flat] = value / static_cast<double>(total_);
    }
    auto* buf = fftw_alloc_complex(total_);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft(n, padded_.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(n, padded_.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
  }

  ~MultiplierPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  MultiplierPlan(const MultiplierPlan&) = delete;
  MultiplierPlan& operator=(const MultiplierPlan&) = delete;

  void apply(std::span<double> block) const {
    auto* buf = fftw_alloc_complex(total_);
    std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * total_, 0.0);
    scatter(block, buf);
    fftw_execute_dft(forward_, buf, buf);
    for (std::size_t i = 0; i < total_; ++i) {
      buf[i][0] *= multiplier_[i];
      buf[i][1] *= multiplier_[i];
    }
    fftw_execute_dft(backward_, buf, buf);
    gather(buf, block);
    fftw_free(buf);
  }

 private:
  // Copies the block into the leading corner of the padded array.
  void scatter(std::span<const double> block, fftw_complex* buf) const {
    const int n = grid_.dim();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t flat = 0; flat < block.size(); ++flat) {
      buf[padded_index(flat, idx)][0] = block[flat];
    }
  }

  void gather(const fftw_complex* buf, std::span<double> block) const {
    const int n = grid_.dim();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t flat = 0; flat < block.size(); ++flat) {
      const std::size_t p = padded_index(flat, idx);
      block[flat] = buf[p][0];
      max_re = std::max(max_re, std::abs(buf[p][0]));
      max_im = std::max(max_im, std::abs(buf[p][1]));
    }
    if (max_im > 1e-10 * std::max(1.0, max_re)) {
      throw DomainError("apply_radial: imaginary residue " + std::to_string(max_im) + " exceeds 1e-10");
    }
  }

  std::size_t padded_index(std::size_t flat, std::vector<int>& idx) const {
    const int n = grid_.dim();
    for (int a = n - 1; a >= 0; --a) {
      const auto na = static_cast<std::size_t>(grid_.shape[a]);
      idx[a] = static_cast<int>(flat % na);
      flat /= na;
    }
    std::size_t p = 0;
    for (int a = 0; a < n; ++a) p = p * static_cast<std::size_t>(padded_[a]) + static_cast<std::size_t>(idx[a]);
    return p;
  }

  GridSpec grid_;
  std::vector<int> padded_;
  std::size_t total_ = 0;
  std::vector<double> multiplier_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

void check_pad(double pad_factor) {
  if (!(pad_factor >= 1.0) || !std::isfinite(pad_factor)) throw DomainError("pad_factor must be >= 1");
}

}  // namespace

RadialSpec RadialSpec::ramp(int d, int k) {
  check_dimensions(d, k);
  RadialSpec r;
  r.kind = Kind::Ramp;
  r.d = d;
  r.k = k;
  return r;
}

RadialSpec RadialSpec::bessel(double s, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("bessel multiplier sign must be +1 or -1");
  RadialSpec r;
  r.kind = Kind::Bessel;
  r.s = s;
  r.sign = sign;
  return r;
}

RadialSpec RadialSpec::gaussian(double sigma) {
  RadialSpec r;
  r.kind = Kind::Gaussian;
  r.sigma = sigma;
  return r;
}

RadialSpec RadialSpec::custom(double step, std::vector<double> table) {
  if (!(step > 0.0) || table.empty()) throw DomainError("custom radial profile needs step > 0 and samples");
  RadialSpec r;
  r.kind = Kind::Custom;
  r.table_step = step;
  r.table = std::move(table);
  return r;
}

double RadialSpec::profile(double rho) const {
  switch (kind) {
    case Kind::Ramp:
      return rho == 0.0 ? 0.0 : c_constant(d, k) * std::pow(rho, k);
    case Kind::Bessel:
      return std::pow(1.0 + rho * rho, 0.5 * sign * s);
    case Kind::Gaussian:
      return std::exp(-0.5 * sigma * sigma * rho * rho);
    case Kind::Custom: {
      const double u = rho / table_step;
      const auto last = table.size() - 1;
      if (u >= static_cast<double>(last)) return table[last];
      const auto i = static_cast<std::size_t>(u);
      const double f = u - static_cast<double>(i);
      return (1.0 - f) * table[i] + f * table[i + 1];
    }
  }
  return 0.0;
}

void apply_radial_block(std::span<double> block, const GridSpec& grid, const RadialSpec& spec, double pad_factor) {
  check_pad(pad_factor);
  grid.validate();
  if (block.size() != grid.size()) throw DomainError("apply_radial: block size does not match grid");
  MultiplierPlan(grid, spec, pad_factor).apply(block);
}

GridField apply_radial(const GridField& field, const RadialSpec& spec, double pad_factor) {
  GridField out = field;
  apply_radial_block(out.values, out.grid, spec, pad_factor);
  return out;
}

Sinogram apply_radial(const Sinogram& sino, const RadialSpec& spec, double pad_factor) {
  check_pad(pad_factor);
  sino.validate();
  Sinogram out = sino;
  out.generator.reset();
  const MultiplierPlan plan(sino.t_grid, spec, pad_factor);
  parallel_for(out.frames.size(), [&](std::size_t j) { plan.apply(out.block(j)); });
  return out;
}

Sinogram ramp_filter(const Sinogram& sino, int d, int k, double pad_factor) {
  if (sino.d != d || sino.k != k) throw DomainError("ramp_filter: sinogram dimensions differ from (d, k)");
  return apply_radial(sino, RadialSpec::ramp(d, k), pad_factor);
}

namespace {

double bessel_series(int n, double x) {
  // sum_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!)
  const double half = 0.5 * x;
  double term = std::pow(half, n) / std::tgamma(n + 1.0);
  double sum = term;
  const double q = -half * half;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * (m + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && m > 2) break;
  }
  return sum;
}

double bessel_asymptotic(double nu, double x) {
  // J_nu(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - nu pi/2 - pi/4,
  // a_k = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k); stop at the smallest term.
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 100; ++k) {
    a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    if (std::abs(a) >= prev || a == 0.0) break;
    prev = std::abs(a);
    // k odd -> Q, k even -> P, with alternating signs per pair.
    const int pair = (k - 1) / 2;
    const double sgn = (pair % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) q += sgn * a;
    else p += -sgn * a;
  }
  const double chi = x - 0.5 * nu * kPi - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_j: x must be >= 0");
  if (nu == -0.5) {
    if (x == 0.0) throw DomainError("bessel_j: J_{-1/2} is unbounded at 0");
    return std::sqrt(2.0 / (kPi * x)) * std::cos(x);
  }
  if (nu == 0.5 || nu == 1.5) {
    if (x == 0.0) return 0.0;
    const double j_half = std::sqrt(2.0 / (kPi * x)) * std::sin(x);
    if (nu == 0.5) return j_half;
    if (x < 1e-3) {
      // x^{3/2} sqrt(2/pi) / 3 (1 - x^2/10): the recurrence cancels badly here.
      return std::sqrt(2.0 / kPi) * std::pow(x, 1.5) / 3.0 * (1.0 - x * x / 10.0);
    }
    const double j_mhalf = std::sqrt(2.0 / (kPi * x)) * std::cos(x);
    return j_half / x - j_mhalf;  // J_{3/2} = J_{1/2}/x - J_{-1/2}
  }
  if (nu == 0.0 || nu == 1.0 || nu == 2.0) {
    const int n = static_cast<int>(nu);
    return x <= 12.0 ? bessel_series(n, x) : bessel_asymptotic(nu, x);
  }
  throw DomainError("bessel_j: unsupported order " + std::to_string(nu));
}

double sphere_kernel(int n, double x) {
  if (n < 1 || n > 6) throw DomainError("sphere_kernel: n must be in [1, 6]");
  x = std::abs(x);
  if (n == 1) return 2.0 * std::cos(x);
  if (n == 3) return x < 1e-8 ? 4.0 * kPi : 4.0 * kPi * std::sin(x) / x;
  if (x < 1e-4) return sphere_area(n) * (1.0 - x * x / (2.0 * n));
  const double nu = 0.5 * n - 1.0;
  return std::pow(2.0 * kPi, 0.5 * n) * std::pow(x, -nu) * bessel_j(nu, x);
}

double RadialTable::operator()(double r) const {
  r = std::abs(r);
  const double u = r / step;
  const auto last = values.size() - 1;
  if (u > static_cast<double>(last)) return extend ? extend(r) : 0.0;
  auto i = static_cast<std::size_t>(u);
  if (i >= last) return values[last];
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

std::vector<double> hankel_profile(const RadialTable& rho, int d, std::span<const double> omegas) {
  if (d < 1 || d > 6) throw DomainError("hankel_profile: d must be in [1, 6], got " + std::to_string(d));
  const std::size_t count = rho.values.size();
  // Trapezoid over r_i = i * step of rho(r) r^{d-1} Omega_d(omega r).
  std::vector<double> weighted(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = rho.step * static_cast<double>(i);
    weighted[i] = rho.values[i] * std::pow(r, d - 1) * rho.step * (i == 0 || i + 1 == count ? 0.5 : 1.0);
  }
  std::vector<double> out(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t j) {
    const double w = omegas[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (weighted[i] == 0.0) continue;
      acc += weighted[i] * sphere_kernel(d, w * rho.step * static_cast<double>(i));
    }
    out[j] = acc;
  });
  return out;
}

std::vector<double> inverse_hankel(std::span<const double> spectrum, double d_omega, int n,
                                   std::span<const double> radii) {
  if (n < 1 || n > 6) throw DomainError("inverse_hankel: n must be in [1, 6]");
  const std::size_t count = spectrum.size();
  const double scale = std::pow(2.0 * kPi, -n);
  std::vector<double> weighted(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = d_omega * static_cast<double>(i);
    weighted[i] = spectrum[i] * std::pow(w, n - 1) * d_omega * (i == 0 || i + 1 == count ? 0.5 : 1.0);
  }
  std::vector<double> out(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (weighted[i] == 0.0) continue;
      acc += weighted[i] * sphere_kernel(n, d_omega * static_cast<double>(i) * radii[j]);
    }
    if (count >= 3) {
      // Euler-Maclaurin endpoint term h^2/12 g'(0); g'(0) is nonzero for n = 2.
      double g[3];
      for (int i = 0; i < 3; ++i) {
        const double w = d_omega * i;
        g[i] = spectrum[i] * std::pow(w, n - 1) * sphere_kernel(n, w * radii[j]);
      }
      acc += d_omega * (-3.0 * g[0] + 4.0 * g[1] - g[2]) / 24.0;
    }
    out[j] = scale * acc;
  }
  return out;
}

double green_rbf_value(double s, int n, double r) {
  if (n < 1) throw DomainError("green_rbf: n must be >= 1");
  if (!(s > n)) throw DomainError("green_rbf: order s must exceed n (s=" + std::to_string(s) + ", n=" +
                                  std::to_string(n) + "), otherwise the atom is unbounded");
  // Subordination: (1+|w|^2)^{-s/2} = Gamma(s/2)^{-1} int_0^inf e^{-u(1+|w|^2)} u^{s/2-1} du,
  // and the inverse transform of e^{-u|w|^2} is (4 pi u)^{-n/2} e^{-r^2/(4u)}.
  // Substituting u = e^v gives a smooth, rapidly decaying integrand in v, for
  // which the trapezoid rule converges geometrically.
  const double r2 = r * r;
  const double lo = -80.0;
  const double hi = 6.0;
  const double dv = 0.05;
  const int steps = static_cast<int>((hi - lo) / dv);
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double v = lo + i * dv;
    const double u = std::exp(v);
    const double logf = -u - r2 / (4.0 * u) + (0.5 * s - 0.5 * n) * v;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    acc += w * std::exp(logf);
  }
  return acc * dv * std::pow(4.0 * kPi, -0.5 * n) / std::tgamma(0.5 * s);
}

std::shared_ptr<const RadialTable> green_rbf(double s, int n, double r_max, double step) {
  if (!(s > n)) green_rbf_value(s, n, 0.0);  // throws the domain error
  if (!(step > 0.0) || !(r_max > 0.0)) throw DomainError("green_rbf: step and r_max must be positive");

  struct Key {
    double s, r_max, step;
    int n;
    bool operator<(const Key& o) const {
      return std::tie(s, n, r_max, step) < std::tie(o.s, o.n, o.r_max, o.step);
    }
  };
  static std::mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const RadialTable>> cache;
  const Key key{s, r_max, step, n};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<RadialTable>();
  table->step = step;
  const auto count = static_cast<std::size_t>(std::ceil(r_max / step)) + 1;
  table->values.resize(count);
  parallel_for(count, [&](std::size_t i) { table->values[i] = green_rbf_value(s, n, step * static_cast<double>(i)); });
  table->extend = [s, n](double r) { return green_rbf_value(s, n, r); };
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto [it, inserted] = cache.emplace(key, std::move(table));
  return it->second;
}

}  // namespace kplane

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "commands.hpp"
#include "kplane/analytic.hpp"
#include "kplane/errors.hpp"
#include "kplane/filters.hpp"
#include "kplane/isotropy.hpp"
#include "kplane/sparse.hpp"
#include "kplane/transform.hpp"

namespace kplane::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> run;
};

QuadSpec quad(double L, int nodes) {
  QuadSpec q;
  q.halfwidth = L;
  q.nodes_per_axis = nodes;
  return q;
}

GridField mixture(const GridSpec& g) {
  const int d = g.dim();
  std::vector<double> c1(d, 0.0), c2(d, 0.0);
  c1[0] = -1.0;
  c2[0] = 1.2;
  c2[1] = 0.8;
  return GridField::sample(g, [&](std::span<const double> x) {
    return 0.6 * gaussian_density(x, c1) + 0.4 * gaussian_density(x, c2);
  });
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<Check> registry(std::uint64_t seed) {
  const GridSpec g2 = GridSpec::centered(2, 64, 0.2);
  const GridSpec t2 = default_t_grid(g2, 2, 1);
  std::vector<Check> checks;

  checks.push_back({"c_constant_2_1", 1e-12, [] { return std::abs(c_constant(2, 1) * 4 * kPi - 1); }});
  checks.push_back({"c_constant_3_2", 1e-12, [] { return std::abs(c_constant(3, 2) * 8 * kPi * kPi - 1); }});

  checks.push_back({"forward_gaussian_oracle_2d", 1e-3, [=] {
    const std::vector<double> x0{0.3, -0.2};
    const GridField f = GridField::sample(g2, [&](std::span<const double> x) { return gaussian_density(x, x0); });
    const FrameSet frames = FrameSet::monte_carlo(2, 1, 8, {seed, 10});
    const Sinogram s = forward(f, frames, t2, quad(6, 121));
    double err = 0.0, peak = 0.0;
    double t[1];
    for (std::size_t j = 0; j < frames.frames.size(); ++j) {
      for (std::size_t i = 0; i < t2.size(); ++i) {
        t2.node(i, t);
        const double exact = gaussian_kplane(frames.frames[j], t, x0);
        err = std::max(err, std::abs(s.block(j)[i] - exact));
        peak = std::max(peak, exact);
      }
    }
    return err / peak;
  }});

  checks.push_back({"fbp_inversion_2d", 0.05, [=] {
    const GridField f = mixture(g2);
    const GridField r = fbp(forward(f, FrameSet::circle(180), t2, QuadSpec::defaults_for(g2)), 2, 1, g2);
    return relative_l2(r.values, f.values);
  }});

  checks.push_back({"calibrate_gain_2d", 0.05, [=] {
    return std::abs(calibrate_gain(2, 1, FrameSet::circle(180), g2, t2, QuadSpec::defaults_for(g2)) - 1);
  }});

  checks.push_back({"slice_theorem_2d", 1e-3, [=] {
    const GridField f = mixture(g2);
    Rng rng({seed, 11});
    std::vector<SlicePair> pairs;
    for (int i = 0; i < 5; ++i) {
      const Frame a = haar_frame_sample(2, 1, rng);
      const double w[1] = {(2 * rng.uniform() - 1) * 4};
      pairs.push_back(slice_pair(f, a, w, t2, quad(6, 128)));
    }
    double err = 0.0, scale = 0.0;
    for (const auto& p : pairs) {
      err = std::max(err, std::abs(p.lhs - p.rhs));
      scale = std::max(scale, std::abs(p.rhs));
    }
    return err / scale;
  }});

  checks.push_back({"moment_mass_2d", 1e-3, [=] {
    const Sinogram s = forward(mixture(g2), FrameSet::circle(12), t2, quad(6, 121));
    const auto m0 = moment_integral(s, 1, 0);
    const auto [lo, hi] = std::minmax_element(m0.begin(), m0.end());
    return (*hi - *lo) / std::abs(*hi);
  }});

  checks.push_back({"moment_centroid_2d", 1e-3, [=] {
    const GridField f = mixture(g2);
    const FrameSet frames = FrameSet::circle(12);
    const Sinogram s = forward(f, frames, t2, quad(6, 121));
    double cx = 0.0, cy = 0.0;
    double x[2];
    for (std::size_t i = 0; i < g2.size(); ++i) {
      g2.node(i, x);
      cx += f.values[i] * x[0] * g2.spacing * g2.spacing;
      cy += f.values[i] * x[1] * g2.spacing * g2.spacing;
    }
    const auto m1 = moment_integral(s, 1, 1);
    double err = 0.0;
    for (std::size_t j = 0; j < m1.size(); ++j) {
      const auto& a = frames.frames[j].rows();
      err = std::max(err, std::abs(m1[j] - (a(0, 0) * cx + a(0, 1) * cy)));
    }
    return err;
  }});

  checks.push_back({"isotropy_3d_1", 2e-3, [=] {
    const GridField f = mixture(GridSpec::centered(3, 40, 0.25));
    Rng rng({seed, 12});
    double err = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Frame a = haar_frame_sample(3, 1, rng);
      const std::vector<double> t{0.5 * rng.normal(), 0.5 * rng.normal()};
      const FramePoint r = rotate_pair(a, t, haar_orthogonal_sample(2, rng));
      err = std::max(err, std::abs(forward_point(f, a, t, quad(6, 97)) - forward_point(f, r.frame, r.t, quad(6, 97))));
    }
    return err;
  }});

  checks.push_back({"intertwining_gaussian_2d", 1e-2, [=] {
    const GridField f = mixture(g2);
    const FrameSet frames = FrameSet::circle(24);
    const RadialSpec smooth = RadialSpec::gaussian(0.5);
    const Sinogram lhs = forward(apply_radial(f, smooth), frames, t2, quad(6, 121));
    const Sinogram rhs = apply_radial(forward(f, frames, t2, quad(6, 121)), smooth);
    return relative_l2(lhs.values, rhs.values);
  }});

  checks.push_back({"adjoint_pairing_2d", 1e-2, [=] {
    const GridField f = mixture(g2);
    const FrameSet frames = FrameSet::circle(90);
    const Sinogram rf = forward(f, frames, t2, QuadSpec::defaults_for(g2));
    Sinogram h(2, 1, frames.frames, t2);
    double t[1];
    for (std::size_t j = 0; j < frames.frames.size(); ++j) {
      const auto& a = frames.frames[j].rows();
      for (std::size_t i = 0; i < t2.size(); ++i) {
        t2.node(i, t);
        const double s = t[0] - 0.5 * a(0, 0);
        h.block(j)[i] = std::exp(-0.5 * s * s / 1.5) * (1.0 + 0.4 * a(0, 1));
      }
    }
    const double rhs = field_inner(f, backproject(h, g2));
    return std::abs(sinogram_inner(rf, h) - rhs) / std::abs(rhs);
  }});

  checks.push_back({"project_iso_idempotent_2d", 1e-12, [=] {
    const Sinogram s = forward(mixture(g2), FrameSet::circle(24), t2, quad(6, 121));
    Sinogram bare(2, 1, s.frames, s.t_grid);
    bare.values = s.values;
    Sinogram p = project_iso(bare);
    p.generator.reset();
    const Sinogram pp = project_iso(p);
    double err = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) err = std::max(err, std::abs(pp.values[i] - p.values[i]));
    return err / max_abs(p.values);
  }});

  checks.push_back({"pk_project_range_2d", 0.05, [=] {
    const QuadSpec q = QuadSpec::defaults_for(g2);
    const Sinogram s = forward(mixture(g2), FrameSet::circle(180), t2, q);
    const Sinogram ps = pk_project(s, g2, q);
    return relative_l2(ps.values, s.values);
  }});

  checks.push_back({"hankel_gaussian_3d", 1e-6, [] {
    RadialTable rho;
    rho.step = 2e-3;
    for (int i = 0; i <= 7000; ++i) {
      const double r = i * rho.step;
      rho.values.push_back(std::pow(2 * kPi, -1.5) * std::exp(-0.5 * r * r));
    }
    std::vector<double> omegas;
    for (int i = 0; i <= 40; ++i) omegas.push_back(0.1 * i);
    const auto spec = hankel_profile(rho, 3, omegas);
    double err = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      err = std::max(err, std::abs(spec[i] - std::exp(-0.5 * omegas[i] * omegas[i])));
    }
    return err;
  }});

  checks.push_back({"green_rbf_1_2", 1e-4, [] {
    const auto g = green_rbf(2.0, 1, 8.0);
    double err = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double r = 0.1 * i;
      err = std::max(err, std::abs((*g)(r) - 0.5 * std::exp(-r)));
    }
    return err;
  }});

  checks.push_back({"lasso_soft_threshold", 1e-8, [] {
    LassoProblem p;
    p.gram = Eigen::MatrixXd::Identity(5, 5);
    p.y.resize(5);
    p.y << 1.0, -0.3, 0.05, -2.0, 0.4;
    p.lambda = 0.5;
    p.tol = 1e-12;
    const LassoResult r = solve_lasso(p);
    double err = 0.0;
    for (int i = 0; i < 5; ++i) {
      err = std::max(err, std::abs(r.a(i) - std::copysign(std::max(std::abs(p.y(i)) - 0.25, 0.0), p.y(i))));
    }
    return err;
  }});

  return checks;
}

}  // namespace

int cmd_verify(const Context& ctx) {
  const auto checks = registry(ctx.config.seed);
  nlohmann::json verdict = nlohmann::json::object();
  bool all = true;
  for (const auto& c : checks) {
    const double tol = ctx.config.tolerance_override.value_or(c.tolerance);
    const double value = c.run();
    const bool pass = std::isfinite(value) && value <= tol;
    all = all && pass;
    verdict[c.name] = {{"pass", pass}, {"value", value}, {"tolerance", tol}};
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << " value=" << std::setprecision(4) << value
              << " tol=" << tol << '\n';
  }
  std::ofstream out(ctx.out / ctx.config.paths.verdict);
  if (!out) throw IoError("cannot write verdict");
  out << verdict.dump(2) << '\n';
  return all ? kOk : kCheckFailed;
}

}  // namespace kplane::cli

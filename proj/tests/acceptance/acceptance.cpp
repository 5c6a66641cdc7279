// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kplane/analytic.hpp"
#include "kplane/filters.hpp"
#include "kplane/isotropy.hpp"
#include "kplane/parallel.hpp"
#include "kplane/sparse.hpp"
#include "kplane/transform.hpp"

using namespace kplane;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

QuadSpec quad(double L, int nodes, Interp interp = Interp::Cubic) {
  QuadSpec q;
  q.halfwidth = L;
  q.nodes_per_axis = nodes;
  q.interp = interp;
  return q;
}

std::vector<double> vec(int d, std::initializer_list<double> head) {
  std::vector<double> v(head);
  v.resize(static_cast<std::size_t>(d), 0.0);
  return v;
}

GridField mixture(const GridSpec& g) {
  const int d = g.dim();
  const auto c1 = vec(d, {-1.0});
  const auto c2 = vec(d, {1.2, 0.8});
  return GridField::sample(g, [&](std::span<const double> x) {
    return 0.6 * gaussian_density(x, c1) + 0.4 * gaussian_density(x, c2);
  });
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Sinogram minus(const Sinogram& a, const Sinogram& b) {
  Sinogram out(a.d, a.k, a.frames, a.t_grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

Sinogram strip(const Sinogram& s) {
  Sinogram out(s.d, s.k, s.frames, s.t_grid);
  out.values = s.values;
  return out;
}

Sinogram render(int d, int k, const std::vector<Frame>& frames, const GridSpec& tg,
                std::shared_ptr<const SinogramGenerator> gen) {
  Sinogram s(d, k, frames, tg);
  std::vector<double> t(static_cast<std::size_t>(d - k));
  for (std::size_t j = 0; j < frames.size(); ++j) {
    for (std::size_t i = 0; i < tg.size(); ++i) {
      tg.node(i, t);
      s.block(j)[i] = (*gen)(frames[j], t);
    }
  }
  s.generator = std::move(gen);
  return s;
}

// Smooth, deliberately anisotropic sinogram.
std::shared_ptr<const SinogramGenerator> lopsided() {
  return std::make_shared<const SinogramGenerator>([](const Frame& a, std::span<const double> t) {
    double sq = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) {
      const double s = t[r] - 0.8 * a.rows()(static_cast<Eigen::Index>(r), 0) - 0.3;
      sq += s * s;
    }
    return std::exp(-0.5 * sq) * (1.0 + 0.5 * a.rows()(0, 1));
  });
}

struct Setting {
  int d, k;
};
constexpr Setting kSettings[] = {{2, 1}, {3, 1}, {3, 2}};

std::string tag(Setting s) { return "(" + std::to_string(s.d) + "," + std::to_string(s.k) + ")"; }

// 1. Constants.
Outcome constants() {
  Outcome o;
  const double e21 = std::abs(c_constant(2, 1) - 1 / (4 * kPi));
  const double e32 = std::abs(c_constant(3, 2) - 1 / (8 * kPi * kPi));
  o.require(e21 <= 1e-12, "c(2,1) err " + fmt(e21));
  o.require(e32 <= 1e-12, "c(3,2) err " + fmt(e32));
  return o;
}

// 2. Forward of the unit Gaussian against its closed form.
Outcome forward_oracle() {
  Outcome o;
  for (Setting s : kSettings) {
    const GridSpec g = GridSpec::centered(s.d, 64, 0.2);
    const auto x0 = vec(s.d, {0.3, -0.2, 0.1});
    const GridField f = GridField::sample(g, [&](std::span<const double> x) { return gaussian_density(x, x0); });
    const FrameSet frames = FrameSet::monte_carlo(s.d, s.k, 3, {21, static_cast<std::uint64_t>(s.d * 10 + s.k)});
    const GridSpec tg = default_t_grid(g, s.d, s.k);
    const Sinogram r = forward(f, frames, tg, quad(6, 121));
    double err = 0.0, peak = 0.0;
    std::vector<double> t(static_cast<std::size_t>(s.d - s.k));
    for (std::size_t j = 0; j < frames.frames.size(); ++j) {
      for (std::size_t i = 0; i < tg.size(); ++i) {
        tg.node(i, t);
        const double exact = gaussian_kplane(frames.frames[j], t, x0);
        err = std::max(err, std::abs(r.block(j)[i] - exact));
        peak = std::max(peak, exact);
      }
    }
    o.require(err / peak <= 1e-3, tag(s) + " max err/peak " + fmt(err / peak));
  }
  return o;
}

// 3. fbp(forward(mixture)) and calibrate_gain.
Outcome inversion() {
  Outcome o;
  struct Case {
    Setting s;
    GridSpec grid;
    FrameSet frames;
    QuadSpec quad;
    double tol;
  };
  const GridSpec g2 = GridSpec::centered(2, 64, 0.2);
  const GridSpec g3 = GridSpec::centered(3, 32, 0.3);
  const double L3 = g3.max_corner_norm();
  const Case cases[] = {
      {{2, 1}, g2, FrameSet::circle(180), QuadSpec::defaults_for(g2), 0.05},
      {{3, 1}, g3, FrameSet::monte_carlo(3, 1, 2000, {31, 0}), quad(L3, 64, Interp::Linear), 0.10},
      {{3, 2}, g3, FrameSet::monte_carlo(3, 2, 4000, {32, 0}), quad(L3, 48, Interp::Linear), 0.10},
  };
  for (const Case& c : cases) {
    const GridField f = mixture(c.grid);
    const GridSpec tg = default_t_grid(c.grid, c.s.d, c.s.k);
    const GridField r = fbp(forward(f, c.frames, tg, c.quad), c.s.d, c.s.k, c.grid);
    const double err = relative_l2(r.values, f.values);
    const double gain = calibrate_gain(c.s.d, c.s.k, c.frames, c.grid, tg, c.quad);
    o.require(err <= c.tol, tag(c.s) + " rel L2 " + fmt(err));
    o.require(std::abs(gain - 1) <= 0.05, tag(c.s) + " gain " + fmt(gain));
  }
  return o;
}

// 4. Fourier slice identity.
Outcome slice_theorem() {
  Outcome o;
  for (Setting s : kSettings) {
    const GridSpec g = s.d == 2 ? GridSpec::centered(2, 64, 0.2) : GridSpec::centered(3, 40, 0.25);
    const GridField f = mixture(g);
    const GridSpec tg = default_t_grid(g, s.d, s.k);
    const QuadSpec q = s.k == 1 ? quad(6, 128) : quad(6, 81);
    const int m = s.d - s.k;
    Rng rng({41, static_cast<std::uint64_t>(s.d * 10 + s.k)});
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Frame a = haar_frame_sample(s.d, s.k, rng);
      // Uniform in the ball of radius 4.
      std::vector<double> w(static_cast<std::size_t>(m));
      double norm = 0.0;
      for (double& v : w) {
        v = rng.normal();
        norm += v * v;
      }
      const double radius = 4.0 * std::pow(rng.uniform(), 1.0 / m) / std::sqrt(norm);
      for (double& v : w) v *= radius;
      const SlicePair p = slice_pair(f, a, w, tg, q);
      err = std::max(err, std::abs(p.lhs - p.rhs));
      scale = std::max(scale, std::abs(p.rhs));
    }
    o.require(err / scale <= 1e-3, tag(s) + " max |lhs-rhs|/max|rhs| " + fmt(err / scale));
  }
  return o;
}

// 5. Moment conditions and isotropic symmetry, d=3, k=1.
Outcome range_conditions() {
  Outcome o;
  const GridSpec g = GridSpec::centered(3, 40, 0.25);
  const GridField f = mixture(g);
  const FrameSet frames = FrameSet::monte_carlo(3, 1, 8, {51, 0});
  const Sinogram s = forward(f, frames, default_t_grid(g, 3, 1), quad(6, 97));
  const auto m0 = moment_integral(s, 1, 0);
  const auto [lo, hi] = std::minmax_element(m0.begin(), m0.end());
  const double spread = (*hi - *lo) / std::abs(*hi);
  o.require(spread <= 1e-3, "m=0 spread " + fmt(spread));

  std::vector<double> centroid(3, 0.0);
  std::vector<double> x(3);
  const double cell = std::pow(g.spacing, 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, x);
    for (int c = 0; c < 3; ++c) centroid[c] += f.values[i] * x[c] * cell;
  }
  double m1_err = 0.0;
  for (int axis = 1; axis <= 2; ++axis) {
    const auto m1 = moment_integral(s, axis, 1);
    for (std::size_t j = 0; j < m1.size(); ++j) {
      double expected = 0.0;
      for (int c = 0; c < 3; ++c) expected += frames.frames[j].rows()(axis - 1, c) * centroid[c];
      m1_err = std::max(m1_err, std::abs(m1[j] - expected));
    }
  }
  o.require(m1_err <= 1e-3, "m=1 err " + fmt(m1_err));

  Rng rng({52, 0});
  double iso = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Frame a = haar_frame_sample(3, 1, rng);
    const std::vector<double> t{0.5 * rng.normal(), 0.5 * rng.normal()};
    const FramePoint r = rotate_pair(a, t, haar_orthogonal_sample(2, rng));
    iso = std::max(iso, std::abs(forward_point(f, a, t, quad(6, 97)) - forward_point(f, r.frame, r.t, quad(6, 97))));
  }
  o.require(iso <= 2e-3, "isotropy " + fmt(iso));
  return o;
}

// 6. Gaussian smoothing commutes with the transform.
Outcome intertwining() {
  Outcome o;
  for (Setting s : kSettings) {
    const GridSpec g = s.d == 2 ? GridSpec::centered(2, 64, 0.2) : GridSpec::centered(3, 40, 0.25);
    const GridField f = mixture(g);
    const FrameSet frames = FrameSet::monte_carlo(s.d, s.k, 6, {61, static_cast<std::uint64_t>(s.d * 10 + s.k)});
    const GridSpec tg = default_t_grid(g, s.d, s.k);
    const QuadSpec q = s.k == 1 ? quad(6, 121) : quad(6, 81);
    const RadialSpec smooth = RadialSpec::gaussian(0.5);
    const Sinogram lhs = forward(apply_radial(f, smooth), frames, tg, q);
    const Sinogram rhs = apply_radial(forward(f, frames, tg, q), smooth);
    const double err = relative_l2(lhs.values, rhs.values);
    o.require(err <= 1e-2, tag(s) + " rel L2 " + fmt(err));
  }
  return o;
}

// 7. Projector suite.
Outcome projectors() {
  Outcome o;
  // d-k = 1: exact.
  {
    const GridSpec g = GridSpec::centered(2, 64, 0.2);
    const Sinogram s = forward(mixture(g), FrameSet::circle(24), default_t_grid(g, 2, 1), quad(6, 121));
    Sinogram h = s;
    const Sinogram an = render(2, 1, s.frames, s.t_grid, lopsided());
    for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] += an.values[i];
    const Sinogram p = strip(project_iso(strip(h)));
    const Sinogram pp = project_iso(p);
    const double idem = max_abs(minus(pp, p).values) / max_abs(p.values);
    o.require(idem <= 1e-12, "m=1 idempotence " + fmt(idem));
    const double ratio = sinogram_norm(p) / sinogram_norm(h);
    o.require(ratio <= 1 + 1e-6, "m=1 |Pg|/|g| " + fmt(ratio));
  }
  // d-k = 2 on frames closed under the rotation set.
  {
    const GridSpec tg = GridSpec::centered(2, 25, 0.5);
    const auto rotations = iso_rotations(2, 16, {});
    std::vector<Frame> frames;
    for (const Frame& a : FrameSet::monte_carlo(3, 1, 6, {71, 0}).frames)
      for (const Rotation& u : rotations) frames.push_back(Frame(3, 1, u.mat() * a.rows()));
    const Sinogram f = render(3, 1, frames, tg, lopsided());
    const Sinogram p = project_iso(f, 16);
    const Sinogram pp = project_iso(p, 16);
    const double idem = sinogram_norm(minus(pp, p)) / sinogram_norm(p);
    o.require(idem <= 2e-2, "m=2 idempotence " + fmt(idem));
    const double ratio = sinogram_norm(p) / sinogram_norm(f);
    o.require(ratio <= 1 + 1e-6, "m=2 |Pg|/|g| " + fmt(ratio));
    const Sinogram h = render(3, 1, frames, tg, std::make_shared<const SinogramGenerator>(
                                                    [](const Frame& a, std::span<const double> t) {
                                                      const double s0 = t[0] + 0.4 * a.rows()(1, 2);
                                                      const double s1 = t[1] - 0.2;
                                                      return std::exp(-0.5 * (s0 * s0 + s1 * s1) / 1.3) *
                                                             (1.0 - 0.3 * a.rows()(0, 0));
                                                    }));
    const double adj = std::abs(sinogram_inner(p, h) - sinogram_inner(f, project_iso(h, 16))) /
                       (sinogram_norm(f) * sinogram_norm(h));
    o.require(adj <= 2e-2, "m=2 self-adjointness " + fmt(adj));
  }
  // P_k = R R^* K.
  {
    const GridSpec g = GridSpec::centered(2, 64, 0.2);
    const FrameSet frames = FrameSet::circle(180);
    const GridSpec tg = default_t_grid(g, 2, 1);
    const QuadSpec q = QuadSpec::defaults_for(g);
    const Sinogram s = forward(mixture(g), frames, tg, q);
    const double fixed = sinogram_norm(minus(pk_project(s, g, q), s)) / sinogram_norm(s);
    o.require(fixed <= 0.05, "P_k range residual " + fmt(fixed));
    const Sinogram smooth = render(2, 1, frames.frames, tg, lopsided());
    const Sinogram anti = minus(smooth, project_iso(smooth));
    const double killed = sinogram_norm(pk_project(anti, g, q)) / sinogram_norm(anti);
    o.require(killed <= 0.10, "P_k anti-isotropic residual " + fmt(killed));
  }
  return o;
}

// 8. Backprojected isotropic atom is a Gaussian ridge.
Outcome ridge_identity() {
  Outcome o;
  const GridSpec g = GridSpec::centered(3, 31, 0.2);
  const double th = 0.2;
  const int half = static_cast<int>(std::ceil(g.max_corner_norm() / th)) + 30;
  GridSpec tg;
  tg.spacing = th;
  tg.shape = {2 * half + 1, 2 * half + 1};
  tg.origin = {-half * th, -half * th};
  const MollifiedAtom atom{haar_frame_sample(3, 1, RngSeed{81, 0}), {0.4, -0.3}, 0.1, 2.0};
  const Sinogram s = render_delta_iso(atom, FrameSet::monte_carlo(3, 1, 2000, {82, 0}).frames, tg, 64, {83, 0});
  const GridField bp = backproject(s, g);
  const double w2 = atom.t_width * atom.t_width;
  const GridField ridge = GridField::sample(g, [&](std::span<const double> x) {
    double sq = 0.0;
    for (int r = 0; r < 2; ++r) {
      double v = -atom.offset[r];
      for (int c = 0; c < 3; ++c) v += atom.frame.rows()(r, c) * x[c];
      sq += v * v;
    }
    return std::exp(-0.5 * sq / w2) / (2 * kPi * w2);
  });
  const double err = relative_l2(bp.values, ridge.values);
  o.require(err <= 0.10, "rel L2 " + fmt(err));
  return o;
}

// 9. Hankel and Bessel-potential oracles.
Outcome hankel_rbf() {
  Outcome o;
  RadialTable rho;
  rho.step = 1e-3;
  for (int i = 0; i <= 14000; ++i) {
    const double r = i * rho.step;
    rho.values.push_back(std::pow(2 * kPi, -1.5) * std::exp(-0.5 * r * r));
  }
  std::vector<double> omegas;
  for (int i = 0; i <= 60; ++i) omegas.push_back(0.1 * i);
  const auto spec = hankel_profile(rho, 3, omegas);
  double err = 0.0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    err = std::max(err, std::abs(spec[i] - std::exp(-0.5 * omegas[i] * omegas[i])));
  }
  o.require(err <= 1e-6, "3-D Gaussian Hankel err " + fmt(err));
  const auto g = green_rbf(2.0, 1);
  double gerr = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = 0.01 * i;
    gerr = std::max(gerr, std::abs((*g)(r) - 0.5 * std::exp(-r)));
  }
  o.require(gerr <= 1e-4, "green_rbf(s=2, n=1) err " + fmt(gerr));
  return o;
}

// 10. Planted two-atom recovery.
Outcome planted_recovery() {
  Outcome o;
  const GridSpec g = GridSpec::centered(2, 64, 0.2);
  std::vector<Frame> frames;
  for (int j = 0; j < 8; ++j) frames.push_back(circle_frame(kPi * j / 8));
  std::vector<std::vector<double>> offsets;
  for (int i = 0; i < 16; ++i) offsets.push_back({-3 + 6.0 * i / 15});
  const Dictionary dict = build_dictionary(frames, offsets, 2.0, 2, 1);
  Rng rng({42, 0});
  MeasurementSet meas;
  for (int m = 0; m < 50; ++m) {
    const double cx = -3 + 6 * rng.uniform();
    const double cy = -3 + 6 * rng.uniform();
    meas.functionals.push_back(GridField::sample(g, [=](std::span<const double> x) {
      return std::exp(-0.5 * ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / 0.49);
    }));
  }
  LassoProblem p;
  p.gram = assemble(dict, meas, g);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dict.size()));
  const std::size_t planted[] = {1 * 16 + 5, 5 * 16 + 11};
  truth(planted[0]) = 1.0;
  truth(planted[1]) = -0.8;
  p.y = p.gram * truth;
  p.lambda = 1e-3 * (p.gram.transpose() * p.y).lpNorm<Eigen::Infinity>();
  p.tol = 1e-5;
  p.max_iter = 200000;
  const LassoResult r = solve_lasso(p);
  const std::span<const double> a(r.a.data(), static_cast<std::size_t>(r.a.size()));
  const auto sup = support(a);
  for (std::size_t idx : planted) {
    const bool found = std::any_of(sup.begin(), sup.end(), [&](std::size_t s) {
      return dict.frame_index(s) == dict.frame_index(idx) &&
             std::abs(static_cast<long>(dict.offset_index(s)) - static_cast<long>(dict.offset_index(idx))) <= 1;
    });
    o.require(found, "atom " + std::to_string(idx) + (found ? " recovered" : " missing"));
  }
  o.require(sup.size() <= 50, "support " + std::to_string(sup.size()));
  const KktReport kkt = kkt_report(p, r.a);
  o.require(r.converged && kkt.violation() <= p.lambda * p.tol,
            "KKT violation/lambda " + fmt(kkt.violation() / p.lambda));
  o.require(reg_cost(a) == r.a.lpNorm<1>(), "reg_cost == |a|_1");
  return o;
}

// 11. CLI reruns are byte-identical.
std::string bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  Outcome o;
#ifndef KPLANE_CLI_PATH
  o.require(false, "CLI not built");
#else
  using nlohmann::json;
  auto atom = [](double theta, double offset, double weight) {
    return json{{"weight", weight},
                {"frame", {{std::cos(theta), std::sin(theta)}}},
                {"offset", {offset}},
                {"profile", "rbf"},
                {"s", 2.0}};
  };
  const json planar = {{"d", 2},
                       {"k", 1},
                       {"grid", {{"spacing", 0.2}, {"shape", {64, 64}}}},
                       {"frames", {{"mode", "circle"}, {"count", 180}}},
                       {"phantom", {{"kind", "ridge-sum"}, {"atoms", {atom(kPi / 8, -1.0, 1.0), atom(0.3, 1.2, -0.5)}}}},
                       {"sparse", {{"frame_count", 8}, {"offset_count", 16}, {"measurements", 50}}}};
  const json spatial = {{"d", 3},
                        {"k", 1},
                        {"grid", {{"spacing", 0.4}, {"shape", {20, 20, 20}}}},
                        {"frames", {{"mode", "monte-carlo"}, {"count", 200}, {"seed", 5}}},
                        {"quad", {{"L", 6.0}, {"nodes", 48}}},
                        {"phantom", {{"kind", "mixture"},
                                     {"components", {{{"weight", 0.6}, {"mean", {-1.0, 0, 0}}},
                                                     {{"weight", 0.4}, {"mean", {1.2, 0.8, 0}}}}}}}};
  struct Pipeline {
    std::string name;
    json config;
    std::vector<std::string> commands;
    std::vector<std::string> outputs;
  };
  const Pipeline pipelines[] = {
      {"planar", planar, {"phantom", "forward", "fbp", "reconstruct"},
       {"phantom.kpt", "sinogram.kpt", "reconstruction.kpt", "sparse_reconstruction.kpt", "solution.json"}},
      {"spatial", spatial, {"phantom", "forward", "fbp"}, {"phantom.kpt", "sinogram.kpt", "reconstruction.kpt"}},
  };
  for (const Pipeline& p : pipelines) {
    std::vector<std::string> first;
    bool ran = true;
    for (int pass = 0; pass < 2 && ran; ++pass) {
      const fs::path dir = fs::temp_directory_path() / ("kplane_accept_" + p.name + std::to_string(pass));
      fs::remove_all(dir);
      fs::create_directories(dir);
      std::ofstream(dir / "config.json") << p.config.dump(2);
      for (const auto& cmd : p.commands) {
        const std::string line = "\"" KPLANE_CLI_PATH "\" " + cmd + " --config \"" + (dir / "config.json").string() +
                                 "\" --out \"" + dir.string() + "\" --threads " + (pass ? "2" : "1") +
                                 " >/dev/null 2>&1";
        const int status = std::system(line.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
          o.require(false, p.name + " " + cmd + " failed");
          ran = false;
          break;
        }
      }
      if (!ran) break;
      for (std::size_t i = 0; i < p.outputs.size(); ++i) {
        const std::string b = bytes(dir / p.outputs[i]);
        if (pass == 0) {
          first.push_back(b);
        } else {
          o.require(!b.empty() && b == first[i], p.name + "/" + p.outputs[i] + (b == first[i] ? " identical" : " differs"));
        }
      }
    }
  }
#endif
  return o;
}

}  // namespace

int main() {
  set_thread_count(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"constants c_{d,k}", constants},
      {"analytic forward oracle", forward_oracle},
      {"inversion identity", inversion},
      {"Fourier slice identity", slice_theorem},
      {"range conditions", range_conditions},
      {"intertwining with Gaussian smoothing", intertwining},
      {"projector suite", projectors},
      {"ridge/atom identity", ridge_identity},
      {"Hankel and Bessel-potential oracles", hankel_rbf},
      {"planted sparse recovery", planted_recovery},
      {"CLI reproducibility", reproducibility},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << index++ << " " << name << ": " << o.detail.str()
              << "[" << fmt(secs) << " s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

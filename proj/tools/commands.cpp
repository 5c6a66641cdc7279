#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "kplane/analytic.hpp"
#include "kplane/errors.hpp"
#include "kplane/sparse.hpp"
#include "kplane/transform.hpp"

namespace kplane::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path resolve(const Context& ctx, const std::string& name) { return ctx.out / name; }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

json report(const std::string& command) {
  return json{{"command", command},
              {"timings_ms", json::object()},
              {"rel_l2_vs_reference", nullptr},
              {"gain", nullptr},
              {"warnings", json::array()}};
}

void add_warnings(json& r, const Diagnostics& diag) {
  for (const auto& w : diag.warnings) r["warnings"].push_back(w);
}

void write_report(const Context& ctx, const std::string& command, const json& r) {
  write_json(resolve(ctx, command + "_" + ctx.config.paths.report), r);
}

// Two-dimensional CSV slice: axes 0 and 1, remaining axes at their middle node.
void write_slice_csv(const fs::path& path, const GridField& f) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto strides = f.grid.strides();
  std::size_t base = 0;
  for (int a = 2; a < f.dim(); ++a) base += static_cast<std::size_t>(f.grid.shape[a] / 2) * strides[a];
  out << std::setprecision(12);
  for (int i = 0; i < f.grid.shape[0]; ++i) {
    for (int j = 0; j < f.grid.shape[1]; ++j) {
      if (j) out << ',';
      out << f.values[base + i * strides[0] + j * strides[1]];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

template <class T>
T read_as(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing input file " + path.string());
  KptObject obj = read_kpt(path);
  if (!std::holds_alternative<T>(obj)) throw IoError(path.string() + " holds the wrong object kind");
  return std::get<T>(std::move(obj));
}

bool analytic_phantom(const RunConfig& cfg) { return cfg.phantom.kind != PhantomSpec::Kind::RidgeSum; }

std::vector<Frame> sparse_frames(const RunConfig& cfg) {
  const int n = cfg.sparse.frame_count;
  if (cfg.d == 2 && cfg.k == 1) {
    std::vector<Frame> out;
    for (int j = 0; j < n; ++j) out.push_back(circle_frame(std::numbers::pi * j / n));
    return out;
  }
  return FrameSet::monte_carlo(cfg.d, cfg.k, n, {cfg.seed, 1}).frames;
}

std::vector<std::vector<double>> sparse_offsets(const RunConfig& cfg) {
  const SparseSpec& sp = cfg.sparse;
  const int m = cfg.d - cfg.k;
  std::vector<double> axis(sp.offset_count);
  for (int i = 0; i < sp.offset_count; ++i) {
    axis[i] = sp.offset_min + (sp.offset_max - sp.offset_min) * i / (sp.offset_count - 1);
  }
  std::vector<std::vector<double>> out{{}};
  for (int r = 0; r < m; ++r) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

MeasurementSet gaussian_measurements(const RunConfig& cfg) {
  const SparseSpec& sp = cfg.sparse;
  Rng rng({sp.seed, 0});
  MeasurementSet meas;
  for (int i = 0; i < sp.measurements; ++i) {
    std::vector<double> c(cfg.d);
    for (double& v : c) v = -sp.box + 2 * sp.box * rng.uniform();
    meas.functionals.push_back(GridField::sample(cfg.grid, [&](std::span<const double> x) {
      double sq = 0.0;
      for (int a = 0; a < cfg.d; ++a) sq += (x[a] - c[a]) * (x[a] - c[a]);
      return std::exp(-0.5 * sq / (sp.sigma * sp.sigma));
    }));
  }
  return meas;
}

}  // namespace

int cmd_phantom(const Context& ctx) {
  const GridField f = render_phantom(ctx.config);
  write_kpt(resolve(ctx, ctx.config.paths.phantom), f);
  return kOk;
}

int cmd_forward(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const GridField f = read_as<GridField>(resolve(ctx, cfg.paths.phantom));
  if (f.grid != cfg.grid) throw ConfigError("phantom grid does not match the config grid");
  json r = report("forward");
  Diagnostics diag;
  Stopwatch clock;
  const FrameSet frames = cfg.frames();
  const Sinogram s = forward(f, frames, cfg.resolved_t_grid(), cfg.resolved_quad(), &diag);
  r["timings_ms"]["forward"] = clock.ms();
  write_kpt(resolve(ctx, cfg.paths.sinogram), s);

  if (analytic_phantom(cfg)) {
    Sinogram ref(s.d, s.k, s.frames, s.t_grid);
    std::vector<double> t(static_cast<std::size_t>(s.d - s.k));
    for (std::size_t j = 0; j < s.frames.size(); ++j) {
      for (std::size_t i = 0; i < s.block_size(); ++i) {
        s.t_grid.node(i, t);
        double v = 0.0;
        for (const auto& c : cfg.phantom.components) v += c.weight * gaussian_kplane(s.frames[j], t, c.mean);
        ref.block(j)[i] = v;
      }
    }
    if (sinogram_norm(ref) > 0) r["rel_l2_vs_reference"] = relative_l2(s.values, ref.values);
  }
  add_warnings(r, diag);
  write_report(ctx, "forward", r);
  return kOk;
}

int cmd_fbp(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const Sinogram s = read_as<Sinogram>(resolve(ctx, cfg.paths.sinogram));
  if (s.d != cfg.d || s.k != cfg.k) throw ConfigError("sinogram dimensions do not match the config");
  json r = report("fbp");
  Diagnostics diag;
  Stopwatch clock;
  const GridField rec = fbp(s, cfg.d, cfg.k, cfg.grid, cfg.pad_factor, &diag);
  r["timings_ms"]["fbp"] = clock.ms();
  write_kpt(resolve(ctx, cfg.paths.reconstruction), rec);
  write_slice_csv(resolve(ctx, fs::path(cfg.paths.reconstruction).stem().string() + "_slice.csv"), rec);

  const GridField ref = render_phantom(cfg);
  double ref_norm = 0.0;
  for (double v : ref.values) ref_norm += v * v;
  if (ref_norm > 0) {
    r["rel_l2_vs_reference"] = relative_l2(rec.values, ref.values);
    r["gain"] = least_squares_gain(rec, ref);
  }
  add_warnings(r, diag);
  write_report(ctx, "fbp", r);
  return kOk;
}

int cmd_reconstruct(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const SparseSpec& sp = cfg.sparse;
  json r = report("reconstruct");
  Stopwatch total;

  const fs::path phantom_path = resolve(ctx, cfg.paths.phantom);
  const GridField truth = fs::exists(phantom_path) ? read_as<GridField>(phantom_path) : render_phantom(cfg);
  if (truth.grid != cfg.grid) throw ConfigError("phantom grid does not match the config grid");

  Stopwatch clock;
  const Dictionary dict = build_dictionary(sparse_frames(cfg), sparse_offsets(cfg), sp.s, cfg.d, cfg.k);
  const MeasurementSet meas = gaussian_measurements(cfg);
  LassoProblem p;
  p.gram = assemble(dict, meas, cfg.grid);
  p.y.resize(static_cast<Eigen::Index>(meas.functionals.size()));
  for (std::size_t m = 0; m < meas.functionals.size(); ++m) {
    p.y(static_cast<Eigen::Index>(m)) = field_inner(meas.functionals[m], truth);
  }
  r["timings_ms"]["assemble"] = clock.ms();
  const double scale = (p.gram.transpose() * p.y).lpNorm<Eigen::Infinity>();
  if (!(scale > 0)) throw DomainError("measurements of the phantom vanish; lambda would be zero");
  p.lambda = sp.lambda_ratio * scale;
  p.tol = sp.tol;
  p.max_iter = sp.max_iter;

  Stopwatch solve_clock;
  const LassoResult res = solve_lasso(p);
  r["timings_ms"]["solve"] = solve_clock.ms();
  if (!res.converged) r["warnings"].push_back("lasso stopped at max_iter before the KKT tolerance");

  const std::span<const double> coeffs(res.a.data(), static_cast<std::size_t>(res.a.size()));
  const GridField rec = reconstruct(coeffs, dict, cfg.grid);
  write_kpt(resolve(ctx, cfg.paths.sparse), rec);
  write_slice_csv(resolve(ctx, fs::path(cfg.paths.sparse).stem().string() + "_slice.csv"), rec);

  const KktReport kkt = kkt_report(p, res.a);
  json sol;
  sol["dictionary"] = to_json(dict);
  sol["lambda"] = p.lambda;
  sol["tol"] = p.tol;
  sol["result"] = to_json(res);
  sol["kkt"] = {{"max_correlation", kkt.max_correlation},
                {"off_support", kkt.off_support},
                {"on_support", kkt.on_support}};
  write_json(resolve(ctx, cfg.paths.solution), sol);

  double ref_norm = 0.0;
  for (double v : truth.values) ref_norm += v * v;
  if (ref_norm > 0) {
    r["rel_l2_vs_reference"] = relative_l2(rec.values, truth.values);
    r["gain"] = least_squares_gain(rec, truth);
  }
  r["support_size"] = support(coeffs).size();
  r["kkt_violation"] = kkt.violation();
  r["timings_ms"]["total"] = total.ms();
  write_report(ctx, "reconstruct", r);
  return kOk;
}

int cmd_calibrate(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  json r = report("calibrate");
  Stopwatch clock;
  const double gain =
      calibrate_gain(cfg.d, cfg.k, cfg.frames(), cfg.grid, cfg.resolved_t_grid(), cfg.resolved_quad(), cfg.pad_factor);
  r["timings_ms"]["calibrate"] = clock.ms();
  r["gain"] = gain;
  if (std::abs(gain - 1.0) > 0.05) r["warnings"].push_back("gain deviates from 1 by more than 0.05");
  write_report(ctx, "calibrate", r);
  std::cout << "gain " << std::setprecision(10) << gain << '\n';
  return kOk;
}

}  // namespace kplane::cli

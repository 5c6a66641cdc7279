#include "config.hpp"

#include <fstream>

#include "kplane/errors.hpp"

namespace kplane::cli {

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

template <class T>
T optional_field(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

GridSpec parse_grid(const json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  GridSpec g;
  g.spacing = field<double>(j, "spacing", where);
  g.shape = field<std::vector<int>>(j, "shape", where);
  if (j.contains("origin")) {
    g.origin = field<std::vector<double>>(j, "origin", where);
  } else {
    for (int n : g.shape) g.origin.push_back(-0.5 * (n - 1) * g.spacing);
  }
  if (g.dim() != dim) throw ConfigError(where + ": expected " + std::to_string(dim) + " axes");
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return g;
}

Frame parse_frame(const json& j, int d, int k, const std::string& where) {
  const auto rows = field<std::vector<std::vector<double>>>(json{{"frame", j}}, "frame", where);
  if (static_cast<int>(rows.size()) != d - k) throw ConfigError(where + ": frame must have d-k rows");
  Eigen::MatrixXd m(d - k, d);
  for (int r = 0; r < d - k; ++r) {
    if (static_cast<int>(rows[r].size()) != d) throw ConfigError(where + ": frame rows must have d entries");
    for (int c = 0; c < d; ++c) m(r, c) = rows[r][c];
  }
  try {
    return Frame(d, k, std::move(m));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<double> parse_mean(const json& j, int d, const std::string& where) {
  auto mean = optional_field<std::vector<double>>(j, "mean", std::vector<double>(d, 0.0), where);
  if (static_cast<int>(mean.size()) != d) throw ConfigError(where + ": mean must have d entries");
  return mean;
}

PhantomSpec parse_phantom(const json& j, int d, int k) {
  const std::string where = "phantom";
  if (!j.is_object()) throw ConfigError("phantom must be an object");
  const auto kind = field<std::string>(j, "kind", where);
  PhantomSpec p;
  if (kind == "gaussian") {
    p.kind = PhantomSpec::Kind::Gaussian;
    p.components.push_back({optional_field<double>(j, "weight", 1.0, where), parse_mean(j, d, where)});
  } else if (kind == "mixture") {
    p.kind = PhantomSpec::Kind::Mixture;
    const json comps = optional_field<json>(j, "components", json::array(), where);
    if (!comps.is_array()) throw ConfigError("phantom.components must be an array");
    for (const auto& c : comps) {
      p.components.push_back({field<double>(c, "weight", "phantom.components"), parse_mean(c, d, "phantom.components")});
    }
  } else if (kind == "ridge-sum") {
    p.kind = PhantomSpec::Kind::RidgeSum;
    const json atoms = optional_field<json>(j, "atoms", json::array(), where);
    if (!atoms.is_array()) throw ConfigError("phantom.atoms must be an array");
    for (const auto& a : atoms) {
      const std::string aw = "phantom.atoms";
      RidgeAtom atom;
      atom.weight = optional_field<double>(a, "weight", 1.0, aw);
      atom.frame = parse_frame(field<json>(a, "frame", aw), d, k, aw);
      atom.offset = optional_field<std::vector<double>>(a, "offset", std::vector<double>(d - k, 0.0), aw);
      const auto profile = optional_field<std::string>(a, "profile", "gaussian", aw);
      if (profile == "gaussian") {
        atom.profile = RidgeProfile::gaussian();
      } else if (profile == "rbf") {
        const double s = field<double>(a, "s", aw);
        if (!(s > d - k)) throw ConfigError(aw + ": rbf order s must exceed d-k");
        atom.profile = RidgeProfile::rbf(s, d - k);
      } else {
        throw ConfigError(aw + ": unknown profile '" + profile + "'");
      }
      try {
        atom.validate();
      } catch (const DomainError& e) {
        throw ConfigError(aw + ": " + e.what());
      }
      p.ridges.push_back(std::move(atom));
    }
  } else {
    throw ConfigError("unknown phantom kind '" + kind + "' (expected gaussian, mixture or ridge-sum)");
  }
  return p;
}

SparseSpec parse_sparse(const json& j) {
  const std::string w = "sparse";
  if (!j.is_object()) throw ConfigError("sparse must be an object");
  SparseSpec s;
  s.frame_count = optional_field<int>(j, "frame_count", s.frame_count, w);
  s.offset_count = optional_field<int>(j, "offset_count", s.offset_count, w);
  s.offset_min = optional_field<double>(j, "offset_min", s.offset_min, w);
  s.offset_max = optional_field<double>(j, "offset_max", s.offset_max, w);
  s.s = optional_field<double>(j, "s", s.s, w);
  s.measurements = optional_field<int>(j, "measurements", s.measurements, w);
  s.sigma = optional_field<double>(j, "sigma", s.sigma, w);
  s.box = optional_field<double>(j, "box", s.box, w);
  s.seed = optional_field<std::uint64_t>(j, "seed", s.seed, w);
  s.lambda_ratio = optional_field<double>(j, "lambda_ratio", s.lambda_ratio, w);
  s.tol = optional_field<double>(j, "tol", s.tol, w);
  s.max_iter = optional_field<int>(j, "max_iter", s.max_iter, w);
  if (s.frame_count < 1 || s.offset_count < 2 || s.measurements < 1 || !(s.sigma > 0) || !(s.lambda_ratio > 0) ||
      !(s.offset_max > s.offset_min)) {
    throw ConfigError("sparse: counts, sigma, lambda_ratio and the offset range must be positive");
  }
  return s;
}

}  // namespace

FrameSet RunConfig::frames() const {
  if (frame_mode == "circle") return FrameSet::circle(frame_count);
  return FrameSet::monte_carlo(d, k, frame_count, {seed, 0});
}

GridSpec RunConfig::resolved_t_grid() const { return t_grid ? *t_grid : default_t_grid(grid, d, k); }

QuadSpec RunConfig::resolved_quad() const { return quad ? *quad : QuadSpec::defaults_for(grid); }

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.d = field<int>(j, "d", "config");
  c.k = field<int>(j, "k", "config");
  try {
    check_dimensions(c.d, c.k);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.grid = parse_grid(field<json>(j, "grid", "config"), c.d, "grid");

  if (j.contains("frames")) {
    const json& f = j.at("frames");
    c.frame_mode = optional_field<std::string>(f, "mode", c.d == 2 && c.k == 1 ? "circle" : "monte-carlo", "frames");
    c.frame_count = optional_field<int>(f, "count", c.frame_count, "frames");
    c.seed = optional_field<std::uint64_t>(f, "seed", c.seed, "frames");
  } else if (!(c.d == 2 && c.k == 1)) {
    c.frame_mode = "monte-carlo";
  }
  if (c.frame_mode != "circle" && c.frame_mode != "monte-carlo") {
    throw ConfigError("frames.mode must be 'circle' or 'monte-carlo'");
  }
  if (c.frame_mode == "circle" && !(c.d == 2 && c.k == 1)) throw ConfigError("circle frames require d=2, k=1");
  if (c.frame_count < 1) throw ConfigError("frames.count must be positive");

  if (j.contains("t_grid")) c.t_grid = parse_grid(j.at("t_grid"), c.d - c.k, "t_grid");
  if (j.contains("quad")) {
    const json& q = j.at("quad");
    QuadSpec spec = QuadSpec::defaults_for(c.grid);
    spec.halfwidth = optional_field<double>(q, "L", spec.halfwidth, "quad");
    spec.nodes_per_axis = optional_field<int>(q, "nodes", spec.nodes_per_axis, "quad");
    const auto interp = optional_field<std::string>(q, "interp", "cubic", "quad");
    if (interp != "cubic" && interp != "linear") throw ConfigError("quad.interp must be 'cubic' or 'linear'");
    spec.interp = interp == "cubic" ? Interp::Cubic : Interp::Linear;
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("quad: ") + e.what());
    }
    c.quad = spec;
  }
  if (j.contains("filter")) c.pad_factor = optional_field<double>(j.at("filter"), "pad_factor", 2.0, "filter");
  if (!(c.pad_factor >= 1.0)) throw ConfigError("filter.pad_factor must be >= 1");

  c.phantom = parse_phantom(optional_field<json>(j, "phantom", json{{"kind", "gaussian"}}, "config"), c.d, c.k);
  if (j.contains("sparse")) c.sparse = parse_sparse(j.at("sparse"));

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    c.paths.phantom = optional_field<std::string>(p, "phantom", c.paths.phantom, "paths");
    c.paths.sinogram = optional_field<std::string>(p, "sinogram", c.paths.sinogram, "paths");
    c.paths.reconstruction = optional_field<std::string>(p, "reconstruction", c.paths.reconstruction, "paths");
    c.paths.sparse = optional_field<std::string>(p, "sparse", c.paths.sparse, "paths");
    c.paths.report = optional_field<std::string>(p, "report", c.paths.report, "paths");
    c.paths.solution = optional_field<std::string>(p, "solution", c.paths.solution, "paths");
    c.paths.verdict = optional_field<std::string>(p, "verdict", c.paths.verdict, "paths");
  }
  if (j.contains("verify") && j.at("verify").contains("tolerance")) {
    c.tolerance_override = field<double>(j.at("verify"), "tolerance", "verify");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

GridField render_phantom(const RunConfig& cfg) {
  const PhantomSpec& p = cfg.phantom;
  if (p.kind == PhantomSpec::Kind::RidgeSum) {
    GridField out(cfg.grid);
    for (const auto& atom : p.ridges) {
      const GridField part = ridge_field(atom, cfg.grid);
      for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += part.values[i];
    }
    return out;
  }
  return GridField::sample(cfg.grid, [&](std::span<const double> x) {
    double acc = 0.0;
    for (const auto& c : p.components) acc += c.weight * gaussian_density(x, c.mean);
    return acc;
  });
}

}  // namespace kplane::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kplane/analytic.hpp"
#include "kplane/fields.hpp"
#include "kplane/transform.hpp"

namespace kplane::cli {

/// Schema violation in the run configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
};

struct PhantomSpec {
  enum class Kind { Gaussian, Mixture, RidgeSum };
  Kind kind = Kind::Gaussian;
  std::vector<GaussianComponent> components;  // gaussian: exactly one
  std::vector<RidgeAtom> ridges;
};

struct SparseSpec {
  int frame_count = 8;
  int offset_count = 16;
  double offset_min = -3.0;
  double offset_max = 3.0;
  double s = 2.0;
  int measurements = 50;
  double sigma = 0.7;
  double box = 3.0;
  std::uint64_t seed = 42;
  double lambda_ratio = 1e-3;
  double tol = 1e-5;
  int max_iter = 200000;
};

struct Paths {
  std::string phantom = "phantom.kpt";
  std::string sinogram = "sinogram.kpt";
  std::string reconstruction = "reconstruction.kpt";
  std::string sparse = "sparse_reconstruction.kpt";
  std::string report = "report.json";
  std::string solution = "solution.json";
  std::string verdict = "verdict.json";
};

struct RunConfig {
  int d = 2;
  int k = 1;
  GridSpec grid;
  std::string frame_mode = "circle";
  int frame_count = 180;
  std::uint64_t seed = 0;
  std::optional<GridSpec> t_grid;
  std::optional<QuadSpec> quad;
  double pad_factor = 2.0;
  PhantomSpec phantom;
  SparseSpec sparse;
  Paths paths;
  std::optional<double> tolerance_override;

  FrameSet frames() const;
  GridSpec resolved_t_grid() const;
  QuadSpec resolved_quad() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

GridField render_phantom(const RunConfig& cfg);

}  // namespace kplane::cli

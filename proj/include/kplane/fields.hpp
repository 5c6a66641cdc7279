#pragma once

// Sampled functions on R^d (GridField) and on the k-plane domain (Sinogram),
// interpolation, quadrature, and the KPT1 file format.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kplane/geometry.hpp"

namespace kplane {

/// Uniform, isotropic, axis-aligned grid. Node i along axis a sits at
/// origin[a] + i * spacing. Flattening is row-major (last axis fastest).
struct GridSpec {
  std::vector<double> origin;
  double spacing = 1.0;
  std::vector<int> shape;

  int dim() const { return static_cast<int>(shape.size()); }
  std::size_t size() const;
  std::vector<std::size_t> strides() const;
  /// Coordinates of the node with flat index `flat`.
  void node(std::size_t flat, std::span<double> out) const;
  /// Largest distance from the origin of R^n to a corner of the box.
  double max_corner_norm() const;

  /// Throws DomainError on inconsistent sizes, h <= 0, or empty shape.
  void validate() const;

  /// Grid of `n` nodes per axis in `dim` dimensions, symmetric about 0.
  static GridSpec centered(int dim, int n, double spacing);

  bool operator==(const GridSpec&) const = default;
};

enum class Interp { Linear, Cubic };

struct GridField {
  GridSpec grid;
  std::vector<double> values;

  GridField() = default;
  GridField(GridSpec g, std::vector<double> v);
  /// Zero-initialized.
  explicit GridField(GridSpec g);

  int dim() const { return grid.dim(); }
  /// Fills values with f(x) at each node.
  static GridField sample(const GridSpec& g, const std::function<double(std::span<const double>)>& f);
};

/// Multilinear interpolation; 0 outside the grid's bounding box.
double interpolate(const GridField& field, std::span<const double> x);

/// Keys cubic-convolution interpolation (a = -1/2); nodes beyond the grid
/// count as zero, and points outside the bounding box return 0.
double interpolate_cubic(const GridField& field, std::span<const double> x);

double interpolate(const GridField& field, std::span<const double> x, Interp mode);

/// Rectangle rule: h^d * sum(values).
double integrate(const GridField& field);

/// Evaluates the source function at a point (A, t) of the k-plane domain.
/// Attached to sinograms that can be re-rendered at frames outside their
/// sample set.
using SinogramGenerator = std::function<double(const Frame&, std::span<const double>)>;

struct Sinogram {
  int d = 0;
  int k = 0;
  std::vector<Frame> frames;
  GridSpec t_grid;
  /// Frame blocks concatenated in frame order; each block is row-major over t_grid.
  std::vector<double> values;
  /// Optional; not serialized.
  std::shared_ptr<const SinogramGenerator> generator;

  Sinogram() = default;
  /// Zero-initialized.
  Sinogram(int d, int k, std::vector<Frame> frames, GridSpec t_grid);

  std::size_t block_size() const { return t_grid.size(); }
  std::span<double> block(std::size_t frame);
  std::span<const double> block(std::size_t frame) const;

  /// Multilinear interpolation of frame block j at t (0 outside the t box).
  double interpolate_t(std::size_t frame, std::span<const double> t) const;

  void validate() const;
};

/// Tensor trapezoid rule on [-L, L]^k.
struct QuadSpec {
  double halfwidth = 6.0;
  int nodes_per_axis = 128;
  Interp interp = Interp::Cubic;

  /// Nodes t_i = -L + i * step, i = 0..n-1.
  double step() const { return 2.0 * halfwidth / (nodes_per_axis - 1); }
  /// 1-D trapezoid weights (sum to 2L).
  std::vector<double> weights_1d() const;
  void validate() const;

  /// L = half the grid diagonal, 2 max(N_i) nodes per axis.
  static QuadSpec defaults_for(const GridSpec& grid);
};

// KPT1 container: "KPT1", u32 LE header length, UTF-8 JSON header, float64 LE
// payload (row-major, frames concatenated in list order).
using KptObject = std::variant<GridField, Sinogram>;

void write_kpt(const std::filesystem::path& path, const GridField& field);
void write_kpt(const std::filesystem::path& path, const Sinogram& sino);
KptObject read_kpt(const std::filesystem::path& path);

/// In-memory encode/decode used by the file functions.
std::string encode_kpt(const KptObject& object);
KptObject decode_kpt(std::string_view bytes);

}  // namespace kplane

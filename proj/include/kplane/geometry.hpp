#pragma once

// Dimensional constants, Haar sampling on the Stiefel manifold and the
// orthogonal group, and frame algebra.
//
// A k-plane in R^d is written {x : A x = t} with A a (d-k) x d matrix with
// orthonormal rows (a point of the Stiefel manifold V_{d-k}(R^d)) and
// t in R^{d-k}. (A, t) and (U A, U t) describe the same plane for every
// U in O(d-k).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kplane {

/// Surface area |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
double sphere_area(int n);

/// Normalization of the ramp filter c_{d,k} |omega|^k that makes the filtered
/// backprojection an exact inverse (under the Haar convention of
/// stiefel_total_mass).
double c_constant(int d, int k);

/// Total Haar mass of V_{d-k}(R^d), fixed as prod_{j=k+1}^{d} |S^{j-1}|.
double stiefel_total_mass(int d, int k);

/// Throws DomainError unless d >= 2 and 1 <= k <= d-1.
void check_dimensions(int d, int k);

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Deterministic generator: identical (seed, stream) pairs replay identical
/// draws.
class Rng {
 public:
  explicit Rng(RngSeed s);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Orthonormal-row frame on V_{d-k}(R^d).
class Frame {
 public:
  Frame() = default;

  /// Validates the (d-k) x d shape and orthonormality of the rows. The
  /// acceptance threshold is 1e-9 so that frames typed into config files with
  /// ~16 digits are accepted; sampled frames satisfy 1e-12.
  Frame(int d, int k, Eigen::MatrixXd rows);

  int d() const { return d_; }
  int k() const { return k_; }
  /// Codimension d - k, the number of rows.
  int m() const { return d_ - k_; }
  const Eigen::MatrixXd& rows() const { return rows_; }

  /// ||A A^T - I||_F.
  double orthonormality_error() const;

 private:
  int d_ = 0;
  int k_ = 0;
  Eigen::MatrixXd rows_;
};

class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(Eigen::MatrixXd mat);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  Rotation transpose() const { return Rotation(mat_.transpose()); }

 private:
  Eigen::MatrixXd mat_;
};

/// Haar-distributed frame: Gaussian d x (d-k) matrix, QR with positive
/// triangular diagonal, transposed.
Frame haar_frame_sample(int d, int k, Rng& rng);
Frame haar_frame_sample(int d, int k, RngSeed seed);

/// Haar-distributed element of O(m).
Rotation haar_orthogonal_sample(int m, Rng& rng);
Rotation haar_orthogonal_sample(int m, RngSeed seed);

/// d x k matrix B whose orthonormal columns span ker(A); [A^T | B] is
/// orthogonal. Deterministic given A.
Eigen::MatrixXd complete_frame(const Frame& a);

struct FramePoint {
  Frame frame;
  std::vector<double> t;
};

/// (U A, U t).
FramePoint rotate_pair(const Frame& a, std::span<const double> t, const Rotation& u);

/// min over U in O(d-k) of ||U A - B||_F (distance between the plane
/// families, independent of the row basis).
double chordal_distance(const Frame& a, const Frame& b);

/// ||A - B||_F, the distance in the ambient matrix space.
double frame_distance(const Frame& a, const Frame& b);

/// Orthogonal U minimizing ||U A - B||_F.
Rotation procrustes_rotation(const Frame& a, const Frame& b);

/// Frame whose single row is (cos theta, sin theta) (d = 2, k = 1).
Frame circle_frame(double theta);

}  // namespace kplane

#include "kplane/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kplane/errors.hpp"

namespace kplane {

double sphere_area(int n) {
  if (n < 1) throw DomainError("sphere_area: n must be >= 1, got " + std::to_string(n));
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

void check_dimensions(int d, int k) {
  if (d < 2 || k < 1 || k > d - 1) {
    throw DomainError("invalid dimensions d=" + std::to_string(d) + ", k=" + std::to_string(k) +
                      " (need d >= 2, 1 <= k <= d-1)");
  }
}

double c_constant(int d, int k) {
  check_dimensions(d, k);
  double prod = 1.0;
  for (int n = k; n <= d - 1; ++n) prod *= sphere_area(n);
  return std::pow(2.0 * std::numbers::pi, -k) * sphere_area(k) / sphere_area(d - k) / prod;
}

double stiefel_total_mass(int d, int k) {
  check_dimensions(d, k);
  double prod = 1.0;
  for (int j = k + 1; j <= d; ++j) prod *= sphere_area(j);
  return prod;
}

Rng::Rng(RngSeed s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(s.stream), static_cast<std::uint32_t>(s.stream >> 32),
                    0x6b706c61u};
  engine_.seed(seq);
}

Frame::Frame(int d, int k, Eigen::MatrixXd rows) : d_(d), k_(k), rows_(std::move(rows)) {
  check_dimensions(d, k);
  if (rows_.rows() != d - k || rows_.cols() != d) {
    throw DomainError("frame must be (d-k) x d = " + std::to_string(d - k) + "x" + std::to_string(d) +
                      ", got " + std::to_string(rows_.rows()) + "x" + std::to_string(rows_.cols()));
  }
  if (!rows_.allFinite()) throw DomainError("frame has non-finite entries");
  if (orthonormality_error() > 1e-9) {
    throw DomainError("frame rows are not orthonormal (||A A^T - I||_F = " +
                      std::to_string(orthonormality_error()) + ")");
  }
}

double Frame::orthonormality_error() const {
  const auto m = rows_.rows();
  return (rows_ * rows_.transpose() - Eigen::MatrixXd::Identity(m, m)).norm();
}

Rotation::Rotation(Eigen::MatrixXd mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1) throw DomainError("rotation must be square");
  const auto m = mat_.rows();
  if ((mat_ * mat_.transpose() - Eigen::MatrixXd::Identity(m, m)).norm() > 1e-9) {
    throw DomainError("rotation matrix is not orthogonal");
  }
}

namespace {

// Q factor of a Gaussian rows x cols matrix (rows >= cols), column signs fixed
// so that R has a positive diagonal. This is the Haar-exact construction.
Eigen::MatrixXd sign_fixed_gaussian_q(int rows, int cols, Rng& rng) {
  for (;;) {
    Eigen::MatrixXd g(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (int j = 0; j < cols; ++j) degenerate = degenerate || std::abs(r(j, j)) < 1e-300;
    if (degenerate) continue;
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    for (int j = 0; j < cols; ++j) {
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    // One Gram-Schmidt pass to push the orthonormality error to ~1e-16.
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      q.col(j).normalize();
    }
    return q;
  }
}

}  // namespace

Frame haar_frame_sample(int d, int k, Rng& rng) {
  check_dimensions(d, k);
  return Frame(d, k, sign_fixed_gaussian_q(d, d - k, rng).transpose());
}

Frame haar_frame_sample(int d, int k, RngSeed seed) {
  Rng rng(seed);
  return haar_frame_sample(d, k, rng);
}

Rotation haar_orthogonal_sample(int m, Rng& rng) {
  if (m < 1) throw DomainError("haar_orthogonal_sample: m must be >= 1");
  return Rotation(sign_fixed_gaussian_q(m, m, rng));
}

Rotation haar_orthogonal_sample(int m, RngSeed seed) {
  Rng rng(seed);
  return haar_orthogonal_sample(m, rng);
}

Eigen::MatrixXd complete_frame(const Frame& a) {
  const int d = a.d();
  const int m = a.m();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.rows().transpose());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return q.rightCols(d - m);
}

FramePoint rotate_pair(const Frame& a, std::span<const double> t, const Rotation& u) {
  if (u.dim() != a.m()) throw DomainError("rotate_pair: rotation dimension must equal d-k");
  if (static_cast<int>(t.size()) != a.m()) throw DomainError("rotate_pair: offset length must equal d-k");
  const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
  Eigen::VectorXd ut = u.mat() * tv;
  return {Frame(a.d(), a.k(), u.mat() * a.rows()), std::vector<double>(ut.data(), ut.data() + ut.size())};
}

double chordal_distance(const Frame& a, const Frame& b) {
  if (a.d() != b.d() || a.k() != b.k()) throw DomainError("chordal_distance: frame dimensions differ");
  // ||U A - B||^2 = 2m - 2 tr(U A B^T); the max of tr(U M) over O(m) is the
  // nuclear norm of M.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.rows() * b.rows().transpose());
  const double sq = 2.0 * a.m() - 2.0 * svd.singularValues().sum();
  return std::sqrt(std::max(0.0, sq));
}

double frame_distance(const Frame& a, const Frame& b) {
  if (a.d() != b.d() || a.k() != b.k()) throw DomainError("frame_distance: frame dimensions differ");
  return (a.rows() - b.rows()).norm();
}

Rotation procrustes_rotation(const Frame& a, const Frame& b) {
  if (a.d() != b.d() || a.k() != b.k()) throw DomainError("procrustes_rotation: frame dimensions differ");
  // maximize tr(U A B^T) = tr(U M): with B A^T = W S Z^T the optimum is W Z^T.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.rows() * a.rows().transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

Frame circle_frame(double theta) {
  Eigen::MatrixXd row(1, 2);
  row << std::cos(theta), std::sin(theta);
  return Frame(2, 1, row);
}

}  // namespace kplane

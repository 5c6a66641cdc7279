#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "kplane/analytic.hpp"
#include "kplane/errors.hpp"
#include "kplane/isotropy.hpp"

using namespace kplane;

namespace {

QuadSpec quad(double L, int nodes, Interp interp = Interp::Cubic) {
  QuadSpec q;
  q.halfwidth = L;
  q.nodes_per_axis = nodes;
  q.interp = interp;
  return q;
}

// Smooth sinogram that is not invariant under (A, t) -> (UA, Ut).
Sinogram lopsided(int d, int k, const std::vector<Frame>& frames, const GridSpec& tg) {
  auto gen = std::make_shared<const SinogramGenerator>([](const Frame& a, std::span<const double> t) {
    double sq = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) {
      const double s = t[r] - 0.8 * a.rows()(static_cast<Eigen::Index>(r), 0) - 0.3;
      sq += s * s;
    }
    return std::exp(-0.5 * sq) * (1.0 + 0.5 * a.rows()(0, 1));
  });
  Sinogram s(d, k, frames, tg);
  for (std::size_t j = 0; j < frames.size(); ++j) {
    std::vector<double> t(static_cast<std::size_t>(d - k));
    for (std::size_t i = 0; i < tg.size(); ++i) {
      tg.node(i, t);
      s.block(j)[i] = (*gen)(frames[j], t);
    }
  }
  s.generator = gen;
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> diff(const Sinogram& a, const Sinogram& b) {
  std::vector<double> out(a.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values[i] - b.values[i];
  return out;
}

Sinogram minus(const Sinogram& a, const Sinogram& b) {
  Sinogram out(a.d, a.k, a.frames, a.t_grid);
  out.values = diff(a, b);
  return out;
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

}  // namespace

TEST(IsoRotations, Enumeration) {
  const auto one = iso_rotations(1, 64, {});
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].mat()(0, 0), 1.0);
  EXPECT_EQ(one[1].mat()(0, 0), -1.0);
  // Dihedral group: closed under products.
  const auto two = iso_rotations(2, 8, {3, 0});
  ASSERT_EQ(two.size(), 8u);
  for (const auto& u : two) {
    for (const auto& v : two) {
      const Eigen::MatrixXd uv = u.mat() * v.mat();
      EXPECT_TRUE(std::any_of(two.begin(), two.end(), [&](const Rotation& w) { return (w.mat() - uv).norm() < 1e-12; }));
    }
  }
  EXPECT_THROW(iso_rotations(2, 7, {}), DomainError);
  const auto three = iso_rotations(3, 8, {3, 0});
  ASSERT_EQ(three.size(), 8u);
  for (std::size_t i = 0; i < 8; i += 2) EXPECT_EQ(three[i].mat(), three[i + 1].mat().transpose());
}

TEST(ProjectIso, CodimensionOneIsEvenPart) {
  const GridSpec tg = GridSpec::centered(1, 41, 0.2);
  Sinogram g = lopsided(2, 1, FrameSet::circle(24).frames, tg);
  g.generator.reset();
  const Sinogram p = project_iso(g);
  double t[1];
  for (std::size_t j = 0; j < 24; ++j) {
    const std::size_t opposite = (j + 12) % 24;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      tg.node(i, t);
      const double even = 0.5 * (g.block(j)[i] + g.block(opposite)[tg.size() - 1 - i]);
      EXPECT_NEAR(p.block(j)[i], even, 1e-14);
    }
  }
  const Sinogram pp = project_iso(p);
  EXPECT_LE(max_abs(diff(pp, p)), 1e-14);
  EXPECT_LE(sinogram_norm(p), sinogram_norm(g) * (1 + 1e-6));
}

TEST(ProjectIso, ConstantIsFixed) {
  const GridSpec tg = GridSpec::centered(2, 9, 0.5);
  Sinogram ones(3, 1, FrameSet::monte_carlo(3, 1, 30, {1, 0}).frames, tg);
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  ones.generator = std::make_shared<const SinogramGenerator>([](const Frame&, std::span<const double>) { return 1.0; });
  for (double v : project_iso(ones, 64, {2, 0}).values) EXPECT_EQ(v, 1.0);
  Sinogram bare(3, 1, ones.frames, tg);
  bare.values = ones.values;
  EXPECT_THROW(project_iso(bare, 64, {2, 0}), DomainError);
}

TEST(ProjectIso, ForwardSinogramIsFixed) {
  const GridSpec g = GridSpec::centered(3, 32, 0.25);
  const GridField f = mixture(g);
  GridSpec tg = GridSpec::centered(2, 21, 0.35);
  const Sinogram s = forward(f, FrameSet::monte_carlo(3, 1, 12, {3, 0}), tg, quad(5, 61));
  const Sinogram p = project_iso(s, 16, {4, 0});
  EXPECT_LE(max_abs(diff(p, s)), 2e-3 * max_abs(s.values));
}

TEST(ProjectIso, ProjectorLawsInCodimensionTwo) {
  // Frames closed under the rotation set, so the discrete pairing is invariant.
  const GridSpec tg = GridSpec::centered(2, 25, 0.5);
  const auto rotations = iso_rotations(2, 16, {});
  std::vector<Frame> frames;
  for (const Frame& a : FrameSet::monte_carlo(3, 1, 6, {5, 0}).frames)
    for (const Rotation& u : rotations) frames.push_back(Frame(3, 1, u.mat() * a.rows()));
  const Sinogram f = lopsided(3, 1, frames, tg);
  const Sinogram p = project_iso(f, 16);
  const Sinogram pp = project_iso(p, 16);
  EXPECT_LE(sinogram_norm(p), sinogram_norm(f) * (1 + 1e-6));
  EXPECT_LE(sinogram_norm(minus(pp, p)), 2e-2 * sinogram_norm(p));

  // Self-adjointness against a second smooth sinogram.
  auto gen = std::make_shared<const SinogramGenerator>([](const Frame& a, std::span<const double> t) {
    const double s0 = t[0] + 0.4 * a.rows()(1, 2);
    const double s1 = t[1] - 0.2;
    return std::exp(-0.5 * (s0 * s0 + s1 * s1) / 1.3) * (1.0 - 0.3 * a.rows()(0, 0));
  });
  Sinogram h(3, 1, frames, tg);
  std::vector<double> t(2);
  for (std::size_t j = 0; j < frames.size(); ++j) {
    for (std::size_t i = 0; i < tg.size(); ++i) {
      tg.node(i, t);
      h.block(j)[i] = (*gen)(frames[j], t);
    }
  }
  h.generator = gen;
  const double lhs = sinogram_inner(p, h);
  const double rhs = sinogram_inner(f, project_iso(h, 16));
  EXPECT_LE(std::abs(lhs - rhs), 2e-2 * sinogram_norm(f) * sinogram_norm(h));
}

TEST(PkProject, FixesRangeAndKillsOddPart) {
  const GridSpec g = GridSpec::centered(2, 64, 0.2);
  const FrameSet frames = FrameSet::circle(180);
  const GridSpec tg = default_t_grid(g, 2, 1);
  const QuadSpec q = QuadSpec::defaults_for(g);
  const Sinogram s = forward(mixture(g), frames, tg, q);
  const Sinogram ps = pk_project(s, g, q);
  EXPECT_LE(sinogram_norm(minus(ps, s)), 0.05 * sinogram_norm(s));

  Sinogram smooth = lopsided(2, 1, frames.frames, tg);
  const Sinogram iso = project_iso(smooth);
  const Sinogram anti = minus(smooth, iso);
  const Sinogram pa = pk_project(anti, g, q);
  EXPECT_LE(sinogram_norm(pa), 0.10 * sinogram_norm(anti));

  Sinogram zero(2, 1, frames.frames, tg);
  for (double v : pk_project(zero, g, q).values) EXPECT_EQ(v, 0.0);
}

TEST(DeltaIso, MassAndSymmetry) {
  const GridSpec tg = GridSpec::centered(1, 61, 0.1);
  const auto frames = FrameSet::circle(64).frames;
  const MollifiedAtom atom{circle_frame(0.3), {0.7}, 0.2, 0.3};
  const Sinogram s = render_delta_iso(atom, frames, tg);
  EXPECT_NEAR(sinogram_mass(s), 1.0, 1e-6);
  // Two-bump form: the rendering is invariant under (A, t) -> (-A, -t).
  for (std::size_t j = 0; j < 64; ++j) {
    for (std::size_t i = 0; i < tg.size(); ++i) {
      EXPECT_NEAR(s.block(j)[i], s.block((j + 32) % 64)[tg.size() - 1 - i], 1e-14);
    }
  }
  const MollifiedAtom sharp{circle_frame(0.3), {0.7}, 0.2, 0.1};
  EXPECT_THROW(render_delta_iso(sharp, frames, tg), DomainError);

  const GridSpec tg2 = GridSpec::centered(2, 31, 0.3);
  const MollifiedAtom atom3{haar_frame_sample(3, 1, RngSeed{1, 1}), {0.4, -0.3}, 0.3, 1.0};
  const Sinogram s3 = render_delta_iso(atom3, FrameSet::monte_carlo(3, 1, 500, {2, 2}).frames, tg2, 64, {3, 3});
  EXPECT_NEAR(sinogram_mass(s3), 1.0, 1e-3);
}

TEST(DeltaIso, BackprojectsToRidge) {
  const GridSpec g = GridSpec::centered(3, 31, 0.2);
  const double th = 0.2;
  const int half = static_cast<int>(std::ceil(g.max_corner_norm() / th)) + 30;
  GridSpec tg;
  tg.spacing = th;
  tg.shape = {2 * half + 1, 2 * half + 1};
  tg.origin = {-half * th, -half * th};
  const MollifiedAtom atom{haar_frame_sample(3, 1, RngSeed{5, 0}), {0.4, -0.3}, 0.1, 2.0};
  const Sinogram s = render_delta_iso(atom, FrameSet::monte_carlo(3, 1, 2000, {11, 0}).frames, tg, 64, {3, 0});
  const GridField bp = backproject(s, g);
  const double w2 = atom.t_width * atom.t_width;
  const GridField ridge = GridField::sample(g, [&](std::span<const double> x) {
    double sq = 0.0;
    for (int r = 0; r < 2; ++r) {
      double v = -atom.offset[r];
      for (int c = 0; c < 3; ++c) v += atom.frame.rows()(r, c) * x[c];
      sq += v * v;
    }
    return std::exp(-0.5 * sq / w2) / (2 * std::numbers::pi * w2);
  });
  EXPECT_LE(relative_l2(bp.values, ridge.values), 0.05);
}

#include "kplane/sparse.hpp"

#include <cmath>
#include <string>

#include "kplane/errors.hpp"
#include "kplane/parallel.hpp"

namespace kplane {

namespace {

constexpr double kDuplicate = 1e-9;

double offset_gap(const Eigen::VectorXd& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = a(i) - b[static_cast<std::size_t>(i)];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

}  // namespace

Dictionary build_dictionary(const std::vector<Frame>& frame_grid, const std::vector<std::vector<double>>& offset_grid,
                            double s, int d, int k) {
  check_dimensions(d, k);
  const int m = d - k;
  if (frame_grid.empty() || offset_grid.empty()) throw DomainError("build_dictionary: empty frame or offset grid");
  if (!(s > m)) throw DomainError("build_dictionary: rbf order s must exceed d-k");
  for (const auto& f : frame_grid)
    if (f.d() != d || f.k() != k) throw DomainError("build_dictionary: frame dimensions differ from (d, k)");
  for (const auto& t : offset_grid)
    if (static_cast<int>(t.size()) != m) throw DomainError("build_dictionary: offsets must have d-k entries");

  for (std::size_t p = 0; p < offset_grid.size(); ++p)
    for (std::size_t q = p + 1; q < offset_grid.size(); ++q)
      if (offset_gap(as_vector(offset_grid[p]), offset_grid[q]) < kDuplicate)
        throw DomainError("build_dictionary: duplicate offsets " + std::to_string(p) + " and " + std::to_string(q));

  for (std::size_t i = 0; i < frame_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < frame_grid.size(); ++j) {
      if (chordal_distance(frame_grid[i], frame_grid[j]) >= kDuplicate) continue;
      const Eigen::MatrixXd u = procrustes_rotation(frame_grid[i], frame_grid[j]).mat();
      for (std::size_t p = 0; p < offset_grid.size(); ++p) {
        const Eigen::VectorXd ut = u * as_vector(offset_grid[p]);
        for (std::size_t q = 0; q < offset_grid.size(); ++q) {
          if (offset_gap(ut, offset_grid[q]) < kDuplicate) {
            throw DomainError("build_dictionary: atoms (frame " + std::to_string(i) + ", offset " + std::to_string(p) +
                              ") and (frame " + std::to_string(j) + ", offset " + std::to_string(q) +
                              ") describe the same ridge");
          }
        }
      }
    }
  }

  Dictionary dict;
  dict.d = d;
  dict.k = k;
  dict.s = s;
  dict.frame_grid = frame_grid;
  dict.offset_grid = offset_grid;
  const RidgeProfile profile = RidgeProfile::rbf(s, m);
  dict.atoms.reserve(frame_grid.size() * offset_grid.size());
  for (const auto& f : frame_grid)
    for (const auto& t : offset_grid) dict.atoms.push_back(RidgeAtom{1.0, f, t, profile});
  return dict;
}

void MeasurementSet::validate() const {
  if (functionals.empty()) throw DomainError("measurement set is empty");
  const GridSpec& g = functionals.front().grid;
  for (const auto& h : functionals) {
    if (!(h.grid == g)) throw DomainError("measurement functionals must share one grid");
    for (double v : h.values)
      if (!std::isfinite(v)) throw DomainError("measurement functional has non-finite values");
  }
}

void LassoProblem::validate() const {
  if (gram.rows() != y.size()) throw DomainError("lasso: gram rows must match the measurement count");
  if (gram.rows() < 1 || gram.cols() < 1) throw DomainError("lasso: empty gram matrix");
  check_finite(gram, "lasso gram matrix");
  check_finite(y, "lasso measurements");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lasso: lambda must be positive");
  if (!(tol > 0.0)) throw DomainError("lasso: tol must be positive");
  if (max_iter < 1) throw DomainError("lasso: max_iter must be positive");
}

Eigen::MatrixXd assemble(const Dictionary& dict, const MeasurementSet& meas, const GridSpec& field_grid) {
  meas.validate();
  field_grid.validate();
  if (!(meas.functionals.front().grid == field_grid)) {
    throw DomainError("assemble: measurement functionals must be sampled on the field grid");
  }
  const std::size_t nx = field_grid.size();
  const auto rows = static_cast<Eigen::Index>(meas.functionals.size());
  Eigen::MatrixXd h(rows, static_cast<Eigen::Index>(nx));
  for (Eigen::Index r = 0; r < rows; ++r)
    h.row(r) = Eigen::Map<const Eigen::RowVectorXd>(meas.functionals[static_cast<std::size_t>(r)].values.data(),
                                                    static_cast<Eigen::Index>(nx));

  const double cell = std::pow(field_grid.spacing, field_grid.dim());
  Eigen::MatrixXd gram(rows, static_cast<Eigen::Index>(dict.size()));
  parallel_for(dict.size(), [&](std::size_t j) {
    const GridField atom = ridge_field(dict.atoms[j], field_grid);
    const Eigen::Map<const Eigen::VectorXd> v(atom.values.data(), static_cast<Eigen::Index>(nx));
    gram.col(static_cast<Eigen::Index>(j)) = cell * (h * v);
  });
  return gram;
}

double lasso_objective(const LassoProblem& p, const Eigen::VectorXd& a) {
  return (p.y - p.gram * a).squaredNorm() + p.lambda * a.lpNorm<1>();
}

KktReport kkt_report(const LassoProblem& p, const Eigen::VectorXd& a) {
  const Eigen::VectorXd c = p.gram.transpose() * (p.y - p.gram * a);
  const double half = 0.5 * p.lambda;
  KktReport out;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (a(j) == 0.0) {
      out.max_correlation = std::max(out.max_correlation, std::abs(c(j)));
      out.off_support = std::max(out.off_support, std::abs(c(j)) - half);
    } else {
      out.on_support = std::max(out.on_support, std::abs(c(j) - (a(j) > 0 ? half : -half)));
    }
  }
  return out;
}

LassoResult solve_lasso(const LassoProblem& p) {
  p.validate();
  const Eigen::Index n = p.gram.cols();
  // Steps are taken on the half quadratic 0.5 ||y - G a||^2 whose gradient is
  // G^T (G a - y); the matching threshold is lambda * step / 2.
  // Descent-lemma test for the quadratic, written as |G d|^2 <= |d|^2 / step.
  double step = 1.0;
  const auto sufficient = [&](const Eigen::VectorXd& diff) {
    return step * (p.gram * diff).squaredNorm() <= diff.squaredNorm();
  };
  const auto shrink = [](const Eigen::VectorXd& v, double thr) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i)) - thr;
      out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
    }
    return out;
  };

  LassoResult res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  res.initial_objective = lasso_objective(p, x);
  double fx = res.initial_objective;
  Eigen::VectorXd z = x;
  double theta = 1.0;
  const double frob = p.gram.squaredNorm();
  step = frob > 0.0 ? static_cast<double>(n) / frob : 1.0;

  for (int it = 1; it <= p.max_iter; ++it) {
    const Eigen::VectorXd grad = p.gram.transpose() * (p.gram * z - p.y);
    Eigen::VectorXd cand;
    for (;;) {
      cand = shrink(z - step * grad, 0.5 * p.lambda * step);
      const Eigen::VectorXd diff = cand - z;
      if (sufficient(diff)) break;
      step *= 0.5;
    }
    double fc = lasso_objective(p, cand);
    if (fc > fx) {
      // Restart: drop momentum and take a plain proximal step from x.
      theta = 1.0;
      const Eigen::VectorXd gx = p.gram.transpose() * (p.gram * x - p.y);
      for (;;) {
        cand = shrink(x - step * gx, 0.5 * p.lambda * step);
        if (sufficient(cand - x)) break;
        step *= 0.5;
      }
      fc = lasso_objective(p, cand);
      // A proximal step from x cannot increase the objective beyond rounding.
      if (fc > fx + 1e-12 * std::abs(fx)) {
        cand = x;
        fc = fx;
      }
      z = cand;
    } else {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      z = cand + ((theta - 1.0) / next) * (cand - x);
      theta = next;
    }
    x = std::move(cand);
    fx = fc;
    res.history.push_back(fx);
    res.iterations = it;
    if (kkt_report(p, x).violation() <= p.lambda * p.tol) {
      res.converged = true;
      break;
    }
  }
  res.a = std::move(x);
  res.objective = fx;
  return res;
}

double reg_cost(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += std::abs(v);
  return acc;
}

std::vector<std::size_t> support(std::span<const double> a, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > threshold) out.push_back(i);
  return out;
}

GridField reconstruct(std::span<const double> a, const Dictionary& dict, const GridSpec& grid) {
  if (a.size() != dict.size()) throw DomainError("reconstruct: coefficient count differs from dictionary size");
  GridField out(grid);
  for (std::size_t j : support(a)) {
    const GridField atom = ridge_field(dict.atoms[j], grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += a[j] * atom.values[i];
  }
  return out;
}

nlohmann::json to_json(const Dictionary& dict) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : dict.frame_grid) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < f.rows().rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < f.rows().cols(); ++c) row.push_back(f.rows()(r, c));
      rows.push_back(row);
    }
    frames.push_back(rows);
  }
  return {{"d", dict.d}, {"k", dict.k}, {"s", dict.s}, {"frames", frames}, {"offsets", dict.offset_grid}};
}

Dictionary dictionary_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const int k = j.at("k").get<int>();
  check_dimensions(d, k);
  std::vector<Frame> frames;
  for (const auto& rows : j.at("frames")) {
    const auto data = rows.get<std::vector<std::vector<double>>>();
    if (static_cast<int>(data.size()) != d - k) throw DomainError("dictionary frame must have d-k rows");
    Eigen::MatrixXd m(d - k, d);
    for (int r = 0; r < d - k; ++r) {
      if (static_cast<int>(data[static_cast<std::size_t>(r)].size()) != d) {
        throw DomainError("dictionary frame rows must have d entries");
      }
      for (int c = 0; c < d; ++c) m(r, c) = data[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    frames.emplace_back(d, k, std::move(m));
  }
  return build_dictionary(frames, j.at("offsets").get<std::vector<std::vector<double>>>(), j.at("s").get<double>(), d,
                          k);
}

nlohmann::json to_json(const LassoProblem& p) {
  std::vector<std::vector<double>> gram(static_cast<std::size_t>(p.gram.rows()));
  for (Eigen::Index r = 0; r < p.gram.rows(); ++r)
    for (Eigen::Index c = 0; c < p.gram.cols(); ++c) gram[static_cast<std::size_t>(r)].push_back(p.gram(r, c));
  return {{"gram", gram},
          {"y", std::vector<double>(p.y.data(), p.y.data() + p.y.size())},
          {"lambda", p.lambda},
          {"tol", p.tol},
          {"max_iter", p.max_iter}};
}

LassoProblem problem_from_json(const nlohmann::json& j) {
  const auto gram = j.at("gram").get<std::vector<std::vector<double>>>();
  const auto y = j.at("y").get<std::vector<double>>();
  LassoProblem p;
  const std::size_t cols = gram.empty() ? 0 : gram.front().size();
  p.gram.resize(static_cast<Eigen::Index>(gram.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < gram.size(); ++r) {
    if (gram[r].size() != cols) throw DomainError("lasso gram rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) p.gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = gram[r][c];
  }
  p.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  p.lambda = j.at("lambda").get<double>();
  p.tol = j.value("tol", p.tol);
  p.max_iter = j.value("max_iter", p.max_iter);
  p.validate();
  return p;
}

nlohmann::json to_json(const LassoResult& r) {
  const std::vector<double> a(r.a.data(), r.a.data() + r.a.size());
  return {{"coefficients", a},
          {"support", support(a)},
          {"objective", r.objective},
          {"initial_objective", r.initial_objective},
          {"reg_cost", reg_cost(a)},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

}  // namespace kplane

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kplane/analytic.hpp"
#include "kplane/errors.hpp"
#include "kplane/filters.hpp"
#include "kplane/isotropy.hpp"
#include "kplane/parallel.hpp"
#include "kplane/sparse.hpp"
#include "kplane/transform.hpp"

namespace py = pybind11;
using namespace kplane;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
  Array out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> from_array(const Array& a, std::size_t expected) {
  if (static_cast<std::size_t>(a.size()) != expected) {
    throw DomainError("array has " + std::to_string(a.size()) + " entries, expected " + std::to_string(expected));
  }
  return {a.data(), a.data() + a.size()};
}

std::vector<py::ssize_t> shape_of(const GridSpec& g) { return {g.shape.begin(), g.shape.end()}; }

std::vector<py::ssize_t> shape_of(const Sinogram& s) {
  std::vector<py::ssize_t> out{static_cast<py::ssize_t>(s.frames.size())};
  out.insert(out.end(), s.t_grid.shape.begin(), s.t_grid.shape.end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "k-plane transform core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("sphere_area", &sphere_area, py::arg("n"));
  m.def("c_constant", &c_constant, py::arg("d"), py::arg("k"));
  m.def("stiefel_total_mass", &stiefel_total_mass, py::arg("d"), py::arg("k"));
  m.def("set_thread_count", &set_thread_count, py::arg("n"));
  m.def("thread_count", &thread_count);

  py::class_<Frame>(m, "Frame")
      .def(py::init<int, int, Eigen::MatrixXd>(), py::arg("d"), py::arg("k"), py::arg("rows"))
      .def_property_readonly("d", &Frame::d)
      .def_property_readonly("k", &Frame::k)
      .def_property_readonly("rows", &Frame::rows)
      .def("__repr__", [](const Frame& f) {
        return "Frame(d=" + std::to_string(f.d()) + ", k=" + std::to_string(f.k()) + ")";
      });
  m.def("circle_frame", &circle_frame, py::arg("theta"));
  m.def(
      "haar_frame_sample", [](int d, int k, std::uint64_t seed, std::uint64_t stream) {
        return haar_frame_sample(d, k, RngSeed{seed, stream});
      },
      py::arg("d"), py::arg("k"), py::arg("seed"), py::arg("stream") = 0);
  m.def("chordal_distance", &chordal_distance);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](std::vector<double> origin, double spacing, std::vector<int> shape) {
             GridSpec g{std::move(origin), spacing, std::move(shape)};
             g.validate();
             return g;
           }),
           py::arg("origin"), py::arg("spacing"), py::arg("shape"))
      .def_static("centered", &GridSpec::centered, py::arg("dim"), py::arg("n"), py::arg("spacing"))
      .def_readonly("origin", &GridSpec::origin)
      .def_readonly("spacing", &GridSpec::spacing)
      .def_readonly("shape", &GridSpec::shape)
      .def_property_readonly("dim", &GridSpec::dim)
      .def("size", &GridSpec::size)
      .def(py::self == py::self);

  py::class_<GridField>(m, "GridField")
      .def(py::init([](const GridSpec& g, const Array& values) {
             return GridField(g, from_array(values, g.size()));
           }),
           py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &GridField::grid)
      .def_property_readonly("values", [](const GridField& f) { return to_array(f.values, shape_of(f.grid)); });

  py::enum_<Interp>(m, "Interp").value("Linear", Interp::Linear).value("Cubic", Interp::Cubic);

  py::class_<QuadSpec>(m, "QuadSpec")
      .def(py::init([](double L, int nodes, Interp interp) {
             QuadSpec q{L, nodes, interp};
             q.validate();
             return q;
           }),
           py::arg("L") = 6.0, py::arg("nodes") = 128, py::arg("interp") = Interp::Cubic)
      .def_static("defaults_for", &QuadSpec::defaults_for)
      .def_readonly("halfwidth", &QuadSpec::halfwidth)
      .def_readonly("nodes_per_axis", &QuadSpec::nodes_per_axis)
      .def_readonly("interp", &QuadSpec::interp);

  py::class_<Sinogram>(m, "Sinogram")
      .def(py::init([](int d, int k, std::vector<Frame> frames, const GridSpec& t_grid, const Array& values) {
             Sinogram s(d, k, std::move(frames), t_grid);
             s.values = from_array(values, s.values.size());
             s.validate();
             return s;
           }),
           py::arg("d"), py::arg("k"), py::arg("frames"), py::arg("t_grid"), py::arg("values"))
      .def_readonly("d", &Sinogram::d)
      .def_readonly("k", &Sinogram::k)
      .def_readonly("frames", &Sinogram::frames)
      .def_readonly("t_grid", &Sinogram::t_grid)
      .def_property_readonly("values", [](const Sinogram& s) { return to_array(s.values, shape_of(s)); });

  py::class_<FrameSet>(m, "FrameSet")
      .def_static("circle", &FrameSet::circle, py::arg("count"))
      .def_static(
          "monte_carlo",
          [](int d, int k, int count, std::uint64_t seed) { return FrameSet::monte_carlo(d, k, count, {seed, 0}); },
          py::arg("d"), py::arg("k"), py::arg("count"), py::arg("seed"))
      .def_static("from_frames", &FrameSet::from)
      .def_readonly("frames", &FrameSet::frames)
      .def("__len__", [](const FrameSet& f) { return f.frames.size(); });

  m.def("default_t_grid", &default_t_grid, py::arg("field_grid"), py::arg("d"), py::arg("k"));
  m.def(
      "forward",
      [](const GridField& f, const FrameSet& frames, const GridSpec& t_grid, const QuadSpec& quad) {
        py::gil_scoped_release release;
        return forward(f, frames, t_grid, quad);
      },
      py::arg("field"), py::arg("frames"), py::arg("t_grid"), py::arg("quad"));
  m.def(
      "backproject",
      [](const Sinogram& s, const GridSpec& grid) {
        py::gil_scoped_release release;
        return backproject(s, grid);
      },
      py::arg("sinogram"), py::arg("grid"));
  m.def(
      "fbp",
      [](const Sinogram& s, const GridSpec& grid, double pad) {
        py::gil_scoped_release release;
        return fbp(s, s.d, s.k, grid, pad);
      },
      py::arg("sinogram"), py::arg("grid"), py::arg("pad_factor") = 2.0);
  m.def("calibrate_gain", &calibrate_gain, py::arg("d"), py::arg("k"), py::arg("frames"), py::arg("grid"),
        py::arg("t_grid"), py::arg("quad"), py::arg("pad_factor") = 2.0);
  m.def("relative_l2", [](const Array& a, const Array& b) {
    return relative_l2(std::span<const double>(a.data(), a.size()), std::span<const double>(b.data(), b.size()));
  });
  m.def("moment_integral", &moment_integral, py::arg("sinogram"), py::arg("axis"), py::arg("order"));

  m.def(
      "gaussian_kplane",
      [](const Frame& a, std::vector<double> t, std::vector<double> x0) { return gaussian_kplane(a, t, x0); },
      py::arg("frame"), py::arg("t"), py::arg("x0"));
  m.def(
      "gaussian_field",
      [](const GridSpec& g, std::vector<double> mean) {
        return GridField::sample(g, [&](std::span<const double> x) { return gaussian_density(x, mean); });
      },
      py::arg("grid"), py::arg("mean"));
  m.def("bessel_j", &bessel_j, py::arg("nu"), py::arg("x"));
  m.def("green_rbf_value", &green_rbf_value, py::arg("s"), py::arg("n"), py::arg("r"));

  m.def(
      "project_iso",
      [](const Sinogram& s, int n_rotations, std::uint64_t seed) { return project_iso(s, n_rotations, {seed, 0}); },
      py::arg("sinogram"), py::arg("n_rotations") = 64, py::arg("seed") = 0);

  m.def(
      "solve_lasso",
      [](Eigen::MatrixXd gram, Eigen::VectorXd y, double lambda, double tol, int max_iter) {
        LassoProblem p{std::move(gram), std::move(y), lambda, tol, max_iter};
        LassoResult r;
        {
          py::gil_scoped_release release;
          r = solve_lasso(p);
        }
        const KktReport kkt = kkt_report(p, r.a);
        py::dict out;
        out["a"] = r.a;
        out["objective"] = r.objective;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["kkt_violation"] = kkt.violation();
        return out;
      },
      py::arg("gram"), py::arg("y"), py::arg("lam"), py::arg("tol") = 1e-8, py::arg("max_iter") = 20000);

  m.def("write_kpt", py::overload_cast<const std::filesystem::path&, const GridField&>(&write_kpt));
  m.def("write_kpt", py::overload_cast<const std::filesystem::path&, const Sinogram&>(&write_kpt));
  m.def("read_kpt", [](const std::filesystem::path& p) -> py::object {
    KptObject obj = read_kpt(p);
    if (auto* f = std::get_if<GridField>(&obj)) return py::cast(std::move(*f));
    return py::cast(std::get<Sinogram>(std::move(obj)));
  });
}

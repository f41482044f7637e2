#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "onionlab/error.hpp"
#include "onionlab/experiments.hpp"
#include "onionlab/hull.hpp"
#include "onionlab/io.hpp"
#include "onionlab/parabolic.hpp"
#include "onionlab/parabolic_estimators.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"

namespace py = pybind11;
using namespace onionlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud to_cloud(const Array& a, std::optional<std::vector<PointId>> ids) {
  if (a.ndim() != 2) throw InvalidInput("points must be a 2-d array of shape (n, d)");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const int d = static_cast<int>(a.shape(1));
  std::vector<double> coords(a.data(), a.data() + n * d);
  std::vector<PointId> id;
  if (ids) {
    id = *ids;
  } else {
    id.resize(n);
    for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<PointId>(i);
  }
  return PointCloud(d, std::move(id), std::move(coords));
}

Array coords_of(const PointCloud& c) {
  Array out({static_cast<py::ssize_t>(c.size()), static_cast<py::ssize_t>(c.dim())});
  std::copy(c.coords().begin(), c.coords().end(), out.mutable_data());
  return out;
}

py::object fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(r.numerator(), r.denominator());
}

}  // namespace

PYBIND11_MODULE(_onionlab, m) {
  m.doc() = "Convex hull peeling, parabolic hull peeling and Monte Carlo experiments";
  m.attr("__version__") = ONIONLAB_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DegenerateHull>(m, "DegenerateHull", base.ptr());
  py::register_exception<PolePoint>(m, "PolePoint", base.ptr());
  py::register_exception<UnknownId>(m, "UnknownId", base.ptr());
  py::register_exception<GeneralPositionViolated>(m, "GeneralPositionViolated", base.ptr());
  py::register_exception<WindowTooSmall>(m, "WindowTooSmall", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const Array& a, std::optional<std::vector<PointId>> ids) { return to_cloud(a, ids); }),
           py::arg("points"), py::arg("ids") = py::none())
      .def_property_readonly("dim", &PointCloud::dim)
      .def_property_readonly("ids", &PointCloud::ids)
      .def_property_readonly("coords", &coords_of)
      .def("__len__", &PointCloud::size);

  py::class_<FaceLattice>(m, "FaceLattice")
      .def_readonly("dim_ambient", &FaceLattice::dim_ambient)
      .def_readonly("dim_hull", &FaceLattice::dim_hull)
      .def_readonly("faces", &FaceLattice::faces)
      .def_readonly("degenerate", &FaceLattice::degenerate)
      .def("vertices", &FaceLattice::vertices)
      .def("face_counts", [](const FaceLattice& l) { return k_face_counts(l); })
      .def("to_json", &face_lattice_json);

  m.def("convex_hull", [](const PointCloud& c) { return convex_hull(c); });

  py::class_<PeelingDiagram>(m, "PeelingDiagram")
      .def_readonly("cloud", &PeelingDiagram::cloud)
      .def_readonly("labels", &PeelingDiagram::labels)
      .def_readonly("layers", &PeelingDiagram::layers)
      .def_readonly("n_layers", &PeelingDiagram::n_layers)
      .def_readonly("complete", &PeelingDiagram::complete)
      .def("layer_of", &PeelingDiagram::layer_of)
      .def("to_json", [](const PeelingDiagram& dg, int stats_layers, int mc_directions) {
        return diagram_json(dg, layer_stats(dg, stats_layers, mc_directions));
      }, py::arg("stats_layers") = 5, py::arg("mc_directions") = 0);

  m.def("peel", [](const PointCloud& c, int max_layers) {
    PeelOptions o;
    o.max_layers = max_layers;
    return peel(c, o);
  }, py::arg("cloud"), py::arg("max_layers") = 0);
  m.def("layer_index", [](const std::vector<double>& x, const PointCloud& c) { return layer_index(x, c); });
  m.def("score", [](PointId id, const PeelingDiagram& dg, int n, int k) { return fraction(score(id, dg, n, k)); });

  m.def("sample_ball_poisson", [](int d, double lambda, std::uint64_t seed, std::uint64_t rep) {
    return sample_ball_poisson(d, lambda, {seed, rep});
  }, py::arg("d"), py::arg("lam"), py::arg("seed") = 0, py::arg("replication") = 0);
  m.def("sample_halfspace_poisson", [](int d, double r, double H, double intensity, std::uint64_t seed, std::uint64_t rep) {
    return sample_halfspace_poisson(d - 1, r, H, intensity, {seed, rep});
  }, py::arg("d"), py::arg("r"), py::arg("H"), py::arg("intensity") = 1.0, py::arg("seed") = 0, py::arg("replication") = 0);

  m.def("rescale_point", [](const std::vector<double>& x, double lambda) { return rescale_point(x, lambda); });
  m.def("unrescale_point", [](const std::vector<double>& w, double lambda) { return unrescale_point(w, lambda); });
  m.def("rescale", [](const PointCloud& c, double lambda) { return to_rescaled(c, lambda).points; });
  m.def("in_cap", [](const std::vector<double>& x, const std::vector<double>& x0) { return in_cap(x, x0); });
  m.def("intensity_density", [](const std::vector<double>& v, double h, double lambda, int d) {
    return intensity_density(v, h, lambda, d);
  });

  py::class_<Window>(m, "Window")
      .def(py::init([](double r, double H, double r_inner) { return Window{r, H, r_inner}; }), py::arg("r") = 8.0,
           py::arg("H") = 20.0, py::arg("r_inner") = 1.0)
      .def_static("with_defaults", &Window::with_defaults)
      .def_readwrite("r", &Window::r)
      .def_readwrite("H", &Window::H)
      .def_readwrite("r_inner", &Window::r_inner);

  py::class_<ParabolicDiagram>(m, "ParabolicDiagram")
      .def_readonly("labels", &ParabolicDiagram::labels)
      .def_readonly("n_layers", &ParabolicDiagram::n_layers)
      .def_readonly("layers", &ParabolicDiagram::layers)
      .def("layer_of", &ParabolicDiagram::layer_of);
  m.def("parabolic_peel", &parabolic_peel, py::arg("cloud"), py::arg("window"), py::arg("max_layers") = 0);
  m.def("parabolic_layer_index", [](const std::vector<double>& w, const PointCloud& c, const Window& win) {
    return parabolic_layer_index(w, c, win);
  });
  m.def("criterion_check", [](const std::vector<double>& w, const PointCloud& c, int n) { return criterion_check(w, c, n); });
  m.def("limit_score", [](double h0, const PointCloud& c, const Window& w, int n, int k) {
    return fraction(limit_score(h0, c, w, n, k));
  });
  m.def("tree_fixture", &tree_fixture);
  m.def("tree_fixture_depths", &tree_fixture_depths);

  py::enum_<Model>(m, "Model").value("BALL", Model::Ball).value("PARABOLIC", Model::Parabolic);
  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def(py::init<>())
      .def_readwrite("model", &ExperimentPlan::model)
      .def_readwrite("d", &ExperimentPlan::d)
      .def_readwrite("n_max", &ExperimentPlan::n_max)
      .def_readwrite("k_set", &ExperimentPlan::k_set)
      .def_readwrite("lambda_grid", &ExperimentPlan::lambda_grid)
      .def_readwrite("replications", &ExperimentPlan::replications)
      .def_readwrite("seed", &ExperimentPlan::seed)
      .def_readwrite("volumes", &ExperimentPlan::volumes)
      .def_readwrite("mc_directions", &ExperimentPlan::mc_directions)
      .def_readwrite("full_peel", &ExperimentPlan::full_peel)
      .def_readwrite("threads", &ExperimentPlan::threads)
      .def("validate", &ExperimentPlan::validate)
      .def("to_json", &plan_json);
  m.def("load_plan", &load_plan);

  py::class_<SlopeFit>(m, "SlopeFit")
      .def_readonly("slope", &SlopeFit::slope)
      .def_readonly("intercept", &SlopeFit::intercept)
      .def_readonly("se", &SlopeFit::se)
      .def_readonly("half_width", &SlopeFit::half_width);
  py::class_<ConstantEstimate>(m, "ConstantEstimate")
      .def_readonly("value", &ConstantEstimate::value)
      .def_readonly("se", &ConstantEstimate::se)
      .def_readonly("ci_low", &ConstantEstimate::ci_low)
      .def_readonly("ci_high", &ConstantEstimate::ci_high)
      .def_readonly("diagnostic", &ConstantEstimate::diagnostic)
      .def_readonly("stable", &ConstantEstimate::stable);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("plan", &ExperimentResult::plan)
      .def("values", [](const ExperimentResult& r, std::size_t block, int n, int k) {
        return replicate_values(r.blocks.at(block), Quantity::Faces, n, k);
      })
      .def("rows", [](const ExperimentResult& r) {
        py::list out;
        for (const auto& row : result_rows(r)) {
          py::dict dct;
          dct["model"] = row.model;
          dct["d"] = row.d;
          dct["n"] = row.n;
          dct["k"] = row.k;
          dct["lambda"] = row.lambda;
          dct["stat"] = row.stat;
          dct["value"] = row.value;
          dct["stderr"] = row.stderr_;
          dct["reps"] = row.reps;
          out.append(dct);
        }
        return out;
      })
      .def("summary_json", &result_summary_json);

  m.def("run_ball_sweep", [](const ExperimentPlan& p) {
    py::gil_scoped_release release;
    return run_ball_sweep(p);
  });
  m.def("fit_face_slope", [](const ExperimentResult& r, int n, int k, bool variance) {
    return fit_slope(r, Quantity::Faces, variance ? Stat::Variance : Stat::Mean, n, k);
  }, py::arg("result"), py::arg("n"), py::arg("k") = 0, py::arg("variance") = false);
  m.def("estimate_constant_ball", [](const ExperimentResult& r, int n, int k) { return estimate_constant_ball(r, n, k); });
  m.def("ks_standard_normal", [](const std::vector<double>& v) { return ks_standard_normal(v); });
}

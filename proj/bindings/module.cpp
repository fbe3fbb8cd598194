// Python bindings: fields are numpy arrays of shape (*samples, *components),
// charts are sequences of (min, max, samples).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "minkembed/alignment.hpp"
#include "minkembed/error.hpp"
#include "minkembed/fixtures.hpp"
#include "minkembed/grid.hpp"
#include "minkembed/hypersurface.hpp"
#include "minkembed/lorentz.hpp"
#include "minkembed/manifold.hpp"
#include "minkembed/pfaff.hpp"
#include "minkembed/version.hpp"

namespace py = pybind11;
using namespace minkembed;

namespace {

using AxisTuple = std::tuple<double, double, std::size_t>;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridChart make_chart(const std::vector<AxisTuple>& axes) {
  std::vector<Axis> out;
  for (const auto& [lo, hi, n] : axes) out.push_back(Axis{lo, hi, n});
  return GridChart(std::move(out));
}

std::vector<AxisTuple> chart_tuple(const GridChart& c) {
  std::vector<AxisTuple> out;
  for (const auto& a : c.axes()) out.emplace_back(a.min, a.max, a.samples);
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

TensorField to_field(const GridChart& chart, const Array& a, std::size_t rank) {
  if (a.ndim() != static_cast<py::ssize_t>(chart.dim() + rank))
    throw py::value_error("array rank must be the chart dimension plus the tensor rank");
  for (std::size_t i = 0; i < chart.dim(); ++i)
    if (static_cast<std::size_t>(a.shape(i)) != chart.axis(i).samples)
      throw py::value_error("leading array dimensions must match the chart samples");
  std::vector<std::size_t> shape;
  for (std::size_t i = 0; i < rank; ++i) shape.push_back(a.shape(chart.dim() + i));
  return TensorField(chart, std::move(shape), std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_field(const TensorField& f) {
  std::vector<py::ssize_t> shape;
  for (const auto& ax : f.chart().axes()) shape.push_back(static_cast<py::ssize_t>(ax.samples));
  for (auto s : f.shape()) shape.push_back(static_cast<py::ssize_t>(s));
  Array out(shape);
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const ResidualReport& r) {
  py::dict per;
  for (const auto& s : r.per_equation) per[py::str(s.label)] = py::make_tuple(s.max_abs, s.lp_norm);
  py::dict d;
  d["max_abs"] = r.max_abs;
  d["lp_norm"] = r.lp_norm;
  d["p"] = r.p;
  d["per_equation"] = per;
  return d;
}

MultiIndex base_or_center(const GridChart& c, const std::optional<MultiIndex>& x) { return x ? *x : c.center(); }

FundamentalForms make_forms(const std::vector<AxisTuple>& axes, const Array& g, const Array& k, int lambda) {
  const GridChart c = make_chart(axes);
  return {c, to_field(c, g, 2), to_field(c, k, 2), lambda};
}

py::dict rigged_dict(const RiggedImmersionResult& r) {
  py::dict d;
  d["f"] = from_field(r.f);
  d["rigging"] = from_field(r.rigging);
  d["frame"] = from_field(r.frame);
  d["base_point"] = r.base_point;
  d["min_frame_det"] = r.min_frame_det;
  return d;
}

}  // namespace

PYBIND11_MODULE(_minkembed, m) {
  m.doc() = "Isometric immersions into Minkowski space from gridded data";
  m.attr("__version__") = kVersion;

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&] { return py::object(py::exception<Error>(m, "MinkembedError", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(std::string(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("point") = e.point() ? py::cast(*e.point()) : py::none();
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.def("lorentz_decompose", [](const Array& g, double epsilon) {
    return from_matrix(lorentz_decompose(certify_lorentz(SymMatrix::from_matrix(to_matrix(g)), epsilon)).base_f);
  }, py::arg("g"), py::arg("epsilon"), "F with F^T eta F = G for a certified Lorentzian matrix.");

  m.def("lorentz_decompose_anchored", [](const Array& anchor, const Array& g, double epsilon) {
    const auto a = lorentz_decompose(certify_lorentz(SymMatrix::from_matrix(to_matrix(anchor)), epsilon));
    return from_matrix(lorentz_decompose_anchored(a, certify_lorentz(SymMatrix::from_matrix(to_matrix(g)), epsilon)));
  }, py::arg("anchor"), py::arg("g"), py::arg("epsilon"));

  m.def("lipschitz_constant", &lipschitz_constant, py::arg("epsilon"), py::arg("n"));

  m.def("fixture_names", &fixture_names);

  m.def("generate", [](const std::string& name, std::size_t samples, const FixtureParams& params,
                       std::optional<std::vector<AxisTuple>> axes, std::size_t dim) {
    const GridChart c = axes ? make_chart(*axes) : default_chart(name, samples, dim);
    const Fixture fx = generate_fixture(name, params, c);
    py::dict d;
    d["axes"] = chart_tuple(c);
    d["params"] = fx.params;
    for (const auto& [key, f] : fx.fields) d[py::str(key)] = from_field(f);
    if (fx.lambda != 0) d["lambda"] = fx.lambda;
    return d;
  }, py::arg("name"), py::arg("samples") = 33, py::arg("params") = FixtureParams{}, py::arg("axes") = py::none(),
     py::arg("dim") = 2, "Sample a fixture; returns a dict with axes, params, g (and K, lambda).");

  m.def("christoffel", [](const std::vector<AxisTuple>& axes, const Array& g) {
    const GridChart c = make_chart(axes);
    return from_field(christoffel(to_field(c, g, 2)));
  }, py::arg("axes"), py::arg("g"));

  m.def("flatness_residual", [](const std::vector<AxisTuple>& axes, const Array& g, double p) {
    const GridChart c = make_chart(axes);
    return report_dict(flatness_residual(to_field(c, g, 2), p));
  }, py::arg("axes"), py::arg("g"), py::arg("p") = 4.0);

  m.def("frame_compatibility_residual", [](const std::vector<AxisTuple>& axes, const Array& g, double p) {
    const GridChart c = make_chart(axes);
    return report_dict(pfaff_compatibility_residual(PfaffCoeffs::from_christoffel(christoffel(to_field(c, g, 2))), p));
  }, py::arg("axes"), py::arg("g"), py::arg("p") = 4.0, "Compatibility residual of dF = F Gamma.");

  m.def("immerse_manifold", [](const std::vector<AxisTuple>& axes, const Array& g, double epsilon,
                               std::optional<MultiIndex> x_star, double p) {
    const GridChart c = make_chart(axes);
    const TensorField gf = to_field(c, g, 2);
    const auto r = immerse_manifold(gf, base_or_center(c, x_star), epsilon);
    const auto iso = isometry_residual(r, gf, p);
    py::dict d;
    d["f"] = from_field(r.f);
    d["frame"] = from_field(r.frame);
    d["base_point"] = r.base_point;
    d["base_frame"] = from_matrix(r.base_frame);
    d["min_frame_det"] = r.min_frame_det;
    d["isometry_recomputed"] = report_dict(iso.recomputed);
    d["isometry_stored"] = report_dict(iso.stored);
    return d;
  }, py::arg("axes"), py::arg("g"), py::arg("epsilon") = 0.1, py::arg("x_star") = py::none(), py::arg("p") = 4.0);

  m.def("classical_gc_residual", [](const std::vector<AxisTuple>& axes, const Array& g, const Array& k, int lambda,
                                    double p) {
    return report_dict(classical_gc_residual(make_forms(axes, g, k, lambda), p));
  }, py::arg("axes"), py::arg("g"), py::arg("k"), py::arg("lambda_") = -1, py::arg("p") = 4.0);

  m.def("immerse_hypersurface_forms", [](const std::vector<AxisTuple>& axes, const Array& g, const Array& k,
                                         int lambda, double epsilon, std::optional<MultiIndex> x_star, double p) {
    const FundamentalForms forms = make_forms(axes, g, k, lambda);
    const auto r = immerse_hypersurface_forms(forms, base_or_center(forms.chart, x_star), epsilon);
    py::dict d = rigged_dict(r);
    d["defect"] = report_dict(fundamental_form_defect(r, forms, p));
    return d;
  }, py::arg("axes"), py::arg("g"), py::arg("k"), py::arg("lambda_") = -1, py::arg("epsilon") = 0.5,
     py::arg("x_star") = py::none(), py::arg("p") = 4.0);

  m.def("align_manifold", [](const std::vector<AxisTuple>& axes, const Array& g1, const Array& g2, double epsilon,
                             double p) {
    const GridChart c = make_chart(axes);
    const TensorField a = to_field(c, g1, 2), b = to_field(c, g2, 2);
    const auto res = align_manifold(immerse_manifold(a, c.center(), epsilon), immerse_manifold(b, c.center(), epsilon),
                                    a, b, p, epsilon);
    py::dict d;
    d["q"] = from_matrix(res.map.q);
    d["v"] = res.map.v;
    d["aligned_gap_w2p"] = res.aligned_gap_w2p;
    d["aligned_gap_max"] = res.aligned_gap_max;
    d["input_gap"] = res.input_gap;
    return d;
  }, py::arg("axes"), py::arg("g1"), py::arg("g2"), py::arg("epsilon") = 0.1, py::arg("p") = 4.0,
     "Reconstruct both metrics at the chart centre and align them.");

  m.def("sobolev_gap", [](const std::vector<AxisTuple>& axes, const Array& f1, const Array& f2, int order, double p) {
    const GridChart c = make_chart(axes);
    const std::size_t rank = static_cast<std::size_t>(f1.ndim()) - c.dim();
    return sobolev_gap(to_field(c, f1, rank), to_field(c, f2, rank), order, p);
  }, py::arg("axes"), py::arg("f1"), py::arg("f2"), py::arg("order"), py::arg("p") = 4.0);
}

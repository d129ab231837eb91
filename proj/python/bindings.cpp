#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "freqlab/fields.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/report.hpp"
#include "freqlab/solver.hpp"

namespace py = pybind11;
using namespace freqlab;

namespace {

Point to_point(const std::vector<double>& v) {
  if (v.size() != 2 && v.size() != 3)
    throw ParameterError("point must have 2 or 3 coordinates");
  Point p;
  p.n = static_cast<int>(v.size());
  for (int i = 0; i < p.n; ++i) p[i] = v[static_cast<size_t>(i)];
  return p;
}

std::vector<double> from_point(const Point& p) {
  std::vector<double> v(static_cast<size_t>(p.n));
  for (int i = 0; i < p.n; ++i) v[static_cast<size_t>(i)] = p[i];
  return v;
}

Equation parse_equation(const std::string& name, const std::vector<double>& b, double p,
                        double eps) {
  if (name == "laplace") return EquationLaplace{};
  if (name == "drift") return EquationDrift{to_point(b)};
  if (name == "plaplace") return EquationPLaplace{p, eps};
  throw ParameterError("equation must be laplace, drift or plaplace");
}

QuadOptions quad_opts(int order2d, int order3d, int radial) {
  QuadOptions q;
  q.order2d = order2d;
  q.order3d = order3d;
  q.radial_nodes = radial;
  return q;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "freqlab: Almgren-type frequency functions, radial sweeps and "
            "verification checks over exact and grid-backed fields";

  py::register_exception<Error>(m, "FreqlabError");

  py::class_<ScalarField>(m, "ScalarField")
      .def_property_readonly("dim", &ScalarField::dim)
      .def_property_readonly("name", &ScalarField::name)
      .def("value", [](const ScalarField& f, const std::vector<double>& x) {
        return f.value(to_point(x));
      })
      .def("gradient", [](const ScalarField& f, const std::vector<double>& x) {
        return from_point(f.gradient(to_point(x)));
      })
      .def("laplacian", [](const ScalarField& f, const std::vector<double>& x) {
        return f.laplacian(to_point(x));
      })
      .def("eval", [](const ScalarField& f, const std::vector<double>& x) {
        EvalBundle e = f.eval(to_point(x));
        return py::make_tuple(e.u, from_point(e.grad), e.lap);
      })
      .def("admissible", [](const ScalarField& f, const std::vector<double>& x) {
        return f.admissible(to_point(x));
      })
      .def("__repr__", [](const ScalarField& f) { return "<ScalarField " + f.name() + ">"; });

  m.def("make_field", &parse_field, py::arg("name"),
        "Build a field from a catalog name, e.g. 'harmonic:2d:k=3:cos'");
  m.def("field_catalog", &field_catalog);
  m.def("scaled", &make_scaled, py::arg("field"), py::arg("tau"));

  m.def(
      "pde_residual",
      [](const ScalarField& f, const std::vector<double>& x, const std::string& equation,
         const std::vector<double>& b, double p, double eps) {
        return pde_residual(f, to_point(x), parse_equation(equation, b, p, eps));
      },
      py::arg("field"), py::arg("x"), py::arg("equation") = "laplace",
      py::arg("b") = std::vector<double>{0.0, 0.0}, py::arg("p") = 2.0, py::arg("eps") = 0.0);

  py::class_<RadialSample>(m, "RadialSample")
      .def_readonly("r", &RadialSample::r)
      .def_readonly("mass", &RadialSample::mass)
      .def_readonly("dirichlet", &RadialSample::dirichlet)
      .def_readonly("flux", &RadialSample::flux)
      .def_readonly("grad_sq_surf", &RadialSample::grad_sq_surf)
      .def_readonly("normal_sq_surf", &RadialSample::normal_sq_surf)
      .def_readonly("mass_p", &RadialSample::mass_p)
      .def_readonly("dirichlet_p", &RadialSample::dirichlet_p)
      .def_readonly("ok", &RadialSample::ok)
      .def_readonly("error", &RadialSample::error);

  py::class_<RadialProfile>(m, "RadialProfile")
      .def_readonly("n", &RadialProfile::n)
      .def_readonly("samples", &RadialProfile::samples)
      .def("radii", [](const RadialProfile& p) {
        std::vector<double> out;
        for (const auto& s : p.samples) out.push_back(s.r);
        return out;
      })
      .def("frequencies", [](const RadialProfile& p, const std::string& kind) {
        std::vector<std::optional<double>> out;
        for (const auto& s : p.samples) out.push_back(frequency_value(s, parse_kind(kind)));
        return out;
      });

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("name", &VerificationReport::name)
      .def_readonly("lhs", &VerificationReport::lhs)
      .def_readonly("rhs", &VerificationReport::rhs)
      .def_readonly("margin", &VerificationReport::margin)
      .def_readonly("tolerance", &VerificationReport::tolerance)
      .def_readonly("passed", &VerificationReport::passed)
      .def_readonly("details", &VerificationReport::details)
      .def("__repr__", [](const VerificationReport& r) {
        return "<VerificationReport " + r.name + (r.passed ? " PASS" : " FAIL") + ">";
      });

  py::class_<DriftConstants>(m, "DriftConstants")
      .def_readonly("r2", &DriftConstants::r2)
      .def_readonly("alpha", &DriftConstants::alpha)
      .def_readonly("beta", &DriftConstants::beta);

  m.def(
      "radial_moments",
      [](const ScalarField& f, const std::vector<double>& center, double r,
         std::optional<double> p, int order2d, int order3d, int radial) {
        return radial_moments(f, to_point(center), r, p, quad_opts(order2d, order3d, radial));
      },
      py::arg("field"), py::arg("center"), py::arg("r"), py::arg("p") = py::none(),
      py::arg("order2d") = 128, py::arg("order3d") = 32, py::arg("radial_nodes") = 64);

  m.def(
      "sweep_profile",
      [](const ScalarField& f, const std::vector<double>& center,
         const std::vector<double>& radii, std::optional<double> p, int order2d, int order3d,
         int radial, int threads) {
        return sweep_profile(f, to_point(center), radii, p,
                             quad_opts(order2d, order3d, radial), threads);
      },
      py::arg("field"), py::arg("center"), py::arg("radii"), py::arg("p") = py::none(),
      py::arg("order2d") = 128, py::arg("order3d") = 32, py::arg("radial_nodes") = 64,
      py::arg("threads") = 0);

  m.def("frequency_value",
        [](const RadialSample& s, const std::string& kind) {
          return frequency_value(s, parse_kind(kind));
        },
        py::arg("sample"), py::arg("kind") = "classical");

  m.def("drift_constants", &drift_constants, py::arg("m_bound"), py::arg("poincare"),
        py::arg("n"), py::arg("safety"),
        py::arg("r_cap") = std::numeric_limits<double>::infinity());

  m.def("identity_checks", &identity_checks, py::arg("profile"),
        py::arg("include_hardt_lin") = true);
  m.def("check_monotone_F", &check_monotone_F, py::arg("profile"), py::arg("tol") = 1e-9);
  m.def("check_harnack", &check_harnack, py::arg("profile"), py::arg("s"), py::arg("t"),
        py::arg("rel_tol") = 1e-9);
  m.def("representation_I", &representation_I, py::arg("profile"), py::arg("r"), py::arg("R"),
        py::arg("rel_tol") = 1e-6);
  m.def(
      "vanishing_order",
      [](const RadialProfile& profile, double R, double tol) {
        auto vo = vanishing_order(profile, R, tol);
        return py::make_tuple(vo.gamma, vo.beta, vo.report);
      },
      py::arg("profile"), py::arg("R"), py::arg("rel_tol") = 1e-9);
  m.def("check_growth_bound", &check_growth_bound, py::arg("profile"), py::arg("constants"),
        py::arg("tol") = 1e-6);
  m.def(
      "check_weak_doubling",
      [](const RadialProfile& profile, double factor) {
        auto wd = check_weak_doubling(profile, factor);
        return py::make_tuple(wd.r_star, wd.report);
      },
      py::arg("profile"), py::arg("factor") = 4.0);
  m.def(
      "check_scaling",
      [](const ScalarField& f, double tau, const std::vector<double>& radii,
         const std::string& kind, std::optional<double> p, double tol) {
        return check_scaling(f, tau, radii, parse_kind(kind), p, tol);
      },
      py::arg("field"), py::arg("tau"), py::arg("radii"), py::arg("kind") = "classical",
      py::arg("p") = py::none(), py::arg("tol") = 1e-9);
  m.def(
      "poincare_ratio",
      [](const ScalarField& f, const std::vector<double>& center, double r, double gamma0,
         double cp, int order2d) {
        QuadOptions quad;
        quad.order2d = order2d;
        auto pr = poincare_ratio(f, to_point(center), r, gamma0, cp, quad);
        return py::make_tuple(pr.ratio, pr.report);
      },
      py::arg("field"), py::arg("center"), py::arg("r"), py::arg("gamma0") = 0.5,
      py::arg("c_p") = 1.0, py::arg("order2d") = 512);
  m.def(
      "rellich_necas_residual",
      [](const ScalarField& f, const std::vector<double>& center, double r) {
        auto res = rellich_necas_residual(f, to_point(center), r);
        return py::make_tuple(res.general, res.harmonic_form, res.scale);
      },
      py::arg("field"), py::arg("center"), py::arg("r"));

  py::class_<GridSolution>(m, "GridSolution")
      .def_readonly("nodes", &GridSolution::nodes)
      .def_readonly("h", &GridSolution::h)
      .def_readonly("residual", &GridSolution::residual)
      .def_readonly("iterations", &GridSolution::iterations)
      .def_readonly("values", &GridSolution::values)
      .def("to_field", [](const GridSolution& s) { return to_field(s); });

  m.def(
      "solve",
      [](const std::string& equation, const std::string& boundary, int nodes, double a,
         double b, const std::vector<double>& bvec, double p, double eps, double tol,
         int max_iter) {
        BVP bvp;
        bvp.a = a;
        bvp.b = b;
        bvp.nodes = nodes;
        bvp.equation = parse_equation(equation, bvec, p, eps);
        ScalarField g = parse_field(boundary);
        bvp.boundary = [g](double x, double y) { return g.value(Point(x, y)); };
        SolveOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        return solve(bvp, opts);
      },
      py::arg("equation"), py::arg("boundary"), py::arg("nodes") = 65, py::arg("a") = 0.0,
      py::arg("b") = 1.0, py::arg("b_vec") = std::vector<double>{0.0, 0.0},
      py::arg("p") = 2.0, py::arg("eps") = 1e-6, py::arg("tol") = 1e-10,
      py::arg("max_iter") = 20000);

  m.def("profile_csv", &profile_csv);
  m.def("render_report", &render_report);
}

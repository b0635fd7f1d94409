#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <memory>
#include <sstream>

#include "cryf/analysis.hpp"
#include "cryf/commands.hpp"
#include "cryf/config.hpp"
#include "cryf/errors.hpp"
#include "cryf/flow.hpp"
#include "cryf/initial_data.hpp"
#include "cryf/snapshot.hpp"

namespace py = pybind11;
using namespace cryf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::shared_ptr<const BaseGeometry> geometry_of(const Array& a) {
  if (a.ndim() != 3) throw ConfigError("expected a 3-d array of shape (N_x, N_y, N_z)");
  GridSpec g{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2))};
  g.validate();
  return std::make_shared<const BaseGeometry>(g);
}

ScalarField field_of(const Array& a) { return ScalarField(std::vector<double>(a.data(), a.data() + a.size())); }

Array to_array(const ScalarField& f, const GridSpec& g) {
  Array out({g.nx, g.ny, g.nz});
  std::copy(f.begin(), f.end(), out.mutable_data());
  return out;
}

ConformalState state_of(const Array& u, double t = 0.0) { return ConformalState(geometry_of(u), field_of(u), t); }

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["E"] = r.E;
  d["vol"] = r.vol;
  d["intR"] = r.intR;
  d["intR2"] = r.intR2;
  d["var"] = r.var;
  d["dEdt_formula"] = r.dE_dt_formula;
  d["min_u"] = r.min_u;
  d["min_R"] = r.min_R;
  d["max_R"] = r.max_R;
  d["dt"] = r.dt_used;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CR Yamabe flow core";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<PositivityError> positivity_error(m, "PositivityError", PyExc_ArithmeticError);
  static py::exception<SnapshotError> snapshot_error(m, "SnapshotError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const PositivityError& e) {
      py::set_error(positivity_error, e.what());
    } catch (const SnapshotError& e) {
      py::set_error(snapshot_error, e.what());
    }
  });

  m.def(
      "initial_data",
      [](int nx, int ny, int nz, const std::string& preset, double c, double epsilon, std::uint64_t seed,
         double amplitude, int smoothing_passes) {
        const GridSpec g{nx, ny, nz};
        g.validate();
        const auto p = parse_preset(preset);
        if (!p) throw ConfigError("unknown preset '" + preset + "'");
        const BaseGeometry geom(g);
        return to_array(make_initial(geom, {*p, c, epsilon, seed, amplitude, smoothing_passes}), g);
      },
      py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("preset") = "constant", py::arg("c") = 1.0,
      py::arg("epsilon") = 0.1, py::arg("seed") = 1, py::arg("amplitude") = 0.3, py::arg("smoothing_passes") = 8,
      "Initial conformal factor for a named preset.");

  m.def(
      "sub_laplacian",
      [](const Array& f) {
        auto g = geometry_of(f);
        return to_array(sub_laplacian_base(*g, field_of(f)), g->grid());
      },
      py::arg("f"));

  m.def(
      "conformal_sub_laplacian",
      [](const Array& u, const Array& f) {
        const ConformalState s = state_of(u);
        return to_array(conformal_sub_laplacian(s, field_of(f)), s.geometry().grid());
      },
      py::arg("u"), py::arg("f"));

  m.def(
      "webster_curvature",
      [](const Array& u) {
        const ConformalState s = state_of(u);
        return to_array(webster_curvature(s), s.geometry().grid());
      },
      py::arg("u"));

  m.def("diagnose", [](const Array& u) { return record_dict(diagnose(state_of(u))); }, py::arg("u"),
        "E, vol, intR, intR2, var, dEdt_formula and extrema for one state.");

  m.def(
      "scale",
      [](const Array& u, double sigma) {
        const ConformalState s = scale_state(state_of(u), sigma);
        return to_array(s.u(), s.geometry().grid());
      },
      py::arg("u"), py::arg("sigma"));

  m.def(
      "pullback",
      [](const Array& u, long long cells) {
        const ConformalState s = pullback_state(state_of(u), cells);
        return to_array(s.u(), s.geometry().grid());
      },
      py::arg("u"), py::arg("cells"));

  m.def(
      "run_flow",
      [](const Array& u, double t_end, double err_tol, double dt_init, double dt_max, int record_every) {
        FlowConfig cfg;
        cfg.t_end = t_end;
        cfg.err_tol = err_tol;
        cfg.dt_init = dt_init;
        cfg.dt_max = dt_max;
        cfg.record_every = record_every;
        const ConformalState s = state_of(u);
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run_flow(s, cfg);
        }
        py::list records;
        for (const DiagnosticsRecord& r : tr.records) records.append(record_dict(r));
        py::dict out;
        out["records"] = records;
        out["termination"] = std::string(to_string(tr.termination));
        out["accepted_steps"] = tr.accepted_steps;
        out["rejected_steps"] = tr.rejected_steps;
        out["violations"] = monotonicity_audit(tr.records).violation_count;
        return out;
      },
      py::arg("u"), py::arg("t_end") = 0.05, py::arg("err_tol") = 1e-8, py::arg("dt_init") = 1e-5,
      py::arg("dt_max") = 1e-3, py::arg("record_every") = 1);

  m.def(
      "check_identities",
      [](const std::string& config_text) {
        py::list rows;
        for (const IdentityResidual& r : identity_residuals(parse_config(config_text))) {
          rows.append(py::make_tuple(r.name, r.value, r.bound, r.pass()));
        }
        return rows;
      },
      py::arg("config_text"), "(name, residual, bound, passed) per identity.");

  m.def(
      "convergence_rows",
      [](const std::string& config_text) {
        py::list rows;
        for (const OrderRow& r : convergence_rows(parse_config(config_text))) {
          py::dict d;
          d["name"] = r.name;
          d["twisted"] = r.twisted;
          d["grids"] = r.grids;
          d["errors"] = r.errors;
          d["orders"] = r.orders;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_text"));

  m.def(
      "run_command",
      [](const std::string& name, const std::filesystem::path& config, const std::filesystem::path& out,
         bool overwrite) {
        std::ostringstream log;
        const int code = run_command(name, config, {out, overwrite}, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("name"), py::arg("config"), py::arg("out"), py::arg("overwrite") = false,
      "Runs a CLI subcommand in-process; returns (exit_code, log).");

  m.def(
      "write_snapshot",
      [](const std::filesystem::path& path, const Array& u, double t) {
        auto g = geometry_of(u);
        write_snapshot(path, {g->grid(), t, 1.0, field_of(u)});
      },
      py::arg("path"), py::arg("u"), py::arg("t") = 0.0);

  m.def(
      "read_snapshot",
      [](const std::filesystem::path& path) {
        const SnapshotData d = read_snapshot(path);
        return py::make_tuple(to_array(d.u, d.grid), d.t, d.n);
      },
      py::arg("path"), "Returns (u, t, n).");
}

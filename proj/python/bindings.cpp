#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "pinch/config.hpp"
#include "pinch/core_model.hpp"
#include "pinch/errors.hpp"
#include "pinch/io.hpp"
#include "pinch/model_file.hpp"
#include "pinch/montecarlo.hpp"
#include "pinch/placement.hpp"
#include "pinch/power_alloc.hpp"

namespace py = pybind11;
using namespace pinch;

namespace {

UserLayout to_layout(const std::vector<std::vector<double>>& users)
{
    UserLayout layout;
    for (const auto& u : users) {
        if (u.size() != 2 && u.size() != 3) {
            throw ShapeError("user positions are (x, y) or (x, y, z)");
        }
        layout.positions.push_back({u[0], u[1], u.size() == 3 ? u[2] : 0.0});
    }
    return layout;
}

} // namespace

PYBIND11_MODULE(_pinch, m)
{
    m.doc() = "Pinching-antenna NOMA placement, power allocation and simulation";

    auto base = py::register_exception<Error>(m, "PinchError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
    py::register_exception<DegenerateChannel>(m, "DegenerateChannel", base.ptr());
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", base.ptr());
    py::register_exception<CorruptArtifact>(m, "CorruptArtifact", base.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("carrier_freq_hz", &SystemConfig::carrier_freq_hz)
        .def_readwrite("kappa", &SystemConfig::kappa)
        .def_readwrite("height_m", &SystemConfig::waveguide_height_m)
        .def_readwrite("feed_x_m", &SystemConfig::feed_x_m)
        .def_readwrite("d1_m", &SystemConfig::region_d1_m)
        .def_readwrite("d2_m", &SystemConfig::region_d2_m)
        .def_readwrite("total_power_w", &SystemConfig::total_power_w)
        .def_readwrite("noise_power_w", &SystemConfig::noise_power_w)
        .def_readwrite("antennas", &SystemConfig::antennas)
        .def_readwrite("users", &SystemConfig::users)
        .def_property_readonly("wavelength", &SystemConfig::wavelength)
        .def_property_readonly("guided_wavelength", &SystemConfig::guided_wavelength)
        .def_property_readonly("eta", &SystemConfig::eta)
        .def("validate", &SystemConfig::validate);

    m.def(
        "system_from_json", [](const std::string& text) { return parse_config(text).system; }, py::arg("text"),
        "System section of a JSON run configuration.");

    m.def(
        "channel_gains",
        [](const std::vector<std::vector<double>>& users, const std::vector<double>& antenna_xs,
           const SystemConfig& cfg) {
            const auto state = channel_state(to_layout(users), AntennaPlacement{antenna_xs, cfg.waveguide_height_m}, cfg);
            return state.gains;
        },
        py::arg("users"), py::arg("antenna_xs"), py::arg("config"),
        "Effective complex channel of each user for antennas at the given x positions.");

    m.def(
        "maxmin_power",
        [](const std::vector<cplx>& gains, double total_power_w, double noise_power_w) {
            const auto r = maxmin_power(make_channel_state(gains), total_power_w, noise_power_w);
            return py::make_tuple(r.q_opt.q, r.t_opt);
        },
        py::arg("gains"), py::arg("total_power_w"), py::arg("noise_power_w"),
        "Max-min fair NOMA powers; returns (q, common SINR).");

    m.def(
        "min_power",
        [](const std::vector<cplx>& gains, double target_sinr, double total_power_w,
           double noise_power_w) -> py::object {
            const auto q = feasibility_min_power(make_channel_state(gains), target_sinr, total_power_w, noise_power_w);
            if (!q) {
                return py::none();
            }
            return py::cast(q->q);
        },
        py::arg("gains"), py::arg("target_sinr"), py::arg("total_power_w"), py::arg("noise_power_w"),
        "Least powers meeting a common SINR target, or None if over budget.");

    m.def(
        "user_rates",
        [](const std::vector<cplx>& gains, const std::vector<double>& q, double total_power_w, double noise_power_w) {
            return user_rates(make_channel_state(gains), PowerAllocation{q, total_power_w}, noise_power_w);
        },
        py::arg("gains"), py::arg("q"), py::arg("total_power_w"), py::arg("noise_power_w"));

    m.def(
        "simplex_project",
        [](const std::vector<double>& q_hat, double total_power_w) {
            return simplex_project(q_hat, total_power_w).q_proj.q;
        },
        py::arg("q_hat"), py::arg("total_power_w"), "Euclidean projection onto {q >= 0, sum q <= P}.");

    m.def(
        "optimize_placement",
        [](const std::vector<std::vector<double>>& users, const SystemConfig& cfg, double alpha) {
            auto params = PlacementParams::defaults(cfg);
            params.alpha = alpha;
            const auto sol = refine_placement(to_layout(users), cfg, params);
            py::dict out;
            out["antenna_xs"] = sol.placement.xs;
            out["sr_init"] = sol.sr_init;
            out["sr_final"] = sol.sr_final;
            out["iterations"] = sol.iterations;
            return out;
        },
        py::arg("users"), py::arg("config"), py::arg("alpha") = 0.5,
        "Two-stage antenna placement for max-min NOMA sum rate.");

    m.def(
        "run_sweep",
        [](const std::string& config_json, const std::string& model_path) {
            const auto rc = parse_config(config_json);
            mc::ExperimentSpec spec;
            spec.schemes = rc.experiment.schemes;
            spec.sweep_var = rc.experiment.sweep_var;
            spec.sweep_values = rc.experiment.sweep_values;
            spec.trials = rc.experiment.trials;
            spec.base_seed = rc.seed;
            spec.system = rc.system;
            spec.placement = rc.resolved_placement();
            spec.derive_placement_geometry = !rc.placement_guard_set && !rc.placement_bounds_set;
            spec.target_rate = rc.experiment.target_rate_bpshz;
            if (!model_path.empty()) {
                auto model = std::make_shared<nn::CnnModel>(load_model(model_path));
                spec.models[model->trained_k] = model;
            }
            mc::ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = mc::run_experiment(spec);
            }
            py::list rows;
            for (const auto& r : result.records) {
                py::dict row;
                row["scheme"] = std::string(mc::scheme_name(r.scheme));
                row["sweep_value"] = r.sweep_value;
                row["trial"] = r.trial;
                row["sum_rate"] = r.sum_rate;
                row["min_rate"] = r.min_rate;
                row["far_user_rate"] = r.far_user_rate;
                row["outage"] = r.outage;
                rows.append(row);
            }
            return rows;
        },
        py::arg("config_json"), py::arg("model_path") = std::string(),
        "Monte-Carlo sweep from a JSON run configuration; one dict per (scheme, sweep value, trial).");

    m.def(
        "predict_power",
        [](const std::string& model_path, const std::vector<cplx>& gains, double total_power_w) {
            return nn::infer_allocation(load_model(model_path), make_channel_state(gains), total_power_w).q;
        },
        py::arg("model_path"), py::arg("gains"), py::arg("total_power_w"),
        "Projected CNN power allocation from a saved model.");
}

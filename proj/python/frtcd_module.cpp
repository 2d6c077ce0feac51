#include "frtcd/combine.hpp"
#include "frtcd/design.hpp"
#include "frtcd/error.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/io.hpp"
#include "frtcd/mc_planner.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/rng.hpp"
#include "frtcd/simulation.hpp"
#include "frtcd/statistics.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace frtcd;

namespace {

run_mode make_mode(const std::string& mode, std::uint64_t k, std::uint64_t seed) {
    if (mode == "exact") return run_mode::exact();
    if (mode == "mc") {
        if (k == 0) throw input_error("mode 'mc' needs k > 0");
        return run_mode::monte_carlo(k, seed);
    }
    throw input_error("mode must be 'exact' or 'mc'");
}

observed_data make_data(const std::vector<int>& w, const std::vector<double>& y) {
    assignment a;
    for (int v : w) {
        if (v != 0 && v != 1) throw input_error("w must be 0/1");
        a.push_back(static_cast<std::uint8_t>(v));
    }
    return observed_data(std::move(a), y);
}

design as_design(const py::object& d) {
    if (py::isinstance<py::str>(d)) return parse_design(d.cast<std::string>());
    return d.cast<design>();
}

py::dict interval_dict(const confidence_interval& ci) {
    py::dict out;
    out["lower"] = ci.lower;
    out["upper"] = ci.upper;
    out["alpha1"] = ci.alpha1;
    out["alpha2"] = ci.alpha2;
    out["method"] = to_string(ci.method);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fisher randomization tests as confidence distributions";

    static py::exception<error> base_exc(m, "FrtcdError", PyExc_RuntimeError);
    static py::exception<input_error> input_exc(m, "InputError", base_exc.ptr());
    static py::exception<computation_error> comp_exc(m, "ComputationError", base_exc.ptr());
    static py::exception<precondition_error> pre_exc(m, "PreconditionError", base_exc.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const input_error& e) {
            PyErr_SetString(input_exc.ptr(), e.what());
        } catch (const precondition_error& e) {
            PyErr_SetString(pre_exc.ptr(), e.what());
        } catch (const computation_error& e) {
            PyErr_SetString(comp_exc.ptr(), e.what());
        } catch (const error& e) {
            PyErr_SetString(base_exc.ptr(), e.what());
        }
    });

    py::class_<design>(m, "Design")
        .def_static("crd", &design::completely_randomized, py::arg("n_units"), py::arg("n_treated"))
        .def_static(
            "rbd",
            [](const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
                std::vector<block> b;
                for (auto [k, t] : blocks) b.push_back({k, t});
                return design::randomized_block(std::move(b));
            },
            py::arg("blocks"))
        .def_static("balanced_blocks", &design::balanced_blocks, py::arg("n_blocks"), py::arg("block_size"))
        .def_static("parse", &parse_design)
        .def_property_readonly("n_units", &design::n_units)
        .def_property_readonly("n_treated", &design::n_treated)
        .def_property_readonly("total_assignments",
                               [](const design& d) { return py::int_(py::str(total_assignments(d).str())); })
        .def("describe", &design::describe)
        .def("__repr__", [](const design& d) { return "Design(" + d.describe() + ")"; })
        .def(py::self == py::self);

    m.def("statistics", [] { return statistic_registry::builtins().names(); });

    m.def(
        "observed_statistic",
        [](const std::vector<double>& y, const std::vector<int>& w, const std::string& stat) {
            return frtcd::observed_statistic(statistic_registry::builtins().get(stat), make_data(w, y));
        },
        py::arg("y"), py::arg("w"), py::arg("stat") = "diff_means");

    m.def(
        "p_values",
        [](const std::vector<double>& y, const std::vector<int>& w, const py::object& d, double theta,
           const std::string& stat, const std::string& mode, std::uint64_t k, std::uint64_t seed) {
            const auto data = make_data(w, y);
            const auto dist = compute_distribution(data, as_design(d), statistic_registry::builtins().get(stat), theta,
                                                   make_mode(mode, k, seed));
            py::dict out;
            for (auto kind : {pvalue_kind::l_plus, pvalue_kind::u_plus, pvalue_kind::l_minus, pvalue_kind::u_minus,
                              pvalue_kind::two_sided_l})
                out[py::str(to_string(kind))] = dist.tails.p(kind);
            out["T_obs"] = dist.t_obs;
            out["total"] = dist.total;
            return out;
        },
        py::arg("y"), py::arg("w"), py::arg("design"), py::arg("theta"), py::arg("stat") = "diff_means",
        py::arg("mode") = "exact", py::arg("k") = 0, py::arg("seed") = 0);

    py::class_<pvalue_step_function>(m, "StepFunction")
        .def("__call__", &pvalue_step_function::operator())
        .def_property_readonly("side", [](const pvalue_step_function& f) { return to_string(f.side()); })
        .def_property_readonly("breakpoints", &pvalue_step_function::breakpoints)
        .def_property_readonly("values",
                               [](const pvalue_step_function& f) {
                                   std::vector<double> v;
                                   for (std::size_t j = 0; j < f.n_segments(); ++j) v.push_back(f.segment_value(j));
                                   return v;
                               })
        .def_property_readonly("total", &pvalue_step_function::total)
        .def_property_readonly("exhaustive", &pvalue_step_function::exhaustive);

    m.def(
        "step_function",
        [](const std::vector<double>& y, const std::vector<int>& w, const py::object& d, const std::string& side,
           const std::string& stat, const std::string& mode, std::uint64_t k, std::uint64_t seed) {
            return build_step_function(make_data(w, y), as_design(d), statistic_registry::builtins().get(stat),
                                       parse_curve_side(side), make_mode(mode, k, seed));
        },
        py::arg("y"), py::arg("w"), py::arg("design"), py::arg("side") = "Lplus", py::arg("stat") = "diff_means",
        py::arg("mode") = "exact", py::arg("k") = 0, py::arg("seed") = 0);

    m.def(
        "confidence_interval",
        [](const std::vector<double>& y, const std::vector<int>& w, const py::object& d, double alpha1, double alpha2,
           const std::string& stat, const std::string& mode, std::uint64_t k, std::uint64_t seed) {
            return interval_dict(compute_confidence_interval(make_data(w, y), as_design(d),
                                                             statistic_registry::builtins().get(stat), alpha1, alpha2,
                                                             make_mode(mode, k, seed)));
        },
        py::arg("y"), py::arg("w"), py::arg("design"), py::arg("alpha1") = 0.025, py::arg("alpha2") = 0.025,
        py::arg("stat") = "diff_means", py::arg("mode") = "exact", py::arg("k") = 0, py::arg("seed") = 0);

    m.def(
        "traditional_interval",
        [](const std::vector<double>& y, const std::vector<int>& w, const py::object& d, double alpha,
           const std::string& stat, const std::string& mode, std::uint64_t k, std::uint64_t seed) {
            return interval_dict(compute_traditional_interval(make_data(w, y), as_design(d),
                                                              statistic_registry::builtins().get(stat), alpha,
                                                              make_mode(mode, k, seed)));
        },
        py::arg("y"), py::arg("w"), py::arg("design"), py::arg("alpha") = 0.05, py::arg("stat") = "diff_means",
        py::arg("mode") = "exact", py::arg("k") = 0, py::arg("seed") = 0);

    m.def(
        "combine_values",
        [](const std::vector<double>& p, const std::string& combiner, const std::vector<double>& weights) {
            return frtcd::combine_values(p, combiner_spec::by_name(combiner, weights));
        },
        py::arg("p"), py::arg("combiner") = "fisher", py::arg("weights") = std::vector<double>{});

    m.def(
        "combined_interval",
        [](const std::vector<std::tuple<std::vector<double>, std::vector<int>, py::object>>& experiments,
           const std::string& combiner, double alpha, const std::vector<double>& weights, const std::string& stat,
           const std::string& mode, std::uint64_t k, std::uint64_t seed) {
            std::vector<experiment> exps;
            for (std::size_t i = 0; i < experiments.size(); ++i) {
                const auto& [y, w, d] = experiments[i];
                exps.push_back({make_data(w, y), as_design(d), make_mode(mode, k, derive_seed(seed, i)),
                                "experiment " + std::to_string(i + 1)});
            }
            const auto r = compute_combined_interval(exps, statistic_registry::builtins().get(stat),
                                                     combiner_spec::by_name(combiner, weights), alpha);
            py::dict out;
            out["combined"] = interval_dict(r.combined);
            py::list ind;
            for (const auto& ci : r.individual) ind.append(interval_dict(ci));
            out["individual"] = ind;
            out["T_obs"] = r.t_obs;
            out["combiner"] = r.spec.name();
            return out;
        },
        py::arg("experiments"), py::arg("combiner") = "fisher", py::arg("alpha") = 0.05,
        py::arg("weights") = std::vector<double>{}, py::arg("stat") = "diff_means", py::arg("mode") = "exact",
        py::arg("k") = 0, py::arg("seed") = 0);

    m.def("required_k", &required_k, py::arg("epsilon"), py::arg("delta") = 0.01);
    m.def("error_bound", &error_bound, py::arg("k"), py::arg("epsilon"));
    m.def(
        "plan",
        [](const py::object& d, double epsilon, double delta) { return plan(as_design(d), epsilon, delta).describe(); },
        py::arg("design"), py::arg("epsilon"), py::arg("delta") = 0.01);

    m.def(
        "generate_population",
        [](std::size_t n, double theta, std::uint64_t seed) {
            const auto p = frtcd::generate_population(n, theta, seed);
            return py::make_tuple(p.y0, p.y1);
        },
        py::arg("n"), py::arg("true_theta"), py::arg("seed"));

    m.def(
        "run_scenario",
        [](const std::string& config_json) {
            const auto cfg = scenario_from_json(nlohmann::json::parse(config_json));
            return to_json(frtcd::run_scenario(cfg)).dump();
        },
        py::arg("config_json"), "Scenario config as a JSON string; returns the result as a JSON string.");

    m.def(
        "audit",
        [](const std::vector<double>& y0, const std::vector<double>& y1, const py::object& d,
           const std::vector<double>& alphas, const std::string& stat) {
            population pop{y0, y1, y1.empty() || y0.empty() ? 0.0 : y1[0] - y0[0]};
            return to_json(exact_validity_audit(pop, as_design(d), statistic_registry::builtins().get(stat), alphas))
                .dump();
        },
        py::arg("y0"), py::arg("y1"), py::arg("design"), py::arg("alphas") = std::vector<double>{0.05},
        py::arg("stat") = "diff_means");

    m.def(
        "read_experiment_csv",
        [](const std::string& path) {
            const auto f = frtcd::read_experiment_csv(path);
            py::dict out;
            out["unit_id"] = f.data.unit_ids;
            out["w"] = std::vector<int>(f.data.w_obs.begin(), f.data.w_obs.end());
            out["y"] = f.data.y_obs;
            out["design"] = f.inferred.describe();
            if (f.has_blocks) out["block"] = f.block_of_unit;
            return out;
        },
        py::arg("path"));
}

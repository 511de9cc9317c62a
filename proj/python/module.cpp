#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "tubalkit/algebra.hpp"
#include "tubalkit/diagnostics.hpp"
#include "tubalkit/experiment.hpp"
#include "tubalkit/io.hpp"
#include "tubalkit/problems.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/tsvd.hpp"

namespace py = pybind11;
using namespace tubalkit;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

DenseTensor to_tensor(const FArray& a) {
    Dims dims(a.shape(), a.shape() + a.ndim());
    std::vector<double> data(a.data(), a.data() + a.size());
    return DenseTensor(std::move(dims), std::move(data));
}

py::array_t<double> to_array(const DenseTensor& x) {
    std::vector<py::ssize_t> shape(x.dims().begin(), x.dims().end());
    py::array_t<double, py::array::f_style> out(shape);
    if (x.size()) std::memcpy(out.mutable_data(), x.data(), x.size() * sizeof(double));
    return out;
}

py::dict projection_dict(const ProjectionResult& p) {
    py::dict d;
    d["projected"] = to_array(p.projected);
    d["threshold"] = p.threshold;
    d["rank"] = p.rank();
    d["certificate_rank"] = p.certificate_rank;
    d["certificate_value"] = p.certificate_value;
    return d;
}

py::dict run_dict(const RunRecord& r) {
    py::dict d;
    d["seed"] = r.seed;
    d["init_error"] = r.init_error;
    d["recovery_error"] = r.recovery_error;
    d["dual_gap"] = r.dual_gap;
    d["sc_measure"] = r.sc_measure;
    d["first_certified_iteration"] = r.first_certified_iteration;
    d["wall_time"] = r.wall_time;
    d["escalations"] = r.escalations;
    py::list trace;
    for (const auto& p : r.trace) trace.append(py::make_tuple(p.iteration, p.objective_gap_or_value, p.recovery_error));
    d["trace"] = trace;
    return d;
}

ExperimentConfig config_from(const py::dict& settings) {
    std::vector<Setting> s;
    for (auto item : settings) {
        std::string key = py::str(item.first);
        std::string value = py::str(item.second);
        if (py::isinstance<py::list>(item.second) || py::isinstance<py::tuple>(item.second)) {
            value.clear();
            for (auto v : item.second) value += (value.empty() ? "" : ",") + std::string(py::str(v));
        }
        s.push_back({key, value, "python"});
    }
    return build_config(s);
}

}  // namespace

PYBIND11_MODULE(_tubalkit, m) {
    m.doc() = "Tubal tensor algebra, TNN-ball projection and recovery experiments.";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ShapeMismatch>(m, "ShapeMismatch", error.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
    py::register_exception<SymmetryViolation>(m, "SymmetryViolation", numerical.ptr());
    py::register_exception<RankOutOfRange>(m, "RankOutOfRange", error.ptr());
    py::register_exception<NegativeRadius>(m, "NegativeRadius", error.ptr());
    py::register_exception<InfeasiblePoint>(m, "InfeasiblePoint", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

    m.def("t_product", [](const FArray& a, const FArray& b) { return to_array(t_product(to_tensor(a), to_tensor(b))); });
    m.def("t_transpose", [](const FArray& a) { return to_array(t_transpose(to_tensor(a))); });
    m.def("tnn", [](const FArray& a) { return tnn(to_tensor(a)); });
    m.def("spectral_norm", [](const FArray& a) { return spectral_norm(to_tensor(a)); });
    m.def(
        "tubal_rank", [](const FArray& a, double tol) { return tubal_rank(to_tensor(a), tol); }, py::arg("x"),
        py::arg("tol_rank") = kDefaultTolRank);
    m.def("bcirc", [](const FArray& a) { return bcirc_explicit(to_tensor(a)); });

    m.def(
        "tsvd",
        [](const FArray& a) {
            TsvdFactors f = tsvd(to_tensor(a));
            return py::make_tuple(to_array(f.u), to_array(f.s), to_array(f.v));
        },
        "Full t-SVD; returns (U, S, V) with X = U * S * V^T.");

    m.def(
        "project_tnn", [](const FArray& a, double tau) { return projection_dict(project_tnn(to_tensor(a), tau)); },
        py::arg("x"), py::arg("tau"));
    m.def(
        "truncated_project_tnn",
        [](const FArray& a, double tau, std::size_t r) {
            return projection_dict(truncated_project_tnn(to_tensor(a), tau, r));
        },
        py::arg("x"), py::arg("tau"), py::arg("r"));
    m.def(
        "certificate",
        [](const FArray& a, double tau, std::size_t r) {
            CertificateResult c = certificate_check(slice_spectrum(to_tensor(a)), tau, r);
            py::dict d;
            d["holds"] = c.holds;
            d["value"] = c.value;
            d["sigma_next_max"] = c.sigma_next_max;
            return d;
        },
        py::arg("x"), py::arg("tau"), py::arg("r"));

    m.def(
        "sc_measure", [](const FArray& x, const FArray& g) { return sc_measure_smooth(to_tensor(x), to_tensor(g)); },
        py::arg("x_star"), py::arg("grad"));
    m.def(
        "dual_gap", [](const FArray& x, const FArray& g, double tau) {
            return dual_gap_smooth(to_tensor(x), to_tensor(g), tau);
        },
        py::arg("x"), py::arg("grad"), py::arg("tau"));

    m.def("read_tensor", [](const std::string& path) { return to_array(read_tensor(path)); });
    m.def("write_tensor", [](const std::string& path, const FArray& a) { write_tensor(path, to_tensor(a)); });

    m.def(
        "gen_completion",
        [](std::vector<std::size_t> dims, std::size_t r, double rho, std::uint64_t seed) {
            CompletionInstance inst = gen_completion(dims, r, rho, seed);
            py::dict d;
            d["mask"] = to_array(inst.mask);
            d["observed"] = to_array(inst.observed);
            d["truth"] = to_array(inst.truth);
            d["tau"] = inst.tau;
            return d;
        },
        py::arg("dims"), py::arg("r"), py::arg("rho"), py::arg("seed"));
    m.def(
        "gen_rpca",
        [](std::size_t n, std::size_t r, double m, std::uint64_t seed) {
            RpcaInstance inst = gen_rpca(n, r, m, seed);
            py::dict d;
            d["corrupted"] = to_array(inst.corrupted);
            d["truth"] = to_array(inst.truth);
            d["noise"] = to_array(inst.noise);
            d["tau"] = inst.tau;
            return d;
        },
        py::arg("n"), py::arg("r"), py::arg("m"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const py::dict& settings) {
            ExperimentConfig cfg = config_from(settings);
            ExperimentSummary s;
            {
                py::gil_scoped_release release;
                s = run_experiment(cfg);
            }
            py::list runs;
            for (const auto& r : s.runs) runs.append(run_dict(r));
            return runs;
        },
        py::arg("settings") = py::dict(),
        "Runs an experiment from config keys, e.g. {'n': 20, 'seeds': '1-3', 'output': ''}.");
    m.def("config_keys", &config_keys);
}

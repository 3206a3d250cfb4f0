// Python bindings for the nowcasting core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ares/backtest.hpp"
#include "ares/baselines.hpp"
#include "ares/config.hpp"
#include "ares/errors.hpp"
#include "ares/evaluation.hpp"
#include "ares/synth.hpp"

namespace py = pybind11;
using namespace ares;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Row-major copy of a 2-D array, with its column count.
std::pair<std::vector<double>, std::size_t> matrix_of(const Array& x) {
    if (x.ndim() != 2) throw ShapeError("expected a 2-D array");
    const auto cols = static_cast<std::size_t>(x.shape(1));
    return {std::vector<double>(x.data(), x.data() + x.size()), cols};
}

std::vector<double> vector_of(const Array& y) {
    if (y.ndim() != 1) throw ShapeError("expected a 1-D array");
    return {y.data(), y.data() + y.size()};
}

Kernel kernel_of(const std::string& name, double gamma) {
    if (name == "linear") return Kernel::linear();
    if (name == "rbf") return Kernel::rbf(gamma);
    throw ConfigError("unknown kernel '" + name + "' (expected linear or rbf)");
}

DesignMatrix design(const Array& x, const Array& y) {
    auto [data, cols] = matrix_of(x);
    DesignMatrix m;
    m.cols = cols;
    m.data = std::move(data);
    m.targets = vector_of(y);
    if (m.targets.size() * cols != m.data.size()) throw ShapeError("row count of X does not match y");
    for (std::size_t j = 0; j < cols; ++j) m.feature_names.push_back("x" + std::to_string(j));
    return m;
}

std::vector<Region> regions_of(const std::vector<std::string>& codes) {
    std::vector<Region> out;
    for (const auto& c : codes) out.push_back(parse_region(c));
    return out;
}

py::dict report_dict(const BacktestReport& report) {
    py::dict regions;
    for (const auto& r : report.regions) {
        py::dict d;
        d["first_week"] = r.observed.first_week().to_string();
        d["observed"] = std::vector<double>(r.observed.values().begin(), r.observed.values().end());
        py::dict preds;
        for (const auto& [m, s] : r.predictions)
            preds[py::str(std::string(model_code(m)))] = std::vector<double>(s.values().begin(), s.values().end());
        d["predictions"] = preds;
        py::list hyper;
        for (const auto& h : r.hyperparams)
            hyper.append(py::dict(py::arg("week") = h.week.to_string(), py::arg("kernel") = h.params.kernel.name(),
                                  py::arg("c") = h.params.c, py::arg("epsilon") = h.params.epsilon));
        d["hyperparams"] = hyper;
        d["training_rows"] = r.training_rows;
        regions[py::str(std::string(region_code(r.region)))] = d;
    }
    const auto summary = summarize(report.tracks());
    py::list metrics;
    for (const auto& m : summary.rows)
        metrics.append(py::dict(py::arg("region") = std::string(region_code(m.region)), py::arg("model") = m.model,
                                py::arg("rmse") = m.rmse, py::arg("rel_rmse_pct") = m.rel_rmse,
                                py::arg("pearson") = m.pearson));
    return py::dict(py::arg("regions") = regions, py::arg("metrics") = metrics);
}

}  // namespace

PYBIND11_MODULE(_ares, m) {
    m.doc() = "Influenza nowcasting from EHR visit counts and CDC %ILI history";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", input.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", input.ptr());
    py::register_exception<GapError>(m, "GapError", input.ptr());
    py::register_exception<CoverageError>(m, "CoverageError", input.ptr());
    py::register_exception<MissingLagError>(m, "MissingLagError", input.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<KernelError>(m, "KernelError", base.ptr());
    py::register_exception<CvError>(m, "CvError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("week_from_date", [](const std::string& d) { return week_from_date(d).to_string(); }, py::arg("date"),
          "Sunday (YYYY-MM-DD) starting the week that contains the date.");
    m.def("regions", [] {
        std::vector<std::string> out;
        for (Region r : kAllRegions) out.emplace_back(region_code(r));
        return out;
    });

    py::class_<SvrModel>(m, "SvrModel")
        .def_property_readonly("bias", &SvrModel::bias)
        .def_property_readonly("dual_coefs",
                               [](const SvrModel& s) { return std::vector<double>(s.dual_coefs().begin(), s.dual_coefs().end()); })
        .def_property_readonly("kernel", [](const SvrModel& s) { return s.params().kernel.name(); })
        .def("predict",
             [](const SvrModel& s, const Array& x) {
                 const auto [data, cols] = matrix_of(x);
                 std::vector<double> out;
                 for (std::size_t i = 0; cols && i < data.size() / cols; ++i)
                     out.push_back(s.decision_value({data.data() + i * cols, cols}));
                 return out;
             },
             py::arg("X"), "Unclamped decision values for each row of X.")
        .def("weights", [](const SvrModel& s) {
            const auto w = extract_weights(s);
            return py::dict(py::arg("names") = w.names, py::arg("w") = w.w, py::arg("b") = w.b,
                            py::arg("raw_w") = w.raw_w, py::arg("raw_b") = w.raw_b);
        });

    m.def("svr_fit",
          [](const Array& x, const Array& y, double c, double epsilon, const std::string& kernel, double gamma,
             double tolerance, std::size_t max_iterations) {
              return svr_fit(design(x, y), {c, epsilon, kernel_of(kernel, gamma), tolerance, max_iterations});
          },
          py::arg("X"), py::arg("y"), py::arg("c") = 1.0, py::arg("epsilon") = 0.1, py::arg("kernel") = "linear",
          py::arg("gamma") = 0.1, py::arg("tolerance") = 1e-3, py::arg("max_iterations") = 0,
          "Epsilon-SVR on standardized columns of X.");

    m.def("fit_ols",
          [](const Array& x, const Array& y) {
              const auto [data, cols] = matrix_of(x);
              const auto model = fit_ols(data, cols, vector_of(y));
              return py::make_tuple(model.coefficients, model.intercept);
          },
          py::arg("X"), py::arg("y"), "Least squares with intercept; returns (coefficients, intercept).");

    m.def("rmse", [](const Array& p, const Array& o) { return rmse(vector_of(p), vector_of(o)); });
    m.def("relative_rmse", [](const Array& p, const Array& o) { return relative_rmse(vector_of(p), vector_of(o)); });
    m.def("pearson", [](const Array& p, const Array& o) { return pearson(vector_of(p), vector_of(o)); });

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("first_week", [](const Dataset& d) { return d.first_week.to_string(); })
        .def_property_readonly("last_week", [](const Dataset& d) { return d.last_week.to_string(); })
        .def_property_readonly("regions",
                               [](const Dataset& d) {
                                   std::vector<std::string> out;
                                   for (Region r : d.regions) out.emplace_back(region_code(r));
                                   return out;
                               })
        .def("cdc", [](const Dataset& d, const std::string& r) {
            const auto v = d.cdc_for(parse_region(r)).values();
            return std::vector<double>(v.begin(), v.end());
        })
        .def("athena_csv", [](const Dataset& d) {
            std::ostringstream out;
            write_athena(out, d.athena);
            return out.str();
        })
        .def("cdc_csv", [](const Dataset& d) {
            std::ostringstream out;
            write_cdc(out, d.cdc);
            return out.str();
        });

    m.def("generate",
          [](std::uint64_t seed, std::size_t weeks, const std::vector<std::string>& regions, double noise_sd,
             bool linear_truth) {
              SynthSpec s;
              s.seed = seed;
              s.weeks = weeks;
              if (!regions.empty()) s.regions = regions_of(regions);
              s.noise_sd = noise_sd;
              return linear_truth ? generate_linear_truth(s, {}).dataset : generate(s).dataset;
          },
          py::arg("seed") = 20090628, py::arg("weeks") = 314, py::arg("regions") = std::vector<std::string>{},
          py::arg("noise_sd") = 0.1, py::arg("linear_truth") = false,
          "Synthetic data set starting 2009-06-28.");

    m.def("load_dataset",
          [](const std::string& athena_csv, const std::string& cdc_csv, const std::vector<std::string>& regions,
             const std::string& first, const std::string& last) {
              std::istringstream a(athena_csv), c(cdc_csv);
              const auto at = load_athena(a);
              const auto ct = load_cdc(c);
              std::vector<Region> rs = regions_of(regions);
              if (rs.empty())
                  for (const auto& [r, s] : at) rs.push_back(r);
              return assemble(at, ct, rs, WeekId::parse(first), WeekId::parse(last));
          },
          py::arg("athena_csv"), py::arg("cdc_csv"), py::arg("regions") = std::vector<std::string>{},
          py::arg("first"), py::arg("last"), "Parses athena.csv and cdc.csv text and assembles a data set.");

    m.def("run_backtest",
          [](const Dataset& ds, const std::string& training_start, const std::string& first_prediction,
             const std::string& last_prediction, const std::vector<std::string>& models,
             const std::vector<std::string>& regions, std::size_t hyper_every_weeks) {
              BacktestConfig cfg;
              cfg.training_start = WeekId::parse(training_start);
              cfg.first_prediction = WeekId::parse(first_prediction);
              cfg.last_prediction = WeekId::parse(last_prediction);
              cfg.models.clear();
              for (const auto& code : models) cfg.models.push_back(parse_model(code));
              cfg.regions = regions_of(regions);
              cfg.hyper_every_weeks = hyper_every_weeks;
              BacktestReport report;
              {
                  py::gil_scoped_release release;
                  report = run_backtest(ds, cfg);
              }
              return report_dict(report);
          },
          py::arg("dataset"), py::arg("training_start"), py::arg("first_prediction"), py::arg("last_prediction"),
          py::arg("models") = std::vector<std::string>{"ares", "ar2", "linear"},
          py::arg("regions") = std::vector<std::string>{}, py::arg("hyper_every_weeks") = 13,
          "Weekly expanding-window replay with the default hyperparameter grid.");

    m.def("backtest_config",
          [](const std::filesystem::path& config) {
              const auto cfg = load_run_config(config);
              const auto ds = load_dataset(cfg);
              BacktestReport report;
              {
                  py::gil_scoped_release release;
                  report = run_backtest(ds, cfg.backtest);
              }
              return report_dict(report);
          },
          py::arg("config"), "Runs the backtest described by a run config file.");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stackcast/data_io.hpp"
#include "stackcast/estimator.hpp"
#include "stackcast/evaluation.hpp"
#include "stackcast/season.hpp"
#include "stackcast/synthetic.hpp"

namespace py = pybind11;
using namespace stackcast;

namespace {

LogScoreMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    return LogScoreMatrix::from_rows(rows);
}

py::dict trace_to_dict(const FitTrace& trace) {
    py::dict d;
    d["iterations"] = trace.iterations;
    d["objective_path"] = trace.objective_path;
    d["converged"] = trace.converged;
    d["weights"] = trace.final_weights.values();
    if (trace.final_state) d["gamma"] = trace.final_state->gamma();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stackcast: adaptive stacking of binned probabilistic forecasts";

    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<IoError>(m, "IoError");

    m.def("canonical_grid_edges", [] { return canonical_grid().edges(); },
          "Edges of the 131-bin CDC ILI grid");
    m.def("bin_index_of", [](double ili) { return bin_index_of(canonical_grid(), ili); },
          py::arg("ili"));
    m.def("log_score",
          [](const std::vector<double>& mass, std::size_t truth_bin) {
              BinnedForecast f(canonical_grid(), mass, ForecastMeta{});
              return log_score(f, truth_bin);
          },
          py::arg("mass"), py::arg("truth_bin"));
    m.def("combine",
          [](const std::vector<std::vector<double>>& masses, const std::vector<double>& pi) {
              std::vector<BinnedForecast> forecasts;
              for (const auto& mass : masses)
                  forecasts.emplace_back(canonical_grid(), mass, ForecastMeta{});
              return combine(forecasts, WeightVector(pi)).mass();
          },
          py::arg("masses"), py::arg("pi"));

    m.def("log_likelihood",
          [](const std::vector<std::vector<double>>& scores, const std::vector<double>& pi) {
              return log_likelihood(matrix_from_rows(scores), WeightVector(pi));
          },
          py::arg("scores"), py::arg("pi"));
    m.def("digamma", &digamma, py::arg("x"));
    m.def("expected_log_pi",
          [](const std::vector<double>& gamma) { return expected_log_pi(DirichletState(gamma)); },
          py::arg("gamma"));
    m.def("fit_em",
          [](const std::vector<std::vector<double>>& scores, double tol, std::size_t max_iters) {
              const auto matrix = matrix_from_rows(scores);
              return trace_to_dict(
                  fit_em(matrix, WeightVector::uniform(matrix.num_models()), FitOptions{tol, max_iters}));
          },
          py::arg("scores"), py::arg("tol") = 1e-8, py::arg("max_iters") = 10000);
    m.def("fit_vi",
          [](const std::vector<std::vector<double>>& scores, double rho, double tol,
             std::size_t max_iters) {
              const auto matrix = matrix_from_rows(scores);
              const PriorSchedule schedule{rho, matrix.num_models()};
              return trace_to_dict(fit_vi(matrix, schedule,
                                          WeightVector::uniform(matrix.num_models()),
                                          FitOptions{tol, max_iters}));
          },
          py::arg("scores"), py::arg("rho"), py::arg("tol") = 1e-8, py::arg("max_iters") = 10000);
    m.def("grid_mle_oracle",
          [](const std::vector<std::vector<double>>& scores, double step) {
              return grid_mle_oracle(matrix_from_rows(scores), step).values();
          },
          py::arg("scores"), py::arg("step"));
    m.def("alpha_of_t",
          [](double rho, std::size_t num_models, std::size_t n_train) {
              return alpha_of_t(PriorSchedule{rho, num_models}, n_train);
          },
          py::arg("rho"), py::arg("num_models"), py::arg("n_train"));

    m.def("run_adaptive_files",
          [](const std::string& forecasts, const std::string& truth, double rho,
             const std::string& out, const std::string& season_label) {
              const auto season = load_season(forecasts, truth, season_label);
              save_run(run_adaptive(season, rho), out);
          },
          py::arg("forecasts"), py::arg("truth"), py::arg("rho"), py::arg("out"),
          py::arg("season_label") = "season");
}

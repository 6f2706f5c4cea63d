#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stackcast/data_io.hpp"
#include "stackcast/evaluation.hpp"
#include "stackcast/season.hpp"
#include "stackcast/synthetic.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_grid(const std::string& spec) {
    const auto a = spec.find(':');
    const auto b = spec.rfind(':');
    if (a == std::string::npos || b == a)
        throw stackcast::DomainError("grid must be lo:hi:step, e.g. 0:1:0.01");
    const double lo = std::stod(spec.substr(0, a));
    const double hi = std::stod(spec.substr(a + 1, b - a - 1));
    const double step = std::stod(spec.substr(b + 1));
    if (step <= 0.0 || hi < lo) throw stackcast::DomainError("grid must satisfy lo <= hi, step > 0");
    std::vector<double> grid;
    for (long i = 0;; ++i) {
        const double v = lo + step * static_cast<double>(i);
        if (v > hi + 1e-12) break;
        grid.push_back(std::min(v, hi));
    }
    return grid;
}

struct CommonFlags {
    double tol = 1e-8;
    std::size_t max_iters = 10000;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stackcast: adaptive stacking of binned probabilistic forecasts"};
    app.require_subcommand(1);

    CommonFlags flags;

    // fit
    auto* fit = app.add_subcommand("fit", "Fit ensemble weights on a season's final score matrix");
    std::string fit_forecasts, fit_truth, fit_out = "weights.csv", fit_trace_path, fit_method = "em";
    double fit_rho = 0.08;
    fit->add_option("--forecasts", fit_forecasts, "component forecast CSV")->required();
    fit->add_option("--truth", fit_truth, "truth snapshot CSV")->required();
    fit->add_option("--method", fit_method, "em or vi")->check(CLI::IsMember({"em", "vi"}));
    fit->add_option("--rho", fit_rho, "prior fraction (vi only)");
    fit->add_option("--tol", flags.tol, "objective improvement tolerance");
    fit->add_option("--max-iters", flags.max_iters, "iteration cap");
    fit->add_option("--out", fit_out, "weights output CSV");
    fit->add_option("--trace", fit_trace_path, "objective path output CSV");

    // season protocols
    auto* adaptive = app.add_subcommand("adaptive", "Week-by-week adaptive ensemble run");
    auto* stat = app.add_subcommand("static", "Static ensemble trained on past seasons");
    auto* equal = app.add_subcommand("equal", "Equal-weight ensemble run");
    std::string season_forecasts, season_truth, season_label = "season", run_out = "run.csv";
    double run_rho = 0.08;
    std::vector<std::string> past_forecasts, past_truth;
    for (auto* cmd : {adaptive, stat, equal}) {
        cmd->add_option("--forecasts", season_forecasts, "target season forecast CSV")->required();
        cmd->add_option("--truth", season_truth, "target season truth CSV")->required();
        cmd->add_option("--season", season_label, "season label");
        cmd->add_option("--out", run_out, "run output file");
    }
    adaptive->add_option("--rho", run_rho, "prior fraction");
    adaptive->add_option("--tol", flags.tol, "objective improvement tolerance");
    adaptive->add_option("--max-iters", flags.max_iters, "iteration cap");
    stat->add_option("--rho", run_rho, "prior fraction (0 = EM)")->default_val(0.0);
    stat->add_option("--past-forecasts", past_forecasts, "past season forecast CSVs")->required();
    stat->add_option("--past-truth", past_truth, "past season truth CSVs")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Mean logscore across a rho grid");
    std::string sweep_grid = "0:1:0.01", sweep_out = "sweep.csv";
    sweep->add_option("--forecasts", season_forecasts, "season forecast CSV")->required();
    sweep->add_option("--truth", season_truth, "season truth CSV")->required();
    sweep->add_option("--grid", sweep_grid, "rho grid lo:hi:step");
    sweep->add_option("--tol", flags.tol, "objective improvement tolerance");
    sweep->add_option("--max-iters", flags.max_iters, "iteration cap");
    sweep->add_option("--out", sweep_out, "sweep output CSV");

    // compare
    auto* compare = app.add_subcommand("compare", "Paired logscore differences and bootstrap p-values");
    std::string run_a, run_b, compare_out = "differences.csv";
    std::size_t resamples = 10000;
    std::uint64_t seed = 0;
    compare->add_option("runA", run_a, "first run file")->required();
    compare->add_option("runB", run_b, "second run file")->required();
    compare->add_option("--resamples", resamples, "bootstrap resamples");
    compare->add_option("--seed", seed, "bootstrap seed (required)")->required();
    compare->add_option("--out", compare_out, "differences output CSV");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic season");
    std::string synth_forecasts = "forecasts.csv", synth_truth = "truth.csv";
    std::uint64_t synth_seed = 0;
    long synth_weeks = 30;
    std::size_t synth_models = 3;
    std::vector<double> synth_pi;
    double synth_noise = 0.0;
    long synth_lag = 0;
    synth->add_option("--seed", synth_seed, "generator seed")->required();
    synth->add_option("--weeks", synth_weeks, "season length in weeks");
    synth->add_option("--models", synth_models, "number of component models");
    synth->add_option("--pi", synth_pi, "true mixture weights (default uniform)");
    synth->add_option("--noise", synth_noise, "revision noise scale in bin widths");
    synth->add_option("--lag", synth_lag, "weeks until truth is finalized");
    synth->add_option("--forecasts-out", synth_forecasts, "forecast CSV output");
    synth->add_option("--truth-out", synth_truth, "truth CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        stackcast::FitOptions fit_opts{flags.tol, flags.max_iters};
        if (fit->parsed()) {
            const auto season = stackcast::load_season(fit_forecasts, fit_truth, "fit");
            const auto scores = stackcast::final_score_matrix(season);
            const auto init = stackcast::WeightVector::uniform(season.model_ids.size());
            stackcast::FitTrace trace;
            if (fit_method == "em") {
                trace = stackcast::fit_em(scores, init, fit_opts);
            } else {
                stackcast::PriorSchedule schedule{fit_rho, season.model_ids.size()};
                trace = stackcast::fit_vi(scores, schedule, init, fit_opts);
            }
            stackcast::write_weights_csv(trace.final_weights, season.model_ids, fit_out);
            if (!fit_trace_path.empty()) stackcast::write_trace_csv(trace, fit_trace_path);
            if (!trace.converged)
                std::cerr << "warning: not converged after " << trace.iterations << " iterations\n";
        } else if (adaptive->parsed()) {
            const auto season = stackcast::load_season(season_forecasts, season_truth, season_label);
            stackcast::RunConfig config;
            config.fit = fit_opts;
            stackcast::save_run(stackcast::run_adaptive(season, run_rho, config), run_out);
        } else if (stat->parsed()) {
            if (past_forecasts.size() != past_truth.size())
                throw stackcast::IoError("--past-forecasts and --past-truth counts differ");
            const auto season = stackcast::load_season(season_forecasts, season_truth, season_label);
            std::vector<stackcast::LogScoreMatrix> past;
            for (std::size_t i = 0; i < past_forecasts.size(); ++i) {
                auto past_season = stackcast::load_season(past_forecasts[i], past_truth[i],
                                                         "past" + std::to_string(i));
                past.push_back(stackcast::final_score_matrix(past_season));
            }
            stackcast::RunConfig config;
            config.fit = fit_opts;
            stackcast::save_run(stackcast::run_static(past, season, run_rho, config), run_out);
        } else if (equal->parsed()) {
            const auto season = stackcast::load_season(season_forecasts, season_truth, season_label);
            stackcast::save_run(stackcast::run_equal(season), run_out);
        } else if (sweep->parsed()) {
            const auto season = stackcast::load_season(season_forecasts, season_truth, "sweep");
            stackcast::RunConfig config;
            config.fit = fit_opts;
            const auto result = stackcast::prior_sweep(season, parse_grid(sweep_grid), config);
            stackcast::write_sweep_csv(result, sweep_out);
            std::cout << "argmax rho = " << stackcast::format_double(result.argmax_rho) << "\n";
        } else if (compare->parsed()) {
            const auto a = stackcast::load_run(run_a);
            const auto b = stackcast::load_run(run_b);
            const auto diffs = stackcast::paired_differences(a, b);
            stackcast::write_differences_csv(diffs, compare_out);
            for (const auto& [stratum, p] : stackcast::permutation_pvalue(diffs, resamples, seed))
                std::cout << stratum << ",p=" << stackcast::format_double(p) << "\n";
        } else if (synth->parsed()) {
            stackcast::SyntheticScenario scenario;
            scenario.seed = synth_seed;
            scenario.weeks = synth_weeks;
            scenario.component_mass = stackcast::separated_components(synth_models);
            scenario.true_pi = synth_pi.empty()
                ? stackcast::WeightVector::uniform(synth_models)
                : stackcast::WeightVector(synth_pi);
            scenario.revision = stackcast::RevisionModel{synth_noise, synth_lag};
            const auto out = stackcast::generate(scenario);
            stackcast::write_synthetic(out, synth_forecasts, synth_truth);
        }
    } catch (const stackcast::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const stackcast::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}

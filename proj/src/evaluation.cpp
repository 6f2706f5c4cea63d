#include "stackcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stackcast/data_io.hpp"
#include "stackcast/synthetic.hpp"

namespace stackcast {

double PairedDifferenceSet::mean() const {
    if (entries.empty()) throw DomainError("mean of empty difference set");
    double total = 0.0;
    for (const auto& e : entries) total += e.d;
    return total / static_cast<double>(entries.size());
}

std::map<std::string, double> PairedDifferenceSet::means_by_location() const {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& e : entries) {
        acc[e.location].first += e.d;
        acc[e.location].second += 1;
    }
    std::map<std::string, double> out;
    for (const auto& [loc, p] : acc) out[loc] = p.first / static_cast<double>(p.second);
    return out;
}

std::map<int, double> PairedDifferenceSet::means_by_target() const {
    std::map<int, std::pair<double, std::size_t>> acc;
    for (const auto& e : entries) {
        acc[e.target].first += e.d;
        acc[e.target].second += 1;
    }
    std::map<int, double> out;
    for (const auto& [t, p] : acc) out[t] = p.first / static_cast<double>(p.second);
    return out;
}

SweepResult prior_sweep(const SeasonData& season, std::vector<double> rho_grid,
                        const RunConfig& config) {
    if (rho_grid.empty()) throw DomainError("prior_sweep: empty rho grid");
    std::sort(rho_grid.begin(), rho_grid.end());
    SweepResult result;
    result.rho_grid = rho_grid;
    double best = -std::numeric_limits<double>::infinity();
    for (double rho : rho_grid) {
        const SeasonRun run = run_adaptive(season, rho, config);
        if (run.weekly_scores.empty()) throw DomainError("prior_sweep: run produced no scores");
        double total = 0.0;
        for (const auto& [key, score] : run.weekly_scores) total += score;
        const double mean = total / static_cast<double>(run.weekly_scores.size());
        result.mean_logscore.push_back(mean);
        if (mean > best) {
            best = mean;
            result.argmax_rho = rho;
        }
    }
    return result;
}

PairedDifferenceSet paired_differences(const SeasonRun& a, const SeasonRun& b) {
    std::string missing;
    for (const auto& [key, score] : a.weekly_scores)
        if (!b.weekly_scores.count(key))
            missing += " (" + std::to_string(key.epiweek) + "," + key.location + "," +
                       std::to_string(key.target) + ")";
    for (const auto& [key, score] : b.weekly_scores)
        if (!a.weekly_scores.count(key))
            missing += " (" + std::to_string(key.epiweek) + "," + key.location + "," +
                       std::to_string(key.target) + ")";
    if (!missing.empty()) throw DomainError("paired_differences: key mismatch:" + missing);

    PairedDifferenceSet out;
    for (const auto& [key, score_a] : a.weekly_scores) {
        const double score_b = b.weekly_scores.at(key);
        out.entries.push_back(
            PairedDifference{a.season, key.location, key.target, key.epiweek, score_a - score_b});
    }
    return out;
}

namespace {

double stratum_pvalue(const std::vector<double>& d, std::size_t resamples, SeededRng& rng) {
    const double n = static_cast<double>(d.size());
    double observed = 0.0;
    for (double v : d) observed += v;
    observed /= n;
    std::size_t exceed = 0;
    for (std::size_t b = 0; b < resamples; ++b) {
        double total = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            total += d[static_cast<std::size_t>(rng.uniform() * n)];
        // center the resampled mean to form the null
        if (total / n - observed >= observed) ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(resamples);
}

}  // namespace

std::map<std::string, double> permutation_pvalue(const PairedDifferenceSet& diffs,
                                                 std::size_t resamples, std::uint64_t seed) {
    if (resamples < 1) throw DomainError("permutation_pvalue: resamples must be >= 1");
    // sort entries by key so the result is invariant to input order
    std::vector<PairedDifference> entries = diffs.entries;
    std::sort(entries.begin(), entries.end(), [](const PairedDifference& x, const PairedDifference& y) {
        return std::tie(x.season, x.location, x.target, x.epiweek) <
               std::tie(y.season, y.location, y.target, y.epiweek);
    });

    std::map<std::string, std::vector<double>> strata;
    for (const auto& e : entries) {
        strata["all"].push_back(e.d);
        strata["location:" + e.location].push_back(e.d);
        strata["target:" + std::to_string(e.target)].push_back(e.d);
    }

    std::map<std::string, double> out;
    for (const auto& [name, d] : strata) {
        if (d.empty()) continue;  // not-applicable stratum
        SeededRng rng(seed ^ std::hash<std::string>{}(name));
        out[name] = stratum_pvalue(d, resamples, rng);
    }
    return out;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "rho,mean_logscore\n";
    for (std::size_t i = 0; i < sweep.rho_grid.size(); ++i)
        out << format_double(sweep.rho_grid[i]) << "," << format_double(sweep.mean_logscore[i]) << "\n";
}

void write_differences_csv(const PairedDifferenceSet& diffs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "season,location,target,epiweek,difference\n";
    for (const auto& e : diffs.entries)
        out << e.season << "," << e.location << "," << e.target << "," << e.epiweek << ","
            << format_double(e.d) << "\n";
}

}  // namespace stackcast

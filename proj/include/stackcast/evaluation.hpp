#ifndef STACKCAST_EVALUATION_HPP
#define STACKCAST_EVALUATION_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stackcast/season.hpp"

namespace stackcast {

struct PairedDifference {
    std::string season;
    std::string location;
    int target = 1;
    long epiweek = 0;
    double d = 0.0;  // logscore(A) - logscore(B)
};

struct PairedDifferenceSet {
    std::vector<PairedDifference> entries;

    double mean() const;
    std::map<std::string, double> means_by_location() const;
    std::map<int, double> means_by_target() const;
};

struct SweepResult {
    std::vector<double> rho_grid;       // sorted ascending
    std::vector<double> mean_logscore;  // per rho, over the identical key set
    double argmax_rho = 0.0;
};

// run_adaptive per rho; mean final-truth logscore over the shared key set.
SweepResult prior_sweep(const SeasonData& season, std::vector<double> rho_grid,
                        const RunConfig& config = {});

// Per-key logscore differences between two runs sharing key sets.
PairedDifferenceSet paired_differences(const SeasonRun& a, const SeasonRun& b);

// Bootstrap resample (with replacement), center the resampled means to form
// the null, and report the fraction of null draws >= the observed mean.
// Strata: "all" plus "location:<loc>" and "target:<k>".
std::map<std::string, double> permutation_pvalue(const PairedDifferenceSet& diffs,
                                                 std::size_t resamples, std::uint64_t seed);

void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_differences_csv(const PairedDifferenceSet& diffs, const std::string& path);

}  // namespace stackcast

#endif

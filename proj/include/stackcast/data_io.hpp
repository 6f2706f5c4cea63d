#ifndef STACKCAST_DATA_IO_HPP
#define STACKCAST_DATA_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "stackcast/season.hpp"

namespace stackcast {

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// CSV `model,location,target,issue,bin_start,bin_end,value`; bins must match
// the canonical grid; group masses renormalized when within [0.9, 1.1].
std::map<ForecastKey, BinnedForecast> load_forecasts(const std::string& path);

// CSV `issue,epiweek,location,wili`; one snapshot per issue week,
// inheriting the latest value for every (location, epiweek).
TruthSnapshotStore load_truth_snapshots(const std::string& path);

// Season assembly: model ids are the distinct models in the forecast file.
SeasonData load_season(const std::string& forecasts_path, const std::string& truth_path,
                       const std::string& season_label);

// Run files: `# stackcast-run v1` version line, then
// `kind,epiweek,location,target,model,value` rows (kind in {weight, score}).
// Doubles carry 17 significant digits so the round trip is exact.
void save_run(const SeasonRun& run, const std::string& path);
SeasonRun load_run(const std::string& path);

// 17-significant-digit decimal rendering shared by all writers.
std::string format_double(double x);

void write_weights_csv(const WeightVector& w, const std::vector<std::string>& model_ids,
                       const std::string& path);
void write_trace_csv(const FitTrace& trace, const std::string& path);

}  // namespace stackcast

#endif

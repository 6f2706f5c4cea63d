#ifndef STACKCAST_SEASON_HPP
#define STACKCAST_SEASON_HPP

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "stackcast/estimator.hpp"
#include "stackcast/forecast.hpp"
#include "stackcast/score_matrix.hpp"

namespace stackcast {

// Epiweeks are YYYYWW integers on a 52-week calendar; week 53 normalizes to
// the next year's week 1.
long epiweek_to_index(long epiweek);
long index_to_epiweek(long index);
long epiweek_add(long epiweek, long weeks);
inline long normalize_epiweek(long epiweek) { return index_to_epiweek(epiweek_to_index(epiweek)); }

// Truth values as reported at one issue week: (location, epiweek) -> wILI %.
class TruthSnapshot {
  public:
    TruthSnapshot(long issue_week, std::map<std::pair<std::string, long>, double> values);

    long issue_week() const { return issue_week_; }
    const std::map<std::pair<std::string, long>, double>& values() const { return values_; }
    std::optional<double> value(const std::string& location, long epiweek) const;

  private:
    long issue_week_;
    std::map<std::pair<std::string, long>, double> values_;
};

// Ordered per-issue-week views; later snapshots inherit earlier values.
class TruthSnapshotStore {
  public:
    explicit TruthSnapshotStore(std::vector<TruthSnapshot> snapshots);

    const std::vector<TruthSnapshot>& snapshots() const { return snapshots_; }
    const TruthSnapshot& final_snapshot() const;
    // Store restricted to issue weeks <= cutoff (lookahead tests).
    TruthSnapshotStore truncated(long issue_cutoff) const;

  private:
    std::vector<TruthSnapshot> snapshots_;  // sorted by issue week
};

struct ForecastKey {
    std::string model;
    std::string location;
    int target = 1;
    long issue = 0;

    auto tie() const { return std::tie(model, location, target, issue); }
    bool operator<(const ForecastKey& o) const { return tie() < o.tie(); }
};

// One season of component forecasts plus the truth revision stream.
struct SeasonData {
    std::string season;
    std::vector<std::string> model_ids;
    std::map<ForecastKey, BinnedForecast> forecasts;
    TruthSnapshotStore truth{std::vector<TruthSnapshot>{}};

    std::vector<long> issue_weeks() const;  // distinct forecast issue weeks, sorted
};

enum class Protocol { EqualWeight, Static, Adaptive };

struct ScoreKey {
    long epiweek = 0;  // forecast issue week
    std::string location;
    int target = 1;

    auto tie() const { return std::tie(epiweek, location, target); }
    bool operator<(const ScoreKey& o) const { return tie() < o.tie(); }
    bool operator==(const ScoreKey& o) const { return tie() == o.tie(); }
};

struct SeasonRun {
    Protocol protocol = Protocol::EqualWeight;
    double rho = 0.0;
    std::string season;
    std::vector<std::string> model_ids;
    std::map<long, WeightVector> weekly_weights;
    std::map<ScoreKey, double> weekly_scores;  // ensemble logscore vs final truth
};

struct RunConfig {
    FitOptions fit;
    bool warm_start = false;
    long reporting_delay = 2;  // truth for epiweeks <= t - delay is scorable
};

// Component logscores for every within-season observation scorable under
// `snapshot` (target epiweek <= issue_week - delay and truth reported).
LogScoreMatrix build_score_matrix(const SeasonData& season, const TruthSnapshot& snapshot,
                                  long reporting_delay = 2);

// Weekly refit with the time-dependent Dirichlet prior; weeks with no
// scorable data use uniform weights.
SeasonRun run_adaptive(const SeasonData& season, double rho, const RunConfig& config = {});

// One fit on concatenated past-season final score matrices; weights frozen.
// rho = 0 uses EM; rho > 0 uses VI with that prior.
SeasonRun run_static(const std::vector<LogScoreMatrix>& past_scores, const SeasonData& season,
                     double rho = 0.0, const RunConfig& config = {});

// Uniform 1/M weights every week.
SeasonRun run_equal(const SeasonData& season);

// Final score matrix of a season (final snapshot, delay 0): the training
// input for run_static on later seasons.
LogScoreMatrix final_score_matrix(const SeasonData& season);

}  // namespace stackcast

#endif

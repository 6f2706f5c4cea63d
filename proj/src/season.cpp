#include "stackcast/season.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stackcast {

long epiweek_to_index(long epiweek) {
    const long year = epiweek / 100;
    const long week = epiweek % 100;
    if (week < 1 || week > 53) throw DomainError("epiweek week part must be 1..53");
    return year * 52 + (week - 1);
}

long index_to_epiweek(long index) { return (index / 52) * 100 + (index % 52) + 1; }

long epiweek_add(long epiweek, long weeks) { return index_to_epiweek(epiweek_to_index(epiweek) + weeks); }

TruthSnapshot::TruthSnapshot(long issue_week, std::map<std::pair<std::string, long>, double> values)
    : issue_week_(issue_week), values_(std::move(values)) {
    for (const auto& [key, wili] : values_) {
        if (epiweek_to_index(key.second) > epiweek_to_index(issue_week_))
            throw DomainError("truth snapshot contains epiweek after its issue week");
        if (wili < 0.0 || wili > 100.0) throw DomainError("wILI outside [0, 100]");
    }
}

std::optional<double> TruthSnapshot::value(const std::string& location, long epiweek) const {
    auto it = values_.find({location, epiweek});
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

TruthSnapshotStore::TruthSnapshotStore(std::vector<TruthSnapshot> snapshots)
    : snapshots_(std::move(snapshots)) {
    std::sort(snapshots_.begin(), snapshots_.end(),
              [](const TruthSnapshot& a, const TruthSnapshot& b) {
                  return epiweek_to_index(a.issue_week()) < epiweek_to_index(b.issue_week());
              });
    for (std::size_t i = 1; i < snapshots_.size(); ++i)
        if (snapshots_[i].issue_week() == snapshots_[i - 1].issue_week())
            throw DomainError("duplicate snapshot issue week");
}

const TruthSnapshot& TruthSnapshotStore::final_snapshot() const {
    if (snapshots_.empty()) throw DomainError("empty truth snapshot store");
    return snapshots_.back();
}

TruthSnapshotStore TruthSnapshotStore::truncated(long issue_cutoff) const {
    std::vector<TruthSnapshot> kept;
    for (const auto& s : snapshots_)
        if (epiweek_to_index(s.issue_week()) <= epiweek_to_index(issue_cutoff)) kept.push_back(s);
    return TruthSnapshotStore(std::move(kept));
}

std::vector<long> SeasonData::issue_weeks() const {
    std::set<long> weeks;
    for (const auto& [key, f] : forecasts) weeks.insert(key.issue);
    return std::vector<long>(weeks.begin(), weeks.end());
}

LogScoreMatrix build_score_matrix(const SeasonData& season, const TruthSnapshot& snapshot,
                                  long reporting_delay) {
    const long avail = epiweek_to_index(snapshot.issue_week()) - reporting_delay;
    // group keys: (location, target, issue) with truth available for issue + target
    std::set<std::tuple<std::string, int, long>> groups;
    for (const auto& [key, f] : season.forecasts) {
        const long target_idx = epiweek_to_index(key.issue) + key.target;
        if (target_idx > avail) continue;
        if (!snapshot.value(key.location, index_to_epiweek(target_idx))) continue;
        groups.insert({key.location, key.target, key.issue});
    }
    const std::size_t m_count = season.model_ids.size();
    std::vector<ObsKey> keys;
    std::vector<double> values(m_count * groups.size());
    std::size_t t = 0;
    for (const auto& [location, target, issue] : groups) {
        const long truth_week = epiweek_add(issue, target);
        const double wili = *snapshot.value(location, truth_week);
        for (std::size_t m = 0; m < m_count; ++m) {
            auto it = season.forecasts.find(ForecastKey{season.model_ids[m], location, target, issue});
            if (it == season.forecasts.end())
                throw DomainError("missing forecast for model " + season.model_ids[m] +
                                  " at issue " + std::to_string(issue));
            const std::size_t bin = bin_index_of(it->second.grid(), wili);
            values[m * groups.size() + t] = log_score(it->second, bin);
        }
        keys.push_back(ObsKey{season.season, location, target, issue});
        ++t;
    }
    return LogScoreMatrix(season.model_ids, std::move(keys), std::move(values));
}

namespace {

// Score the week-by-week combined forecasts against the final snapshot.
void score_weekly(const SeasonData& season, SeasonRun& run) {
    const TruthSnapshot& final_truth = season.truth.final_snapshot();
    std::set<std::tuple<std::string, int, long>> groups;
    for (const auto& [key, f] : season.forecasts) groups.insert({key.location, key.target, key.issue});
    for (const auto& [location, target, issue] : groups) {
        auto wit = run.weekly_weights.find(issue);
        if (wit == run.weekly_weights.end()) continue;
        const long truth_week = epiweek_add(issue, target);
        const auto wili = final_truth.value(location, truth_week);
        if (!wili) continue;  // season tail beyond final reporting
        std::vector<BinnedForecast> components;
        for (const auto& id : season.model_ids) {
            auto it = season.forecasts.find(ForecastKey{id, location, target, issue});
            if (it == season.forecasts.end())
                throw DomainError("missing forecast for model " + id);
            components.push_back(it->second);
        }
        const BinnedForecast pooled = combine(components, wit->second);
        const std::size_t bin = bin_index_of(pooled.grid(), *wili);
        run.weekly_scores[ScoreKey{issue, location, target}] = log_score(pooled, bin);
    }
}

std::vector<long> run_weeks(const SeasonData& season) {
    // weights are recorded at every snapshot issue week and every forecast issue week
    std::set<long> weeks;
    for (const auto& s : season.truth.snapshots()) weeks.insert(s.issue_week());
    for (long w : season.issue_weeks()) weeks.insert(w);
    return std::vector<long>(weeks.begin(), weeks.end());
}

}  // namespace

SeasonRun run_adaptive(const SeasonData& season, double rho, const RunConfig& config) {
    if (season.model_ids.empty()) throw DomainError("run_adaptive: no models");
    if (season.truth.snapshots().empty()) throw DomainError("run_adaptive: no truth snapshots");
    SeasonRun run;
    run.protocol = Protocol::Adaptive;
    run.rho = rho;
    run.season = season.season;
    run.model_ids = season.model_ids;

    const std::size_t m_count = season.model_ids.size();
    auto snapshot_iter = season.truth.snapshots().begin();
    const auto snapshot_end = season.truth.snapshots().end();
    const TruthSnapshot* current = nullptr;
    WeightVector previous = WeightVector::uniform(m_count);
    for (long week : run_weeks(season)) {
        while (snapshot_iter != snapshot_end &&
               epiweek_to_index(snapshot_iter->issue_week()) <= epiweek_to_index(week)) {
            current = &*snapshot_iter;
            ++snapshot_iter;
        }
        if (current == nullptr)
            throw DomainError("no truth snapshot at or before issue week " + std::to_string(week));
        // the snapshot view at week t; reporting delay applies relative to t
        const TruthSnapshot view(week, current->values());
        const LogScoreMatrix scores = build_score_matrix(season, view, config.reporting_delay);
        WeightVector weights = WeightVector::uniform(m_count);
        if (scores.num_obs() > 0) {
            const PriorSchedule schedule{rho, m_count};
            const WeightVector init = config.warm_start ? previous : WeightVector::uniform(m_count);
            weights = fit_vi(scores, schedule, init, config.fit).final_weights;
        }
        previous = weights;
        run.weekly_weights.emplace(week, weights);
    }
    score_weekly(season, run);
    return run;
}

SeasonRun run_static(const std::vector<LogScoreMatrix>& past_scores, const SeasonData& season,
                     double rho, const RunConfig& config) {
    if (past_scores.empty()) throw DomainError("run_static: no past-season training scores");
    const LogScoreMatrix training = LogScoreMatrix::concat(past_scores);
    if (training.num_obs() == 0) throw DomainError("run_static: empty training set");
    if (training.model_ids() != season.model_ids)
        throw DomainError("run_static: training model ids differ from season model ids");
    const WeightVector init = WeightVector::uniform(season.model_ids.size());
    WeightVector weights = rho > 0.0
        ? fit_vi(training, PriorSchedule{rho, season.model_ids.size()}, init, config.fit).final_weights
        : fit_em(training, init, config.fit).final_weights;

    SeasonRun run;
    run.protocol = Protocol::Static;
    run.rho = rho;
    run.season = season.season;
    run.model_ids = season.model_ids;
    for (long week : run_weeks(season)) run.weekly_weights.emplace(week, weights);
    score_weekly(season, run);
    return run;
}

SeasonRun run_equal(const SeasonData& season) {
    if (season.model_ids.empty()) throw DomainError("run_equal: no models");
    SeasonRun run;
    run.protocol = Protocol::EqualWeight;
    run.season = season.season;
    run.model_ids = season.model_ids;
    const WeightVector uniform = WeightVector::uniform(season.model_ids.size());
    for (long week : run_weeks(season)) run.weekly_weights.emplace(week, uniform);
    score_weekly(season, run);
    return run;
}

LogScoreMatrix final_score_matrix(const SeasonData& season) {
    return build_score_matrix(season, season.truth.final_snapshot(), 0);
}

}  // namespace stackcast

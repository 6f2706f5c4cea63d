#ifndef STACKCAST_SCORE_MATRIX_HPP
#define STACKCAST_SCORE_MATRIX_HPP

#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "stackcast/forecast.hpp"

namespace stackcast {

// Identifies one scored observation: the forecast's issue epiweek plus
// the (season, location, target) it belongs to.
struct ObsKey {
    std::string season;
    std::string location;
    int target = 1;
    long epiweek = 0;

    auto tie() const { return std::tie(season, location, target, epiweek); }
    bool operator==(const ObsKey& o) const { return tie() == o.tie(); }
    bool operator<(const ObsKey& o) const { return tie() < o.tie(); }
};

// M x T matrix of component logscores; column t is one observed truth value.
class LogScoreMatrix {
  public:
    LogScoreMatrix(std::vector<std::string> model_ids, std::vector<ObsKey> obs_keys,
                   std::vector<double> values);

    static LogScoreMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t num_models() const { return model_ids_.size(); }
    std::size_t num_obs() const { return obs_keys_.size(); }
    double at(std::size_t m, std::size_t t) const { return values_[m * num_obs() + t]; }

    const std::vector<std::string>& model_ids() const { return model_ids_; }
    const std::vector<ObsKey>& obs_keys() const { return obs_keys_; }

    // Column-concatenation of matrices sharing the same model ids.
    static LogScoreMatrix concat(const std::vector<LogScoreMatrix>& parts);

  private:
    std::vector<std::string> model_ids_;
    std::vector<ObsKey> obs_keys_;
    std::vector<double> values_;  // row-major, M x T
};

}  // namespace stackcast

#endif

#include "stackcast/score_matrix.hpp"

#include <cmath>

namespace stackcast {

LogScoreMatrix::LogScoreMatrix(std::vector<std::string> model_ids, std::vector<ObsKey> obs_keys,
                               std::vector<double> values)
    : model_ids_(std::move(model_ids)), obs_keys_(std::move(obs_keys)), values_(std::move(values)) {
    if (model_ids_.empty()) throw DomainError("LogScoreMatrix needs at least one model");
    if (values_.size() != model_ids_.size() * obs_keys_.size())
        throw DomainError("LogScoreMatrix dimension mismatch");
    for (double v : values_)
        if (!(v <= 1e-12) || v < kLogScoreFloor - 1e-12 || !std::isfinite(v))
            throw DomainError("logscore entries must lie in [-10, 0]");
}

LogScoreMatrix LogScoreMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DomainError("from_rows: no rows");
    std::vector<std::string> ids;
    std::vector<ObsKey> keys;
    std::vector<double> values;
    const std::size_t t = rows.front().size();
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m].size() != t) throw DomainError("from_rows: ragged rows");
        ids.push_back("m" + std::to_string(m));
        values.insert(values.end(), rows[m].begin(), rows[m].end());
    }
    for (std::size_t j = 0; j < t; ++j) keys.push_back(ObsKey{"synthetic", "nat", 1, 200001 + static_cast<long>(j)});
    return LogScoreMatrix(std::move(ids), std::move(keys), std::move(values));
}

LogScoreMatrix LogScoreMatrix::concat(const std::vector<LogScoreMatrix>& parts) {
    if (parts.empty()) throw DomainError("concat: no matrices");
    const auto& ids = parts.front().model_ids();
    std::vector<ObsKey> keys;
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.model_ids() != ids) throw DomainError("concat: model id mismatch");
        total += p.num_obs();
    }
    std::vector<double> values(ids.size() * total);
    std::size_t offset = 0;
    for (const auto& p : parts) {
        for (std::size_t t = 0; t < p.num_obs(); ++t) keys.push_back(p.obs_keys()[t]);
        for (std::size_t m = 0; m < ids.size(); ++m)
            for (std::size_t t = 0; t < p.num_obs(); ++t)
                values[m * total + offset + t] = p.at(m, t);
        offset += p.num_obs();
    }
    return LogScoreMatrix(ids, std::move(keys), std::move(values));
}

}  // namespace stackcast

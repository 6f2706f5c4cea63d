#include "stackcast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stackcast {

BinGrid::BinGrid(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw DomainError("BinGrid needs at least two edges");
    if (edges_.front() != 0.0 || edges_.back() != 100.0)
        throw DomainError("BinGrid edges must span [0, 100]");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i] <= edges_[i - 1]) throw DomainError("BinGrid edges must be strictly increasing");
}

double BinGrid::midpoint(std::size_t bin) const {
    if (bin >= count()) throw DomainError("bin index out of range");
    return 0.5 * (edges_[bin] + edges_[bin + 1]);
}

const BinGrid& canonical_grid() {
    static const BinGrid grid = [] {
        std::vector<double> edges;
        edges.reserve(132);
        for (int i = 0; i <= 130; ++i) edges.push_back(i / 10.0);
        edges.push_back(100.0);
        return BinGrid(edges);
    }();
    return grid;
}

std::size_t bin_index_of(const BinGrid& grid, double ili) {
    if (!(ili >= 0.0 && ili <= 100.0)) throw DomainError("ILI value outside [0, 100]");
    const auto& e = grid.edges();
    if (ili >= e[e.size() - 2]) return grid.count() - 1;  // top bin closed
    auto it = std::upper_bound(e.begin(), e.end(), ili);
    return static_cast<std::size_t>(it - e.begin()) - 1;
}

BinnedForecast::BinnedForecast(const BinGrid& grid, std::vector<double> mass, ForecastMeta meta)
    : grid_(&grid), mass_(std::move(mass)), meta_(std::move(meta)) {
    if (mass_.size() != grid.count()) throw DomainError("forecast mass dimension != grid bin count");
    double sum = 0.0;
    for (double p : mass_) {
        if (p < 0.0 || !std::isfinite(p)) throw DomainError("forecast mass entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("forecast mass must sum to 1");
}

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw DomainError("empty weight vector");
    double sum = 0.0;
    for (double x : w_) {
        if (x < 0.0 || !std::isfinite(x)) throw DomainError("weights must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("weights must sum to 1");
}

WeightVector WeightVector::uniform(std::size_t m) {
    if (m == 0) throw DomainError("uniform weights need m >= 1");
    return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

double log_score(const BinnedForecast& forecast, std::size_t truth_bin) {
    if (truth_bin >= forecast.grid().count()) throw DomainError("truth bin out of range");
    double p = forecast.mass()[truth_bin];
    if (p <= 0.0) return kLogScoreFloor;
    return std::max(std::log(p), kLogScoreFloor);
}

BinnedForecast combine(const std::vector<BinnedForecast>& forecasts, const WeightVector& pi) {
    if (forecasts.empty()) throw DomainError("combine needs at least one forecast");
    if (forecasts.size() != pi.size()) throw DomainError("combine: |pi| != number of forecasts");
    const BinGrid& grid = forecasts.front().grid();
    const ForecastMeta& meta0 = forecasts.front().meta();
    for (const auto& f : forecasts) {
        if (!(f.grid() == grid)) throw DomainError("combine: grid mismatch");
        if (!f.meta().same_observable(meta0)) throw DomainError("combine: forecast meta mismatch");
    }
    std::vector<double> mass(grid.count(), 0.0);
    for (std::size_t m = 0; m < forecasts.size(); ++m)
        for (std::size_t b = 0; b < mass.size(); ++b) mass[b] += pi[m] * forecasts[m].mass()[b];
    double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& p : mass) p /= sum;
    ForecastMeta meta = meta0;
    meta.model = "ensemble";
    return BinnedForecast(grid, std::move(mass), std::move(meta));
}

}  // namespace stackcast

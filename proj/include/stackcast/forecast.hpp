#ifndef STACKCAST_FORECAST_HPP
#define STACKCAST_FORECAST_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stackcast {

// Raised on contract violations (bad bin index, mismatched grids, ...).
class DomainError : public std::runtime_error {
  public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Logscores are truncated below at this value (natural log units).
inline constexpr double kLogScoreFloor = -10.0;

// Partition of [0, 100] ILI-percent into half-open bins [e_j, e_{j+1}),
// top bin closed at 100.
class BinGrid {
  public:
    explicit BinGrid(std::vector<double> edges);

    std::size_t count() const { return edges_.size() - 1; }
    const std::vector<double>& edges() const { return edges_; }
    double midpoint(std::size_t bin) const;

    bool operator==(const BinGrid& other) const { return edges_ == other.edges_; }

  private:
    std::vector<double> edges_;
};

// The CDC ILI grid: 130 bins of width 0.1 on [0, 13) plus one bin [13, 100].
const BinGrid& canonical_grid();

// Index of the bin containing `ili`; 100 maps to the last bin.
std::size_t bin_index_of(const BinGrid& grid, double ili);

struct ForecastMeta {
    std::string model;
    std::string location;
    int target = 1;         // weeks ahead, 1..4
    long issue = 0;         // epiweek YYYYWW

    bool same_observable(const ForecastMeta& o) const {
        return location == o.location && target == o.target && issue == o.issue;
    }
};

// Probability mass function over a bin grid.
class BinnedForecast {
  public:
    BinnedForecast(const BinGrid& grid, std::vector<double> mass, ForecastMeta meta);

    const BinGrid& grid() const { return *grid_; }
    const std::vector<double>& mass() const { return mass_; }
    const ForecastMeta& meta() const { return meta_; }

  private:
    const BinGrid* grid_;   // non-owning; grids outlive forecasts
    std::vector<double> mass_;
    ForecastMeta meta_;
};

// Point on the M-simplex.
class WeightVector {
  public:
    explicit WeightVector(std::vector<double> weights);
    static WeightVector uniform(std::size_t m);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& values() const { return w_; }

  private:
    std::vector<double> w_;
};

// log(mass[truth_bin]) truncated below at kLogScoreFloor.
double log_score(const BinnedForecast& forecast, std::size_t truth_bin);

// Linear pool: per-bin convex combination of the component masses.
BinnedForecast combine(const std::vector<BinnedForecast>& forecasts, const WeightVector& pi);

}  // namespace stackcast

#endif

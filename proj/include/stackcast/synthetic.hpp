#ifndef STACKCAST_SYNTHETIC_HPP
#define STACKCAST_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stackcast/estimator.hpp"
#include "stackcast/season.hpp"

namespace stackcast {

// Deterministic uniform/categorical draws on top of a fixed 64-bit generator,
// so identical seeds give identical files on every platform.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed);
    double uniform();                                  // [0, 1)
    double uniform(double lo, double hi);
    std::size_t categorical(const std::vector<double>& probs);

  private:
    std::uint64_t next();
    std::uint64_t s_[4];
};

struct RevisionModel {
    double noise_scale_bins = 0.0;  // provisional truth jitter, in bin widths
    long weeks_to_final = 0;        // lag after which reports stop changing
};

struct SyntheticScenario {
    WeightVector true_pi{std::vector<double>{1.0}};
    std::vector<std::vector<double>> component_mass;  // M templates on the canonical grid
    long weeks = 1;
    long first_issue = 201940;
    std::string location = "nat";
    RevisionModel revision;
    std::uint64_t seed = 0;
};

struct SyntheticOutput {
    SeasonData season;
    std::vector<std::size_t> true_components;  // z draw per week
    std::vector<double> final_truth;           // per week, ILI %
};

// Draw z ~ Cat(true_pi) per week, the truth bin from component z, and emit
// provisional snapshots whose revision noise decays to zero by the lag.
SyntheticOutput generate(const SyntheticScenario& scenario);

// Write the generated season in the data_io CSV formats.
void write_synthetic(const SyntheticOutput& out, const std::string& forecasts_path,
                     const std::string& truth_path);

// Exhaustive maximizer of the mixture loglikelihood on the simplex lattice
// (ties -> lexicographically smallest). M <= 3 only.
WeightVector grid_mle_oracle(const LogScoreMatrix& scores, double step);

// M component templates concentrated on disjoint bin ranges.
std::vector<std::vector<double>> separated_components(std::size_t m);

}  // namespace stackcast

#endif

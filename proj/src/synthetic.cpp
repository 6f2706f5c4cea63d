#include "stackcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stackcast/data_io.hpp"

namespace stackcast {

// xoshiro256** — fixed across platforms so seeded files are byte-stable.
SeededRng::SeededRng(std::uint64_t seed) {
    // splitmix64 expansion of the seed
    std::uint64_t x = seed;
    for (auto& s : s_) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        s = z ^ (z >> 31);
    }
}

std::uint64_t SeededRng::next() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SeededRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SeededRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t SeededRng::categorical(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

std::vector<std::vector<double>> separated_components(std::size_t m) {
    if (m == 0 || m > 10) throw DomainError("separated_components supports 1..10 models");
    const BinGrid& grid = canonical_grid();
    std::vector<std::vector<double>> out;
    // Each component concentrates on a disjoint 10-bin band, with a small
    // uniform floor so logscores stay above the truncation region.
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> mass(grid.count(), 1e-4);
        const std::size_t start = 5 + 12 * k;
        for (std::size_t b = start; b < start + 10; ++b) mass[b] += 0.1;
        double sum = 0.0;
        for (double p : mass) sum += p;
        for (double& p : mass) p /= sum;
        out.push_back(std::move(mass));
    }
    return out;
}

SyntheticOutput generate(const SyntheticScenario& scenario) {
    const BinGrid& grid = canonical_grid();
    const std::size_t m_count = scenario.component_mass.size();
    if (m_count != scenario.true_pi.size())
        throw DomainError("generate: true_pi size != number of components");
    if (scenario.weeks < 1) throw DomainError("generate: weeks must be >= 1");
    SeededRng rng(scenario.seed);

    SyntheticOutput out;
    out.season.season = "synthetic";
    for (std::size_t m = 0; m < m_count; ++m) out.season.model_ids.push_back("model" + std::to_string(m));

    // Truth: per week draw the generating component, then its bin.
    std::vector<long> epiweeks;
    for (long w = 0; w < scenario.weeks; ++w) {
        const long epiweek = epiweek_add(scenario.first_issue, w);
        epiweeks.push_back(epiweek);
        const std::size_t z = rng.categorical(scenario.true_pi.values());
        const std::size_t bin = rng.categorical(scenario.component_mass[z]);
        out.true_components.push_back(z);
        out.final_truth.push_back(grid.midpoint(std::min<std::size_t>(bin, grid.count() - 2)));
    }

    // Forecasts: templates emitted verbatim for horizons 1..4 every issue week.
    for (long w = 0; w < scenario.weeks; ++w) {
        const long issue = epiweeks[static_cast<std::size_t>(w)];
        for (std::size_t m = 0; m < m_count; ++m) {
            for (int h = 1; h <= 4; ++h) {
                ForecastKey key{out.season.model_ids[m], scenario.location, h, issue};
                ForecastMeta meta{key.model, key.location, h, issue};
                out.season.forecasts.emplace(
                    key, BinnedForecast(grid, scenario.component_mass[m], std::move(meta)));
            }
        }
    }

    // Snapshots: provisional values jitter by up to noise_scale_bins bin
    // widths, decaying linearly to zero at the finalization lag. The jitter is
    // drawn once per (issue, epiweek) so identical seeds reproduce files.
    const long lag = std::max<long>(scenario.revision.weeks_to_final, 0);
    const long last_issue = epiweek_add(scenario.first_issue, scenario.weeks - 1 + 4 + 2);
    std::vector<TruthSnapshot> snapshots;
    std::map<std::pair<std::string, long>, double> values;
    for (long idx = epiweek_to_index(scenario.first_issue); idx <= epiweek_to_index(last_issue); ++idx) {
        const long issue = index_to_epiweek(idx);
        values.clear();
        for (std::size_t w = 0; w < epiweeks.size(); ++w) {
            const long target_idx = epiweek_to_index(epiweeks[w]);
            if (target_idx > idx) continue;
            const long age = idx - target_idx;
            double wili = out.final_truth[w];
            if (scenario.revision.noise_scale_bins > 0.0 && age < lag) {
                const double decay = 1.0 - static_cast<double>(age) / static_cast<double>(lag);
                wili += rng.uniform(-1.0, 1.0) * scenario.revision.noise_scale_bins * 0.1 * decay;
                wili = std::clamp(wili, 0.0, 100.0);
            }
            values[{scenario.location, epiweeks[w]}] = wili;
        }
        snapshots.emplace_back(issue, values);
    }
    out.season.truth = TruthSnapshotStore(std::move(snapshots));
    return out;
}

void write_synthetic(const SyntheticOutput& out, const std::string& forecasts_path,
                     const std::string& truth_path) {
    const BinGrid& grid = canonical_grid();
    std::ofstream fc(forecasts_path);
    if (!fc) throw IoError("cannot write " + forecasts_path);
    fc << "model,location,target,issue,bin_start,bin_end,value\n";
    for (const auto& [key, f] : out.season.forecasts) {
        const auto& edges = grid.edges();
        for (std::size_t b = 0; b < grid.count(); ++b)
            fc << key.model << "," << key.location << "," << key.target << "," << key.issue << ","
               << format_double(edges[b]) << "," << format_double(edges[b + 1]) << ","
               << format_double(f.mass()[b]) << "\n";
    }

    std::ofstream tr(truth_path);
    if (!tr) throw IoError("cannot write " + truth_path);
    tr << "issue,epiweek,location,wili\n";
    for (const auto& snap : out.season.truth.snapshots())
        for (const auto& [key, wili] : snap.values())
            tr << snap.issue_week() << "," << key.second << "," << key.first << ","
               << format_double(wili) << "\n";
}

WeightVector grid_mle_oracle(const LogScoreMatrix& scores, double step) {
    const std::size_t m_count = scores.num_models();
    if (m_count > 3) throw DomainError("grid_mle_oracle supports M <= 3 only");
    if (!(step > 0.0 && step <= 1.0)) throw DomainError("grid_mle_oracle: bad step");
    const long n = std::lround(1.0 / step);

    WeightVector best = WeightVector::uniform(m_count);
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    auto consider = [&](std::vector<double> w) {
        WeightVector pi(std::move(w));
        const double value = log_likelihood(scores, pi);
        // ties -> lexicographically smallest weight vector; iteration order is
        // already lexicographic, so only accept clear improvements (rounding in
        // the lattice coordinates perturbs a flat objective at the 1e-16 level)
        if (!found || value > best_value + 1e-9) {
            found = true;
            best_value = value;
            best = pi;
        }
    };

    if (m_count == 1) return WeightVector(std::vector<double>{1.0});
    if (m_count == 2) {
        for (long i = 0; i <= n; ++i)
            consider({static_cast<double>(i) / n, static_cast<double>(n - i) / n});
    } else {
        for (long i = 0; i <= n; ++i)
            for (long j = 0; i + j <= n; ++j)
                consider({static_cast<double>(i) / n, static_cast<double>(j) / n,
                          static_cast<double>(n - i - j) / n});
    }
    return best;
}

}  // namespace stackcast

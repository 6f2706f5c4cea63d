#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stackcast/evaluation.hpp"
#include "stackcast/synthetic.hpp"
#include "test_util.hpp"

using namespace stackcast;

namespace {

SeasonRun run_with_scores(const std::string& season, std::vector<std::pair<ScoreKey, double>> scores) {
    SeasonRun run;
    run.season = season;
    for (auto& [key, s] : scores) run.weekly_scores.emplace(key, s);
    return run;
}

// Scenario where early provisional truth systematically favors a component
// that looks bad against the finalized values.
SeasonData misleading_revisions_season() {
    const BinGrid& grid = canonical_grid();
    SeasonData season;
    season.season = "misleading";
    season.model_ids = {"good", "spurious", "flat"};

    auto concentrated = [&](double center) {
        std::vector<double> mass(grid.count(), 1e-5);
        const std::size_t c = bin_index_of(grid, center);
        for (std::size_t b = c - 2; b <= c + 2; ++b) mass[b] += 0.19;
        double sum = 0.0;
        for (double p : mass) sum += p;
        for (double& p : mass) p /= sum;
        return mass;
    };
    const auto good = concentrated(2.0);      // matches the finalized truth
    const auto spurious = concentrated(5.0);  // matches only provisional reports
    std::vector<double> flat(grid.count(), 1.0 / grid.count());
    const std::vector<std::vector<double>> masses = {good, spurious, flat};

    const long first = 202010;
    const long weeks = 30;
    for (long w = 0; w < weeks; ++w) {
        const long issue = epiweek_add(first, w);
        for (std::size_t m = 0; m < 3; ++m)
            for (int h = 1; h <= 4; ++h) {
                ForecastKey key{season.model_ids[m], "nat", h, issue};
                season.forecasts.emplace(key, BinnedForecast(grid, masses[m],
                                                             ForecastMeta{key.model, "nat", h, issue}));
            }
    }

    // provisional reports sit near 5.0 for `lag` weeks, then finalize to 2.0
    const long lag = 5;
    std::vector<TruthSnapshot> snaps;
    for (long idx = epiweek_to_index(first); idx <= epiweek_to_index(first) + weeks + 5; ++idx) {
        std::map<std::pair<std::string, long>, double> values;
        for (long e = epiweek_to_index(first); e <= std::min(idx, epiweek_to_index(first) + weeks - 1); ++e) {
            const long age = idx - e;
            values[{"nat", index_to_epiweek(e)}] = age < lag ? 5.0 : 2.0;
        }
        snaps.emplace_back(index_to_epiweek(idx), values);
    }
    season.truth = TruthSnapshotStore(std::move(snaps));
    return season;
}

}  // namespace

TEST_CASE("paired_differences") {
    ScoreKey k1{202010, "nat", 1}, k2{202010, "HHS1", 2}, k3{202011, "nat", 1}, k4{202011, "HHS1", 2};
    SUBCASE("identical runs give all-zero differences") {
        auto a = run_with_scores("s", {{k1, -1.0}, {k2, -2.0}});
        auto d = paired_differences(a, a);
        for (const auto& e : d.entries) CHECK(e.d == 0.0);
        CHECK(d.mean() == 0.0);
    }
    SUBCASE("score bounds give all-10 differences") {
        auto a = run_with_scores("s", {{k1, 0.0}, {k2, 0.0}});
        auto b = run_with_scores("s", {{k1, -10.0}, {k2, -10.0}});
        auto d = paired_differences(a, b);
        for (const auto& e : d.entries) CHECK(e.d == 10.0);
    }
    SUBCASE("hand-computed stratified means") {
        auto a = run_with_scores("s", {{k1, -1.0}, {k2, -2.0}, {k3, -3.0}, {k4, -4.0}});
        auto b = run_with_scores("s", {{k1, -1.5}, {k2, -1.0}, {k3, -2.0}, {k4, -6.0}});
        auto d = paired_differences(a, b);
        CHECK(d.mean() == doctest::Approx((0.5 - 1.0 - 1.0 + 2.0) / 4.0).epsilon(1e-15));
        auto by_loc = d.means_by_location();
        CHECK(by_loc.at("nat") == doctest::Approx((0.5 - 1.0) / 2.0).epsilon(1e-15));
        CHECK(by_loc.at("HHS1") == doctest::Approx((-1.0 + 2.0) / 2.0).epsilon(1e-15));
        auto by_target = d.means_by_target();
        CHECK(by_target.at(1) == doctest::Approx(-0.25).epsilon(1e-15));
        CHECK(by_target.at(2) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("antisymmetry") {
        auto a = run_with_scores("s", {{k1, -1.0}, {k2, -2.0}});
        auto b = run_with_scores("s", {{k1, -0.5}, {k2, -4.0}});
        auto ab = paired_differences(a, b);
        auto ba = paired_differences(b, a);
        REQUIRE(ab.entries.size() == ba.entries.size());
        for (std::size_t i = 0; i < ab.entries.size(); ++i)
            CHECK(ab.entries[i].d == -ba.entries[i].d);
    }
    SUBCASE("key mismatch lists the missing keys") {
        auto a = run_with_scores("s", {{k1, -1.0}, {k2, -2.0}});
        auto b = run_with_scores("s", {{k1, -1.0}});
        CHECK_THROWS_WITH_AS(paired_differences(a, b), doctest::Contains("HHS1"), DomainError);
    }
}

TEST_CASE("permutation_pvalue") {
    ScoreKey base{202010, "nat", 1};
    SUBCASE("all-zero differences give p near 1") {
        PairedDifferenceSet d;
        for (int i = 0; i < 20; ++i)
            d.entries.push_back(PairedDifference{"s", "nat", 1, 202010 + i, 0.0});
        auto p = permutation_pvalue(d, 2000, 9);
        CHECK(p.at("all") >= 0.4);
    }
    SUBCASE("strong separation gives small p") {
        SeededRng rng(12);
        PairedDifferenceSet d;
        for (int i = 0; i < 20; ++i)
            d.entries.push_back(PairedDifference{"s", "nat", 1, 202010 + i, 10.0 + rng.uniform(-0.01, 0.01)});
        auto p = permutation_pvalue(d, 10000, 9);
        CHECK(p.at("all") < 0.01);
    }
    SUBCASE("matches an independently coded bootstrap") {
        SeededRng data_rng(77);
        PairedDifferenceSet d;
        for (int i = 0; i < 20; ++i)
            d.entries.push_back(PairedDifference{"s", "nat", 1, 202010 + i, data_rng.uniform(-1.0, 2.0)});
        const std::size_t resamples = 20000;
        auto p = permutation_pvalue(d, resamples, 123);

        // independent transcription: resample means, center at zero, count
        // draws at or above the observed mean
        std::vector<double> values;
        for (const auto& e : d.entries) values.push_back(e.d);
        double observed = 0.0;
        for (double v : values) observed += v;
        observed /= values.size();
        SeededRng rng(123 ^ std::hash<std::string>{}("all"));
        std::size_t exceed = 0;
        for (std::size_t b = 0; b < resamples; ++b) {
            double total = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i)
                total += values[static_cast<std::size_t>(rng.uniform() * values.size())];
            if (total / values.size() - observed >= observed) ++exceed;
        }
        CHECK(p.at("all") == doctest::Approx(static_cast<double>(exceed) / resamples).epsilon(1e-12));
    }
    SUBCASE("invariant to entry order") {
        SeededRng rng(5);
        PairedDifferenceSet d;
        for (int i = 0; i < 15; ++i)
            d.entries.push_back(PairedDifference{"s", i % 2 ? "nat" : "HHS1", 1 + i % 3,
                                                 202010 + i, rng.uniform(-1.0, 1.0)});
        auto p1 = permutation_pvalue(d, 3000, 55);
        std::reverse(d.entries.begin(), d.entries.end());
        auto p2 = permutation_pvalue(d, 3000, 55);
        CHECK(p1 == p2);
    }
}

TEST_CASE("prior_sweep") {
    SyntheticScenario scenario;
    scenario.component_mass = separated_components(2);
    scenario.true_pi = WeightVector({0.7, 0.3});
    scenario.weeks = 10;
    scenario.seed = 2;
    auto out = generate(scenario);

    SUBCASE("single-point grid") {
        auto sweep = prior_sweep(out.season, {0.0});
        CHECK(sweep.rho_grid.size() == 1);
        CHECK(sweep.argmax_rho == 0.0);
    }
    SUBCASE("duplicate grid points give identical means") {
        auto sweep = prior_sweep(out.season, {0.1, 0.1});
        CHECK(sweep.mean_logscore[0] == sweep.mean_logscore[1]);
    }
    SUBCASE("determinism") {
        auto a = prior_sweep(out.season, {0.0, 0.05, 0.2});
        auto b = prior_sweep(out.season, {0.0, 0.05, 0.2});
        CHECK(a.mean_logscore == b.mean_logscore);
        CHECK(a.argmax_rho == b.argmax_rho);
    }
    SUBCASE("empty grid rejected") {
        CHECK_THROWS_AS(prior_sweep(out.season, {}), DomainError);
    }
}

TEST_CASE("sweep shape on the misleading-revision scenario") {
    auto season = misleading_revisions_season();
    auto sweep = prior_sweep(season, {0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0});
    const auto& means = sweep.mean_logscore;
    const std::size_t best =
        std::max_element(means.begin(), means.end()) - means.begin();
    // interior maximum: regularization helps, but too much hurts
    CHECK(best > 0);
    CHECK(best + 1 < means.size());
    CHECK(means[best] > means.front());
    CHECK(means[best] > means.back());
}

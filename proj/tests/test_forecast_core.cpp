#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stackcast/forecast.hpp"
#include "stackcast/synthetic.hpp"
#include "test_util.hpp"

using namespace stackcast;

namespace {

BinnedForecast make_forecast(const std::vector<double>& mass) {
    return BinnedForecast(canonical_grid(), mass, ForecastMeta{"m", "nat", 1, 201940});
}

BinnedForecast point_mass(std::size_t bin) {
    std::vector<double> mass(canonical_grid().count(), 0.0);
    mass[bin] = 1.0;
    return make_forecast(mass);
}

const BinGrid two_bin_grid{std::vector<double>{0.0, 50.0, 100.0}};

}  // namespace

TEST_CASE("canonical grid layout") {
    const BinGrid& grid = canonical_grid();
    CHECK(grid.count() == 131);
    CHECK(grid.edges()[0] == 0.0);
    CHECK(grid.edges()[130] == doctest::Approx(13.0).epsilon(1e-15));
    CHECK(grid.edges()[131] == 100.0);
}

TEST_CASE("bin_index_of") {
    const BinGrid& grid = canonical_grid();
    CHECK(bin_index_of(grid, 0.05) == 0);
    CHECK(bin_index_of(grid, 0.0) == 0);
    CHECK(bin_index_of(grid, 2.34) == 23);
    CHECK(bin_index_of(grid, 12.99) == 129);
    // 13.0 and above land in the wide top bin; 100 maps to the last bin
    CHECK(bin_index_of(grid, 13.0) == 130);
    CHECK(bin_index_of(grid, 99.9) == 130);
    CHECK(bin_index_of(grid, 100.0) == 130);
    CHECK_THROWS_AS(bin_index_of(grid, -0.1), DomainError);
    CHECK_THROWS_AS(bin_index_of(grid, 100.1), DomainError);

    // interior edges belong to the right bin
    CHECK(bin_index_of(grid, 0.1) == 1);
    CHECK(bin_index_of(grid, 12.9) == 129);
}

TEST_CASE("bin_index_of inverts midpoint lookup") {
    const BinGrid& grid = canonical_grid();
    for (std::size_t j = 0; j < grid.count(); ++j)
        CHECK(bin_index_of(grid, grid.midpoint(j)) == j);
}

TEST_CASE("log_score values") {
    CHECK(log_score(point_mass(10), 10) == 0.0);

    std::vector<double> tiny(canonical_grid().count(), 0.0);
    tiny[5] = 1e-12;
    tiny[6] = 1.0 - 1e-12;
    CHECK(log_score(make_forecast(tiny), 5) == -10.0);
    CHECK(log_score(point_mass(3), 4) == -10.0);  // zero mass

    std::vector<double> uniform(131, 1.0 / 131.0);
    CHECK(log_score(make_forecast(uniform), 42) == doctest::Approx(std::log(1.0 / 131.0)).epsilon(1e-12));

    CHECK_THROWS_AS(log_score(point_mass(0), 131), DomainError);
}

TEST_CASE("combine basics") {
    auto a = point_mass(10);
    auto b = point_mass(20);

    SUBCASE("degenerate weight reproduces a component") {
        auto c = combine({a, b}, WeightVector({1.0, 0.0}));
        CHECK(c.mass() == a.mass());
    }
    SUBCASE("identical forecasts are a fixed point") {
        auto c = combine({a, a}, WeightVector({0.3, 0.7}));
        CHECK(c.mass() == a.mass());
    }
    SUBCASE("two-bin arithmetic mean") {
        BinnedForecast x(two_bin_grid, {0.2, 0.8}, ForecastMeta{"x", "nat", 1, 201940});
        BinnedForecast y(two_bin_grid, {0.6, 0.4}, ForecastMeta{"y", "nat", 1, 201940});
        auto c = combine({x, y}, WeightVector({0.5, 0.5}));
        CHECK(c.mass()[0] == doctest::Approx(0.4).epsilon(1e-15));
        CHECK(c.mass()[1] == doctest::Approx(0.6).epsilon(1e-15));
    }
    SUBCASE("grid mismatch rejected") {
        BinnedForecast x(two_bin_grid, {0.2, 0.8}, ForecastMeta{"x", "nat", 1, 201940});
        CHECK_THROWS_AS(combine({a, x}, WeightVector({0.5, 0.5})), DomainError);
    }
    SUBCASE("meta mismatch rejected") {
        auto other = BinnedForecast(canonical_grid(), a.mass(), ForecastMeta{"m", "HHS1", 1, 201940});
        CHECK_THROWS_AS(combine({a, other}, WeightVector({0.5, 0.5})), DomainError);
    }
}

TEST_CASE("combine mass sums to one for random inputs") {
    SeededRng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 4);
        std::vector<BinnedForecast> forecasts;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> mass(131);
            double sum = 0.0;
            for (double& p : mass) {
                p = rng.uniform();
                sum += p;
            }
            for (double& p : mass) p /= sum;
            forecasts.push_back(make_forecast(mass));
        }
        auto pi = testutil::random_simplex(rng, m);
        auto pooled = combine(forecasts, pi);
        double total = 0.0;
        for (double p : pooled.mass()) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

        // pooled score equals log of the weighted component probabilities
        const std::size_t bin = static_cast<std::size_t>(rng.uniform() * 131);
        double mixture = 0.0;
        for (std::size_t i = 0; i < m; ++i) mixture += pi[i] * forecasts[i].mass()[bin];
        if (mixture > std::exp(kLogScoreFloor)) {
            bool truncated = false;
            for (std::size_t i = 0; i < m; ++i)
                if (forecasts[i].mass()[bin] <= std::exp(kLogScoreFloor)) truncated = true;
            if (!truncated)
                CHECK(log_score(pooled, bin) == doctest::Approx(std::log(mixture)).epsilon(1e-9));
        }
    }
}

TEST_CASE("weight vector invariants") {
    CHECK_THROWS_AS(WeightVector({0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), DomainError);
    auto u = WeightVector::uniform(21);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += u[i];
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("forecast mass validation") {
    std::vector<double> bad(131, 0.0);
    bad[0] = 0.5;
    CHECK_THROWS_AS(make_forecast(bad), DomainError);
    bad[0] = -1.0;
    bad[1] = 2.0;
    CHECK_THROWS_AS(make_forecast(bad), DomainError);
}

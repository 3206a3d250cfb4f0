#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ares/errors.hpp"
#include "ares/evaluation.hpp"

using namespace ares;
using V = std::vector<double>;

TEST_CASE("rmse") {
    CHECK(rmse(V{1, 2, 3}, V{1, 2, 5}) == doctest::Approx(1.154701).epsilon(1e-6));
    CHECK(rmse(V{2}, V{5}) == 3.0);
    CHECK(rmse(V{0.3, 4, 9}, V{0.3, 4, 9}) == 0.0);
    CHECK_THROWS_AS(rmse(V{1, 2}, V{1}), ShapeError);
    CHECK_THROWS_AS(rmse(V{}, V{}), ShapeError);
}

TEST_CASE("relative_rmse") {
    CHECK(relative_rmse(V{1.1, 2.2}, V{1, 2}) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_THROWS_AS(relative_rmse(V{1, 1}, V{1, 0}), DomainError);
    CHECK_THROWS_AS(relative_rmse(V{1}, V{-2}), DomainError);
    const V pred{0.5, 1.7, 1.0, 3.0};
    const V ones(4, 1.0);
    CHECK(relative_rmse(pred, ones) == doctest::Approx(100.0 * rmse(pred, ones)).epsilon(1e-14));
}

TEST_CASE("pearson") {
    CHECK(pearson(V{1, 2, 3, 4}, V{2, 4, 6, 8}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(V{1, 2, 3, 4}, V{6, 5, 4, 3}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(pearson(V{1, 1, 1}, V{1, 2, 3}), DomainError);
    CHECK_THROWS_AS(pearson(V{1, 2, 3}, V{4, 4, 4}), DomainError);
    CHECK_THROWS_AS(pearson(V{1, 2}, V{1, 2, 3}), ShapeError);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int k = 0; k < 20; ++k) {
        V a(30), b(30);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = g(rng), b[i] = a[i] + g(rng);
        const double r = pearson(a, b);
        CHECK(r == doctest::Approx(pearson(b, a)).epsilon(1e-14));
        V scaled(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) scaled[i] = 3.5 * a[i] - 11.0;
        CHECK(std::abs(pearson(scaled, b) - r) <= 1e-12);
    }
}

TEST_CASE("summarize averages HHS regions only") {
    std::vector<PredictionTrack> tracks{
        {Region::National, "ares", {1, 2, 3}, {1, 2, 3}},
        {Region::Hhs1, "ares", {1, 2, 3}, {1, 2, 5}},
        {Region::Hhs2, "ares", {2, 3, 4}, {2, 3, 4}},
    };
    const auto s = summarize(tracks);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[1].rmse == doctest::Approx(1.154701).epsilon(1e-6));
    REQUIRE(s.regional_averages.size() == 1);
    CHECK(s.regional_averages[0].model == "ares");
    CHECK(s.regional_averages[0].rmse == doctest::Approx(1.154701 / 2).epsilon(1e-6));
}

TEST_CASE("summarize reports undefined metrics as NaN") {
    std::vector<PredictionTrack> tracks{{Region::Hhs3, "ar2", {1, 1, 1}, {0, 2, 3}}};
    const auto s = summarize(tracks);
    CHECK(std::isnan(s.rows[0].rel_rmse));
    CHECK(std::isnan(s.rows[0].pearson));
    CHECK(std::isfinite(s.rows[0].rmse));
}

TEST_CASE("metrics.csv layout") {
    std::vector<MetricsRow> rows{{Region::Hhs4, "ar2", 0.5, 12.25, 0.9}};
    std::ostringstream out;
    write_metrics_csv(out, rows);
    CHECK(out.str() == "region,model,rmse,rel_rmse_pct,pearson\nhhs4,ar2,0.500000,12.250000,0.900000\n");
}

TEST_CASE("model labels") {
    CHECK(model_label("ares") == "SVM (linear) + AR(2)");
    CHECK(model_label("ar2") == "AR(2)");
    CHECK(model_label("linear") == "Linear (univariate)");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "eofcast/errors.hpp"
#include "eofcast/metrics.hpp"

using namespace eofcast;

TEST_CASE("naive_forecast: repeats the last training value")
{
    const std::vector<double> train{1.0, 2.0, 3.0};
    CHECK(naive_forecast(train, 2) == std::vector<double>{3.0, 3.0});
    CHECK(naive_forecast(train, 0).empty());
    CHECK(naive_forecast(std::vector<double>{7.0}, 3) ==
          std::vector<double>{7.0, 7.0, 7.0});
    CHECK_THROWS_AS(naive_forecast(std::vector<double>{}, 1), EmptySeries);
    CHECK_THROWS_AS(naive_forecast(train, -1), InvalidArgument);
}

TEST_CASE("forecast_metrics: hand-checked row")
{
    const std::vector<double> actual{1.0, 2.0};
    const std::vector<double> forecast{2.0, 4.0};
    const std::vector<double> train{0.0, 1.0, 2.0};
    const AccuracyRow row = forecast_metrics(actual, forecast, train);

    // errors are (1, 2); naive in-sample MAE over train is 1
    CHECK(row.mae == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(row.rmse == doctest::Approx(std::sqrt(2.5)).epsilon(1e-9));
    CHECK(row.mase == doctest::Approx(1.5).epsilon(1e-9));
    REQUIRE(row.mape.has_value());
    CHECK(*row.mape == doctest::Approx(100.0).epsilon(1e-9));
    // smape terms: 2*1/3 and 2*2/6 -> mean 1/3+... = (100/1.5 + 100*2/3)/2
    CHECK(row.smape == doctest::Approx(200.0 / 3.0).epsilon(1e-9));
    CHECK(row.mape_excluded == 0);
}

TEST_CASE("forecast_metrics: perfect forecast scores zero")
{
    const std::vector<double> actual{3.0, 1.0, 4.0};
    const std::vector<double> train{1.0, 2.0, 5.0};
    const AccuracyRow row = forecast_metrics(actual, actual, train);
    CHECK(row.mae == 0.0);
    CHECK(row.rmse == 0.0);
    CHECK(row.mase == 0.0);
    CHECK(row.smape == 0.0);
    REQUIRE(row.mape.has_value());
    CHECK(*row.mape == 0.0);
}

TEST_CASE("forecast_metrics: zero actuals drop out of MAPE")
{
    const std::vector<double> train{0.0, 2.0};

    // one zero actual: excluded from MAPE, counted
    const AccuracyRow some = forecast_metrics(std::vector<double>{0.0, 2.0},
                                              std::vector<double>{1.0, 3.0}, train);
    REQUIRE(some.mape.has_value());
    CHECK(*some.mape == doctest::Approx(50.0));
    CHECK(some.mape_excluded == 1);
    // the 0/1 step contributes a full 200% to SMAPE, the 2/3 step 40%
    CHECK(some.smape == doctest::Approx((200.0 + 40.0) / 2.0));

    // all actuals zero: MAPE is absent, not zero
    const AccuracyRow none = forecast_metrics(std::vector<double>{0.0, 0.0},
                                              std::vector<double>{1.0, 0.0}, train);
    CHECK(!none.mape.has_value());
    CHECK(none.mape_excluded == 2);
    // the 0-vs-0 SMAPE term counts as zero
    CHECK(none.smape == doctest::Approx(100.0));
}

TEST_CASE("forecast_metrics: in-sample naive forecast has MASE exactly 1")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(5.0, 2.0);
    std::vector<double> series(50);
    for (auto& v : series) v = dist(rng);

    // forecast series[1..] by the naive lag-1 rule and score it against the
    // same series used for scaling: the ratio collapses to 1 by construction
    const std::vector<double> actual(series.begin() + 1, series.end());
    const std::vector<double> forecast(series.begin(), series.end() - 1);
    const AccuracyRow row = forecast_metrics(actual, forecast, series);
    CHECK(row.mase == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forecast_metrics: validation")
{
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> train{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(forecast_metrics({}, {}, train), EmptySeries);
    CHECK_THROWS_AS(forecast_metrics(a, std::vector<double>{1.0}, train), LengthMismatch);
    CHECK_THROWS_AS(forecast_metrics(a, a, std::vector<double>{1.0}), InvalidArgument);
    // constant training series: the naive scale is zero
    CHECK_THROWS_AS(forecast_metrics(a, a, std::vector<double>{2.0, 2.0, 2.0}),
                    ZeroNaiveError);
}

TEST_CASE("forecast_metrics: random-pair invariants")
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> dist(0.0, 3.0);
    const std::vector<double> train{0.0, 1.0, 3.0, 2.0};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> actual(6), forecast(6);
        for (auto& v : actual) v = dist(rng);
        for (auto& v : forecast) v = dist(rng);
        const AccuracyRow row = forecast_metrics(actual, forecast, train);
        CHECK(row.mae <= row.rmse + 1e-12);
        CHECK(row.smape >= 0.0);
        CHECK(row.smape <= 200.0 + 1e-12);
        CHECK(row.mae >= 0.0);
    }
}

TEST_CASE("forecast_metrics: MAE and RMSE are shift invariant")
{
    const std::vector<double> actual{1.0, 5.0, 2.0};
    const std::vector<double> forecast{2.0, 4.5, 0.0};
    const std::vector<double> train{0.0, 1.0, 4.0};
    const AccuracyRow base = forecast_metrics(actual, forecast, train);

    std::vector<double> actual_s(actual), forecast_s(forecast), train_s(train);
    for (auto& v : actual_s) v += 100.0;
    for (auto& v : forecast_s) v += 100.0;
    for (auto& v : train_s) v += 100.0;
    const AccuracyRow shifted = forecast_metrics(actual_s, forecast_s, train_s);
    CHECK(shifted.mae == doctest::Approx(base.mae).epsilon(1e-12));
    CHECK(shifted.rmse == doctest::Approx(base.rmse).epsilon(1e-12));
    CHECK(shifted.mase == doctest::Approx(base.mase).epsilon(1e-12));
}

TEST_CASE("alpha_stability: self and sign-flip give perfect stability")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd x(8, 15);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = dist(rng);
    const EofModel model = eof_decompose(x);

    const auto self = alpha_stability(model, model, 3);
    REQUIRE(self.size() == 3);
    for (double s : self) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    // flipping the sign of a (u, v) pair leaves |cos| at 1
    EofModel flipped = model;
    flipped.u.col(1) *= -1.0;
    flipped.v.col(1) *= -1.0;
    const auto flip = alpha_stability(model, flipped, 3);
    for (double s : flip) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    EofModel other = model;
    other.n_locations = 9;
    other.u.conservativeResize(9, Eigen::NoChange);
    CHECK_THROWS_AS(alpha_stability(model, other, 2), ShapeMismatch);
    CHECK_THROWS_AS(alpha_stability(model, model, 0), InvalidArgument);
    CHECK_THROWS_AS(alpha_stability(model, model, 99), InvalidArgument);
}

TEST_CASE("alpha_stability: stationary window extension stays high")
{
    // a stable rank-2 signal: growing the window must not rotate the modes
    const Eigen::Index n = 10;
    std::mt19937_64 rng(41);
    std::normal_distribution<double> dist(0.0, 0.05);
    Eigen::VectorXd a1(n), a2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a1[i] = std::sin(0.7 * static_cast<double>(i) + 0.3);
        a2[i] = std::cos(1.3 * static_cast<double>(i));
    }
    Eigen::MatrixXd x(n, 500);
    for (Eigen::Index t = 0; t < 500; ++t) {
        const double s = static_cast<double>(t);
        x.col(t) = a1 * (4.0 * std::sin(0.017 * s)) + a2 * (1.5 * std::cos(0.09 * s));
        for (Eigen::Index i = 0; i < n; ++i) x(i, t) += dist(rng);
    }

    const EofModel shorter = eof_decompose(x.leftCols(400));
    const EofModel longer = eof_decompose(x);
    const auto stab = alpha_stability(shorter, longer, 2);
    for (double s : stab) CHECK(s > 0.95);
}

TEST_CASE("write_accuracy_csv: layout and NA handling")
{
    std::vector<AccuracyRow> rows(2);
    rows[0] = {"cluster_1_medoid_42", 1.5, 100.0, 1.5, 200.0 / 3.0, std::sqrt(2.5), 0};
    rows[1].label = "cluster_2_naive";
    rows[1].mae = 0.25;
    rows[1].mape = std::nullopt;
    rows[1].mase = 2.0;
    rows[1].smape = 12.5;
    rows[1].rmse = 0.5;
    rows[1].mape_excluded = 31;

    const auto path = std::filesystem::temp_directory_path() / "eofcast_accuracy.csv";
    write_accuracy_csv(rows, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,mae,mape,mase,smape,rmse");
    std::getline(in, line);
    CHECK(line == "cluster_1_medoid_42,1.5,100,1.5,66.6666667,1.58113883");
    std::getline(in, line);
    CHECK(line == "cluster_2_naive,0.25,NA,2,12.5,0.5");
    CHECK(!std::getline(in, line));
}

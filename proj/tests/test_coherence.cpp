#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "eofcast/coherence.hpp"
#include "eofcast/dates.hpp"
#include "eofcast/errors.hpp"
#include "eofcast/grid.hpp"

using namespace eofcast;

namespace {

/// Daily field over whole calendar years with caller-supplied values.
SpatioTemporalField make_field(int n_locations, int first_year, int n_years,
                               const std::function<double(int, const Date&)>& value)
{
    std::vector<Location> locations;
    for (int i = 0; i < n_locations; ++i)
        locations.push_back({i + 1, -72.0 + 0.1 * i, -33.0, 100.0 * i});

    std::vector<Date> dates;
    Date d{first_year, 1, 1};
    const Date stop{first_year + n_years, 1, 1};
    while (d < stop) {
        dates.push_back(d);
        d = add_days(d, 1);
    }

    Eigen::MatrixXd values(n_locations, static_cast<Eigen::Index>(dates.size()));
    for (int i = 0; i < n_locations; ++i)
        for (size_t j = 0; j < dates.size(); ++j)
            values(i, static_cast<Eigen::Index>(j)) = value(i, dates[j]);
    return {locations, TimeAxis(dates), std::move(values), "precipitation"};
}

AnnualSeriesMatrix annual_from(const Eigen::MatrixXd& values)
{
    AnnualSeriesMatrix annual;
    annual.values = values;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        annual.years.push_back(2000 + static_cast<int>(i));
    for (Eigen::Index j = 0; j < values.cols(); ++j)
        annual.location_ids.push_back(static_cast<int>(j) + 1);
    return annual;
}

} // namespace

TEST_CASE("seasonal_series: amount, intensity, frequency oracles")
{
    // one location, two years; rain falls only on May 5 (5 mm) and May 6 (3 mm)
    // of the first year, and never in the second
    const auto field = make_field(1, 2018, 2, [](int, const Date& d) {
        if (d.year == 2018 && d.month == 5 && d.day == 5) return 5.0;
        if (d.year == 2018 && d.month == 5 && d.day == 6) return 3.0;
        return 0.0;
    });
    const std::set<int> mjja{5, 6, 7, 8};

    const auto ram = seasonal_series(field, SeasonalStatistic::rainfall_amount, mjja);
    REQUIRE(ram.n_years() == 2);
    REQUIRE(ram.n_locations() == 1);
    CHECK(ram.years == std::vector<int>{2018, 2019});
    CHECK(ram.values(0, 0) == doctest::Approx(8.0));
    CHECK(ram.values(1, 0) == doctest::Approx(0.0));

    const auto ri = seasonal_series(field, SeasonalStatistic::rainfall_intensity, mjja);
    CHECK(ri.values(0, 0) == doctest::Approx(4.0)); // 8 mm over two wet days
    CHECK(ri.values(1, 0) == doctest::Approx(0.0)); // no wet day at all

    // May..Aug 2018 has 31+30+31+31 = 123 days
    const auto rf = seasonal_series(field, SeasonalStatistic::rainfall_frequency, mjja);
    CHECK(rf.values(0, 0) == doctest::Approx(2.0 / 123.0));
    CHECK(rf.values(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("seasonal_series: wet threshold is strict")
{
    const auto field = make_field(1, 2018, 1, [](int, const Date& d) {
        return d.month == 6 ? 1.0 : 0.0; // exactly at the default threshold
    });
    const std::set<int> june{6};
    const auto ri = seasonal_series(field, SeasonalStatistic::rainfall_intensity, june);
    CHECK(ri.values(0, 0) == doctest::Approx(0.0)); // 1.0 is not > 1.0

    const auto rf = seasonal_series(field, SeasonalStatistic::rainfall_frequency, june,
                                    0.5);
    CHECK(rf.values(0, 0) == doctest::Approx(1.0)); // all 30 days wet at 0.5

    CHECK_THROWS_AS(
        seasonal_series(field, SeasonalStatistic::rainfall_amount, {}), InvalidArgument);
    CHECK_THROWS_AS(seasonal_series(field, SeasonalStatistic::rainfall_amount, june, 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(seasonal_series(field, SeasonalStatistic::rainfall_amount, {13}),
                    InvalidArgument);
}

TEST_CASE("seasonal_series: partial years without in-season days are dropped")
{
    // axis covers 2018-01-01 .. 2019-02-28: 2019 has no May..Aug days
    std::vector<Location> locations{{1, -70.0, -33.0, 10.0}};
    std::vector<Date> dates;
    for (Date d{2018, 1, 1}; d < Date{2019, 3, 1}; d = add_days(d, 1)) dates.push_back(d);
    Eigen::MatrixXd values = Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(dates.size()), 2.0);
    const SpatioTemporalField field{locations, TimeAxis(dates), values, "precipitation"};

    const auto ram =
        seasonal_series(field, SeasonalStatistic::rainfall_amount, {5, 6, 7, 8});
    CHECK(ram.years == std::vector<int>{2018});
}

TEST_CASE("var_sai: coherence limits")
{
    // duplicated columns are perfectly coherent: var(SAI) = 1 exactly
    std::mt19937_64 rng(4);
    std::normal_distribution<double> dist(10.0, 3.0);
    Eigen::VectorXd col(30);
    for (auto& v : col.reshaped()) v = dist(rng);
    Eigen::MatrixXd dup(30, 6);
    for (int j = 0; j < 6; ++j) dup.col(j) = col;
    CHECK(var_sai(annual_from(dup)) == doctest::Approx(1.0).epsilon(1e-9));

    // a single location is trivially coherent
    CHECK(var_sai(annual_from(col)) == doctest::Approx(1.0).epsilon(1e-9));

    // independent columns: var(SAI) concentrates near 1/m
    const int years = 200, m = 20;
    Eigen::MatrixXd indep(years, m);
    for (auto& v : indep.reshaped()) v = dist(rng);
    const double v = var_sai(annual_from(indep));
    CHECK(v > 1.0 / m - 0.03);
    CHECK(v < 1.0 / m + 0.03);

    // a constant column cannot be standardized
    Eigen::MatrixXd flat = indep;
    flat.col(3).setConstant(7.0);
    CHECK_THROWS_AS(var_sai(annual_from(flat)), ZeroVariance);

    // fewer than two years leaves no variance to estimate
    CHECK_THROWS_AS(var_sai(annual_from(Eigen::MatrixXd::Zero(1, 4))), InvalidArgument);
}

TEST_CASE("dof: limits and invariances")
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> dist(0.0, 1.0);

    // rank-one correlation: every column a scalar multiple of one signal
    Eigen::VectorXd base(40);
    for (auto& v : base.reshaped()) v = dist(rng);
    Eigen::MatrixXd rank1(40, 5);
    for (int j = 0; j < 5; ++j) rank1.col(j) = (j + 1.0) * base;
    CHECK(dof(annual_from(rank1)) == doctest::Approx(1.0).epsilon(1e-9));

    // exactly uncorrelated columns: build orthogonal centered columns so the
    // correlation matrix is the identity and DOF = m exactly
    Eigen::MatrixXd orth(4, 3);
    orth.col(0) << 1, -1, 1, -1;
    orth.col(1) << 1, 1, -1, -1;
    orth.col(2) << 1, -1, -1, 1;
    CHECK(dof(annual_from(orth)) == doctest::Approx(3.0).epsilon(1e-9));

    // affine rescaling of any column leaves correlation (and DOF) unchanged
    Eigen::MatrixXd x(60, 8);
    for (auto& v : x.reshaped()) v = dist(rng);
    const double d0 = dof(annual_from(x));
    Eigen::MatrixXd y = x;
    y.col(2) = 5.0 * y.col(2) + Eigen::VectorXd::Constant(60, 100.0);
    y.col(7) = -0.25 * y.col(7);
    CHECK(dof(annual_from(y)) == doctest::Approx(d0).epsilon(1e-9));

    // bounds hold on random inputs
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::MatrixXd r(12, 6);
        for (auto& v : r.reshaped()) v = dist(rng);
        const double d = dof(annual_from(r));
        CHECK(d >= 1.0 - 1e-9);
        CHECK(d <= 6.0 + 1e-9);
    }
}

TEST_CASE("altitude_class: boundaries")
{
    CHECK(altitude_class(0.0) == AltitudeClass::low);
    CHECK(altitude_class(500.0) == AltitudeClass::low);
    CHECK(altitude_class(500.1) == AltitudeClass::mid);
    CHECK(altitude_class(1500.0) == AltitudeClass::mid);
    CHECK(altitude_class(1500.1) == AltitudeClass::high);
    CHECK(altitude_class(4000.0) == AltitudeClass::high);

    CHECK(to_string(AltitudeClass::low) == "0-500m");
    CHECK(to_string(AltitudeClass::mid) == "500-1500m");
    CHECK(to_string(AltitudeClass::high) == ">1500m");
}

TEST_CASE("statistic names round trip")
{
    for (auto s : {SeasonalStatistic::rainfall_amount, SeasonalStatistic::rainfall_intensity,
                   SeasonalStatistic::rainfall_frequency})
        CHECK(parse_statistic(to_string(s)) == s);
    CHECK(to_string(SeasonalStatistic::rainfall_amount) == "RAm");
    CHECK(to_string(SeasonalStatistic::rainfall_intensity) == "RI");
    CHECK(to_string(SeasonalStatistic::rainfall_frequency) == "RF");
    CHECK_THROWS_AS(parse_statistic("bogus"), InvalidArgument);
}

TEST_CASE("write_coherence_csv: layout")
{
    const std::vector<CoherenceRow> rows{
        {"cluster_1", 12, SeasonalStatistic::rainfall_amount, 2.5, 0.625},
        {">1500m", 3, SeasonalStatistic::rainfall_frequency, 1.0, 1.0},
    };
    const auto path = std::filesystem::temp_directory_path() / "eofcast_coherence.csv";
    write_coherence_csv(rows, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "group,n_locations,statistic,dof,var_sai");
    std::getline(in, line);
    CHECK(line == "cluster_1,12,RAm,2.5,0.625");
    std::getline(in, line);
    CHECK(line == ">1500m,3,RF,1,1");
    CHECK(!std::getline(in, line));
}

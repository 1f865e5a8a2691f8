#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eofcast/grid.hpp"

namespace eofcast {

enum class SeasonalStatistic {
    rainfall_amount,    // RAm: total seasonal precipitation (mm)
    rainfall_intensity, // RI: mm per wet day, 0 when the season has no wet day
    rainfall_frequency, // RF: wet days / season days
};

std::string to_string(SeasonalStatistic statistic);
SeasonalStatistic parse_statistic(const std::string& name);

/// One seasonal statistic aggregated to a year-by-location matrix. Row i is
/// year `years[i]`; column j is the location `location_ids[j]`.
struct AnnualSeriesMatrix {
    Eigen::MatrixXd values; // l years x m locations
    std::vector<int> years; // strictly increasing
    SeasonalStatistic statistic = SeasonalStatistic::rainfall_amount;
    std::vector<int> location_ids;

    Eigen::Index n_years() const { return values.rows(); }
    Eigen::Index n_locations() const { return values.cols(); }
};

/// Aggregates the daily field into one value per (year, location) over the
/// days whose month lies in `months`. A wet day is value > wet_threshold
/// (strictly). Years with no in-season days in the time axis are dropped.
AnnualSeriesMatrix seasonal_series(const SpatioTemporalField& field,
                                   SeasonalStatistic statistic,
                                   const std::set<int>& months,
                                   double wet_threshold = 1.0);

/// Interannual variance of the standardized anomaly index: standardize each
/// column (sample SD, denominator l-1), average across columns per year, and
/// return the sample variance of that index. Ranges from ~1/m (incoherent)
/// to 1 (all locations perfectly correlated). Throws ZeroVariance when a
/// column is constant.
double var_sai(const AnnualSeriesMatrix& annual);

/// Spatial degrees of freedom m^2 / sum(lambda_j^2) over the eigenvalues of
/// the m x m interannual correlation matrix; 1 = fully coherent, m = none.
double dof(const AnnualSeriesMatrix& annual);

enum class AltitudeClass { low, mid, high }; // <=500 m, (500,1500] m, >1500 m

AltitudeClass altitude_class(double elev_m);
std::string to_string(AltitudeClass cls);

/// One row of the coherence table: a location group (cluster or altitude
/// class) scored under one seasonal statistic.
struct CoherenceRow {
    std::string group;
    int n_locations = 0;
    SeasonalStatistic statistic = SeasonalStatistic::rainfall_amount;
    double dof = 0.0;
    double var_sai = 0.0;
};

/// Writes `group,n_locations,statistic,dof,var_sai` with scores at 9
/// significant digits.
void write_coherence_csv(const std::vector<CoherenceRow>& rows,
                         const std::filesystem::path& path);

} // namespace eofcast

#include "eofcast/coherence.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "eofcast/errors.hpp"
#include "format.hpp"

namespace eofcast {

std::string to_string(SeasonalStatistic statistic)
{
    switch (statistic) {
    case SeasonalStatistic::rainfall_amount: return "RAm";
    case SeasonalStatistic::rainfall_intensity: return "RI";
    case SeasonalStatistic::rainfall_frequency: return "RF";
    }
    throw InvalidArgument("unknown seasonal statistic");
}

SeasonalStatistic parse_statistic(const std::string& name)
{
    if (name == "RAm") return SeasonalStatistic::rainfall_amount;
    if (name == "RI") return SeasonalStatistic::rainfall_intensity;
    if (name == "RF") return SeasonalStatistic::rainfall_frequency;
    throw InvalidArgument("unknown seasonal statistic '" + name + "'");
}

AnnualSeriesMatrix seasonal_series(const SpatioTemporalField& field,
                                   SeasonalStatistic statistic,
                                   const std::set<int>& months, double wet_threshold)
{
    if (months.empty()) throw InvalidArgument("month set is empty");
    for (int m : months)
        if (m < 1 || m > 12)
            throw InvalidArgument("month " + std::to_string(m) + " outside 1..12");
    if (!(wet_threshold > 0.0)) throw InvalidArgument("wet_threshold must be positive");

    // year -> time-axis indices of its in-season days
    std::map<int, std::vector<Eigen::Index>> season_days;
    const auto& dates = field.time().dates();
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(dates.size()); ++t) {
        const Date& d = dates[static_cast<std::size_t>(t)];
        if (months.count(d.month)) season_days[d.year].push_back(t);
    }

    AnnualSeriesMatrix annual;
    annual.statistic = statistic;
    for (const auto& [year, idx] : season_days) annual.years.push_back(year);
    for (const auto& loc : field.locations()) annual.location_ids.push_back(loc.id);

    const auto l = static_cast<Eigen::Index>(annual.years.size());
    const auto m = field.n_locations();
    annual.values.resize(l, m);
    Eigen::Index row = 0;
    for (const auto& [year, idx] : season_days) {
        for (Eigen::Index j = 0; j < m; ++j) {
            double total = 0.0, wet_total = 0.0;
            int wet_days = 0;
            for (Eigen::Index t : idx) {
                const double v = field.values()(j, t);
                total += v;
                if (v > wet_threshold) {
                    wet_total += v;
                    ++wet_days;
                }
            }
            switch (statistic) {
            case SeasonalStatistic::rainfall_amount:
                annual.values(row, j) = total;
                break;
            case SeasonalStatistic::rainfall_intensity:
                annual.values(row, j) = wet_days > 0 ? wet_total / wet_days : 0.0;
                break;
            case SeasonalStatistic::rainfall_frequency:
                annual.values(row, j) =
                    static_cast<double>(wet_days) / static_cast<double>(idx.size());
                break;
            }
        }
        ++row;
    }
    return annual;
}

namespace {

// Columns standardized to zero mean and unit sample SD (denominator l-1).
// Throws ZeroVariance on any constant column.
Eigen::MatrixXd standardized_columns(const AnnualSeriesMatrix& annual)
{
    const auto l = annual.n_years();
    const auto m = annual.n_locations();
    if (l < 2) throw InvalidArgument("need at least two years");
    if (m < 1) throw InvalidArgument("need at least one location");

    Eigen::MatrixXd z(l, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = annual.values.col(j);
        const double mean = col.mean();
        const double sd =
            std::sqrt((col.array() - mean).square().sum() / static_cast<double>(l - 1));
        if (sd == 0.0)
            throw ZeroVariance("location " +
                               std::to_string(annual.location_ids.empty()
                                                  ? j
                                                  : annual.location_ids[static_cast<
                                                        std::size_t>(j)]) +
                               " is constant across years");
        z.col(j) = (col.array() - mean) / sd;
    }
    return z;
}

} // namespace

double var_sai(const AnnualSeriesMatrix& annual)
{
    const Eigen::MatrixXd z = standardized_columns(annual);
    const Eigen::VectorXd sai = z.rowwise().mean();
    const double mean = sai.mean();
    return (sai.array() - mean).square().sum() / static_cast<double>(sai.size() - 1);
}

double dof(const AnnualSeriesMatrix& annual)
{
    const Eigen::MatrixXd z = standardized_columns(annual);
    const auto l = z.rows();
    const auto m = z.cols();
    const Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(l - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw SvdFailure("eigendecomposition of the correlation matrix failed");
    // Round-off can push near-zero eigenvalues slightly negative.
    const Eigen::ArrayXd lambda = solver.eigenvalues().array().max(0.0);
    return static_cast<double>(m * m) / lambda.square().sum();
}

AltitudeClass altitude_class(double elev_m)
{
    if (elev_m <= 500.0) return AltitudeClass::low;
    if (elev_m <= 1500.0) return AltitudeClass::mid;
    return AltitudeClass::high;
}

std::string to_string(AltitudeClass cls)
{
    switch (cls) {
    case AltitudeClass::low: return "0-500m";
    case AltitudeClass::mid: return "500-1500m";
    case AltitudeClass::high: return ">1500m";
    }
    throw InvalidArgument("unknown altitude class");
}

void write_coherence_csv(const std::vector<CoherenceRow>& rows,
                         const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "group,n_locations,statistic,dof,var_sai\n";
    for (const auto& r : rows)
        out << r.group << ',' << r.n_locations << ',' << to_string(r.statistic) << ','
            << detail::fmt_g9(r.dof) << ',' << detail::fmt_g9(r.var_sai) << '\n';
}

} // namespace eofcast

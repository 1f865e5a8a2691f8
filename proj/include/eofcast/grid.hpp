#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eofcast/dates.hpp"

namespace eofcast {

/// One grid point: geographic coordinates plus elevation.
struct Location {
    int id = 0;          // row index within the owning field
    double lon = 0.0;    // degrees east, negative west
    double lat = 0.0;    // degrees north, negative south
    double elev = 0.0;   // meters above sea level (0 when unknown, never NaN)
};

/// Strictly increasing list of calendar dates, daily resolution.
class TimeAxis {
public:
    TimeAxis() = default;
    explicit TimeAxis(std::vector<Date> dates);

    const std::vector<Date>& dates() const { return dates_; }
    std::size_t size() const { return dates_.size(); }
    const Date& operator[](std::size_t j) const { return dates_[j]; }

    /// Index of `d`, or nullopt if the axis does not contain it.
    std::optional<std::size_t> index_of(const Date& d) const;

private:
    std::vector<Date> dates_;
};

/// Dense n locations x p time steps matrix of one climate variable,
/// immutable after construction. Row i belongs to locations()[i],
/// column j to time()[j].
class SpatioTemporalField {
public:
    SpatioTemporalField(std::vector<Location> locations, TimeAxis time,
                        Eigen::MatrixXd values, std::string variable_name);

    const std::vector<Location>& locations() const { return locations_; }
    const TimeAxis& time() const { return time_; }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::string& variable_name() const { return variable_name_; }

    Eigen::Index n_locations() const { return values_.rows(); }
    Eigen::Index n_times() const { return values_.cols(); }

    /// The full time series of one location.
    std::vector<double> series(Eigen::Index i) const;

private:
    std::vector<Location> locations_;
    TimeAxis time_;
    Eigen::MatrixXd values_;
    std::string variable_name_;
};

/// Inclusive calendar window.
struct DateWindow {
    Date start;
    Date end;
};

/// Reads a long-format CSV with header `lon,lat,elev,date,value` into a dense
/// field. The (location, date) pairs must form a complete Cartesian grid.
/// Rows are ordered canonically: latitude descending, then longitude
/// ascending; dates ascending. Negative values are rejected when
/// `variable_name` is "precipitation".
SpatioTemporalField ingest_tidy_csv(const std::filesystem::path& path,
                                    const std::string& variable_name = "precipitation");

/// Writes the exact inverse of ingest_tidy_csv: every value formatted so the
/// round trip is bit-identical.
void write_tidy_csv(const SpatioTemporalField& field, const std::filesystem::path& path);

/// Keeps only the dates inside `window` (when given) whose month is in
/// `months` (when given). Locations are untouched. Throws EmptySelection when
/// nothing survives.
SpatioTemporalField subset(const SpatioTemporalField& field,
                           const std::optional<DateWindow>& window = {},
                           const std::optional<std::set<int>>& months = {});

/// Binary persistence: `meta.json` plus row-major `values.f64le` in `dir`.
void save_field(const SpatioTemporalField& field, const std::filesystem::path& dir);
SpatioTemporalField load_field(const std::filesystem::path& dir);

} // namespace eofcast

#include "eofcast/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "eofcast/errors.hpp"

namespace eofcast {

namespace {

std::string fmt_exact(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view s, long line, const char* column)
{
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw MalformedRow("line " + std::to_string(line) + ": cannot parse " + column +
                           " '" + std::string(s) + "'");
    return v;
}

} // namespace

TimeAxis::TimeAxis(std::vector<Date> dates) : dates_(std::move(dates))
{
    if (dates_.empty()) throw InvalidArgument("time axis must contain at least one date");
    for (std::size_t j = 1; j < dates_.size(); ++j)
        if (!(dates_[j - 1] < dates_[j]))
            throw InvalidArgument("time axis not strictly increasing at " +
                                  dates_[j].to_string());
}

std::optional<std::size_t> TimeAxis::index_of(const Date& d) const
{
    auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end() || !(*it == d)) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

SpatioTemporalField::SpatioTemporalField(std::vector<Location> locations, TimeAxis time,
                                         Eigen::MatrixXd values, std::string variable_name)
    : locations_(std::move(locations)),
      time_(std::move(time)),
      values_(std::move(values)),
      variable_name_(std::move(variable_name))
{
    if (values_.rows() != static_cast<Eigen::Index>(locations_.size()))
        throw ShapeMismatch("value matrix rows do not match location count");
    if (values_.cols() != static_cast<Eigen::Index>(time_.size()))
        throw ShapeMismatch("value matrix columns do not match time axis length");
    if (!values_.allFinite()) throw NonFiniteValue("field contains a non-finite value");
    for (const auto& loc : locations_) {
        if (loc.lon < -180.0 || loc.lon > 180.0 || loc.lat < -90.0 || loc.lat > 90.0)
            throw InvalidArgument("location " + std::to_string(loc.id) +
                                  " has coordinates outside [-180,180] x [-90,90]");
        if (!std::isfinite(loc.elev))
            throw InvalidArgument("location " + std::to_string(loc.id) +
                                  " has non-finite elevation");
    }
}

std::vector<double> SpatioTemporalField::series(Eigen::Index i) const
{
    std::vector<double> out(static_cast<std::size_t>(values_.cols()));
    for (Eigen::Index j = 0; j < values_.cols(); ++j)
        out[static_cast<std::size_t>(j)] = values_(i, j);
    return out;
}

SpatioTemporalField ingest_tidy_csv(const std::filesystem::path& path,
                                    const std::string& variable_name)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "lon,lat,elev,date,value")
        throw MalformedRow("bad header '" + line + "': expected lon,lat,elev,date,value");

    struct RawRow {
        double lon, lat, elev, value;
        Date date;
        long line_no;
    };
    std::vector<RawRow> rows;
    const bool reject_negative = variable_name == "precipitation";

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string_view, 5> fields;
        std::string_view rest = line;
        for (int f = 0; f < 5; ++f) {
            const auto comma = rest.find(',');
            if (f < 4) {
                if (comma == std::string_view::npos)
                    throw MalformedRow("line " + std::to_string(line_no) +
                                       ": expected 5 fields, got fewer");
                fields[static_cast<std::size_t>(f)] = rest.substr(0, comma);
                rest = rest.substr(comma + 1);
            } else {
                if (comma != std::string_view::npos)
                    throw MalformedRow("line " + std::to_string(line_no) +
                                       ": expected 5 fields, got more");
                fields[static_cast<std::size_t>(f)] = rest;
            }
        }

        RawRow r;
        r.lon = parse_double(fields[0], line_no, "lon");
        r.lat = parse_double(fields[1], line_no, "lat");
        r.elev = parse_double(fields[2], line_no, "elev");
        r.date = Date::parse_iso(std::string(fields[3]));
        r.value = parse_double(fields[4], line_no, "value");
        r.line_no = line_no;

        if (r.lon < -180.0 || r.lon > 180.0 || r.lat < -90.0 || r.lat > 90.0)
            throw MalformedRow("line " + std::to_string(line_no) +
                               ": coordinates outside [-180,180] x [-90,90]");
        if (!std::isfinite(r.elev))
            throw MalformedRow("line " + std::to_string(line_no) + ": non-finite elevation");
        if (!std::isfinite(r.value))
            throw NonFiniteValue("line " + std::to_string(line_no) + ": non-finite value");
        if (reject_negative && r.value < 0.0)
            throw NegativeValue("line " + std::to_string(line_no) +
                                ": negative precipitation " + fmt_exact(r.value));
        rows.push_back(r);
    }
    if (rows.empty()) throw MalformedRow("no data rows in " + path.string());

    // Canonical location order: latitude descending, longitude ascending.
    std::map<std::pair<double, double>, double> loc_elev; // (-lat, lon) -> elev
    std::set<Date> date_set;
    for (const auto& r : rows) {
        auto key = std::make_pair(-r.lat, r.lon);
        auto [it, inserted] = loc_elev.emplace(key, r.elev);
        if (!inserted && it->second != r.elev)
            throw MalformedRow("line " + std::to_string(r.line_no) +
                               ": conflicting elevation for (" + fmt_exact(r.lon) + "," +
                               fmt_exact(r.lat) + ")");
        date_set.insert(r.date);
    }

    std::vector<Location> locations;
    locations.reserve(loc_elev.size());
    std::map<std::pair<double, double>, int> loc_index;
    for (const auto& [key, elev] : loc_elev) {
        const int id = static_cast<int>(locations.size());
        locations.push_back(Location{id, key.second, -key.first, elev});
        loc_index.emplace(key, id);
    }

    std::vector<Date> dates(date_set.begin(), date_set.end());
    std::map<Date, int> date_index;
    for (std::size_t j = 0; j < dates.size(); ++j)
        date_index.emplace(dates[j], static_cast<int>(j));

    const auto n = static_cast<Eigen::Index>(locations.size());
    const auto p = static_cast<Eigen::Index>(dates.size());
    Eigen::MatrixXd values =
        Eigen::MatrixXd::Constant(n, p, std::numeric_limits<double>::quiet_NaN());

    for (const auto& r : rows) {
        const int i = loc_index.at({-r.lat, r.lon});
        const int j = date_index.at(r.date);
        if (!std::isnan(values(i, j)))
            throw DuplicateCell("line " + std::to_string(r.line_no) + ": duplicate cell (" +
                                fmt_exact(r.lon) + "," + fmt_exact(r.lat) + "," +
                                r.date.to_string() + ")");
        values(i, j) = r.value;
    }

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (std::isnan(values(i, j)))
                throw MissingCell("missing cell (" + fmt_exact(locations[i].lon) + "," +
                                  fmt_exact(locations[i].lat) + "," +
                                  dates[static_cast<std::size_t>(j)].to_string() + ")");

    return SpatioTemporalField(std::move(locations), TimeAxis(std::move(dates)),
                               std::move(values), variable_name);
}

void write_tidy_csv(const SpatioTemporalField& field, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "lon,lat,elev,date,value\n";
    const auto& locs = field.locations();
    const auto& dates = field.time().dates();
    for (std::size_t i = 0; i < locs.size(); ++i) {
        const std::string prefix = fmt_exact(locs[i].lon) + "," + fmt_exact(locs[i].lat) +
                                   "," + fmt_exact(locs[i].elev) + ",";
        for (std::size_t j = 0; j < dates.size(); ++j) {
            out << prefix << dates[j].to_string() << ','
                << fmt_exact(field.values()(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j)))
                << '\n';
        }
    }
}

SpatioTemporalField subset(const SpatioTemporalField& field,
                           const std::optional<DateWindow>& window,
                           const std::optional<std::set<int>>& months)
{
    if (months) {
        if (months->empty()) throw InvalidArgument("month set must not be empty");
        for (int m : *months)
            if (m < 1 || m > 12)
                throw InvalidArgument("month " + std::to_string(m) + " outside 1..12");
    }
    if (window && window->end < window->start)
        throw InvalidArgument("date window end precedes start");

    std::vector<Eigen::Index> keep;
    const auto& dates = field.time().dates();
    for (std::size_t j = 0; j < dates.size(); ++j) {
        const Date& d = dates[j];
        if (window && (d < window->start || window->end < d)) continue;
        if (months && !months->count(d.month)) continue;
        keep.push_back(static_cast<Eigen::Index>(j));
    }
    if (keep.empty()) throw EmptySelection("no dates survive the requested subset");

    std::vector<Date> new_dates;
    new_dates.reserve(keep.size());
    Eigen::MatrixXd values(field.n_locations(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        new_dates.push_back(dates[static_cast<std::size_t>(keep[c])]);
        values.col(static_cast<Eigen::Index>(c)) = field.values().col(keep[c]);
    }
    return SpatioTemporalField(field.locations(), TimeAxis(std::move(new_dates)),
                               std::move(values), field.variable_name());
}

void save_field(const SpatioTemporalField& field, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);

    nlohmann::json meta;
    meta["variable_name"] = field.variable_name();
    meta["n"] = field.n_locations();
    meta["p"] = field.n_times();
    auto& jlocs = meta["locations"] = nlohmann::json::array();
    for (const auto& loc : field.locations())
        jlocs.push_back({{"id", loc.id}, {"lon", loc.lon}, {"lat", loc.lat}, {"elev", loc.elev}});
    auto& jdates = meta["dates"] = nlohmann::json::array();
    for (const auto& d : field.time().dates()) jdates.push_back(d.to_string());

    std::ofstream mj(dir / "meta.json", std::ios::binary);
    if (!mj) throw InvalidArgument("cannot write " + (dir / "meta.json").string());
    mj << meta.dump(2) << '\n';

    std::ofstream vb(dir / "values.f64le", std::ios::binary);
    if (!vb) throw InvalidArgument("cannot write " + (dir / "values.f64le").string());
    std::vector<double> row(static_cast<std::size_t>(field.n_times()));
    for (Eigen::Index i = 0; i < field.n_locations(); ++i) {
        for (Eigen::Index j = 0; j < field.n_times(); ++j)
            row[static_cast<std::size_t>(j)] = field.values()(i, j);
        vb.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

SpatioTemporalField load_field(const std::filesystem::path& dir)
{
    std::ifstream mj(dir / "meta.json");
    if (!mj) throw InvalidArgument("cannot open " + (dir / "meta.json").string());
    nlohmann::json meta;
    mj >> meta;

    const auto n = meta.at("n").get<Eigen::Index>();
    const auto p = meta.at("p").get<Eigen::Index>();

    std::vector<Location> locations;
    locations.reserve(static_cast<std::size_t>(n));
    for (const auto& jl : meta.at("locations"))
        locations.push_back(Location{jl.at("id").get<int>(), jl.at("lon").get<double>(),
                                     jl.at("lat").get<double>(), jl.at("elev").get<double>()});

    std::vector<Date> dates;
    dates.reserve(static_cast<std::size_t>(p));
    for (const auto& jd : meta.at("dates")) dates.push_back(Date::parse_iso(jd.get<std::string>()));

    std::ifstream vb(dir / "values.f64le", std::ios::binary);
    if (!vb) throw InvalidArgument("cannot open " + (dir / "values.f64le").string());
    Eigen::MatrixXd values(n, p);
    std::vector<double> row(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
        vb.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!vb) throw InvalidArgument("truncated values.f64le in " + dir.string());
        for (Eigen::Index j = 0; j < p; ++j) values(i, j) = row[static_cast<std::size_t>(j)];
    }
    return SpatioTemporalField(std::move(locations), TimeAxis(std::move(dates)),
                               std::move(values), meta.at("variable_name").get<std::string>());
}

} // namespace eofcast

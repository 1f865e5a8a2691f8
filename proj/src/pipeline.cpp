#include "eofcast/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "eofcast/cluster.hpp"
#include "eofcast/dtw.hpp"
#include "eofcast/eof.hpp"
#include "eofcast/errors.hpp"
#include "eofcast/forecast.hpp"
#include "format.hpp"
#include "parallel.hpp"

namespace eofcast {

namespace {

using nlohmann::json;

// ---- strict config parsing -------------------------------------------------

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&key](const char* a) { return key == a; }))
            throw ConfigError("unknown key '" + key + "' in " + scope);
    }
}

const json* find(const json& obj, const char* key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

int get_int(const json& obj, const char* key, const std::string& scope)
{
    const json* v = find(obj, key);
    if (!v || !v->is_number_integer())
        throw ConfigError("key '" + std::string(key) + "' in " + scope +
                          " must be an integer");
    return v->get<int>();
}

double get_double(const json& obj, const char* key, const std::string& scope)
{
    const json* v = find(obj, key);
    if (!v || !v->is_number())
        throw ConfigError("key '" + std::string(key) + "' in " + scope +
                          " must be a number");
    return v->get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& scope)
{
    const json* v = find(obj, key);
    if (!v || !v->is_string())
        throw ConfigError("key '" + std::string(key) + "' in " + scope +
                          " must be a string");
    return v->get<std::string>();
}

Date get_date(const json& obj, const char* key, const std::string& scope)
{
    const std::string s = get_string(obj, key, scope);
    try {
        return Date::parse_iso(s);
    } catch (const Error& e) {
        throw ConfigError("key '" + std::string(key) + "' in " + scope + ": " +
                          e.what());
    }
}

DateWindow get_window(const json& obj, const std::string& scope)
{
    if (!obj.is_object()) throw ConfigError(scope + " must be an object");
    check_keys(obj, scope, {"start", "end"});
    DateWindow w{get_date(obj, "start", scope), get_date(obj, "end", scope)};
    if (w.end < w.start) throw ConfigError(scope + ": end precedes start");
    return w;
}

void parse_clustering(const json& obj, PipelineConfig& cfg)
{
    const std::string scope = "'clustering'";
    if (!obj.is_object()) throw ConfigError(scope + " must be an object");
    check_keys(obj, scope, {"window", "months", "k", "dtw_band", "sample_ids", "normalize"});
    if (const json* v = find(obj, "window")) cfg.cluster_window = get_window(*v, "'clustering.window'");
    if (const json* v = find(obj, "months")) {
        if (!v->is_array() || v->empty())
            throw ConfigError("key 'months' in " + scope + " must be a nonempty array");
        cfg.months.clear();
        for (const auto& m : *v) {
            if (!m.is_number_integer() || m.get<int>() < 1 || m.get<int>() > 12)
                throw ConfigError("key 'months' in " + scope +
                                  " must contain integers in 1..12");
            cfg.months.insert(m.get<int>());
        }
    }
    if (find(obj, "k")) {
        cfg.k = get_int(obj, "k", scope);
        if (cfg.k < 1) throw ConfigError("key 'k' in " + scope + " must be >= 1");
    }
    if (find(obj, "dtw_band")) {
        const int band = get_int(obj, "dtw_band", scope);
        if (band < 0) throw ConfigError("key 'dtw_band' in " + scope + " must be >= 0");
        cfg.dtw_band = band;
    }
    if (const json* v = find(obj, "sample_ids")) {
        if (!v->is_array())
            throw ConfigError("key 'sample_ids' in " + scope + " must be an array");
        for (const auto& s : *v) {
            if (!s.is_number_integer() || s.get<int>() < 0)
                throw ConfigError("key 'sample_ids' in " + scope +
                                  " must contain nonnegative integers");
            cfg.sample_ids.push_back(s.get<int>());
        }
    }
    if (const json* v = find(obj, "normalize")) {
        if (!v->is_boolean())
            throw ConfigError("key 'normalize' in " + scope + " must be a boolean");
        cfg.normalize = v->get<bool>();
    }
}

void parse_forecast(const json& obj, ForecastConfig& fc)
{
    const std::string scope = "'forecast'";
    if (!obj.is_object()) throw ConfigError(scope + " must be an object");
    check_keys(obj, scope,
               {"levels", "filter", "lag", "hidden_units", "epochs", "learning_rate",
                "batch_size"});
    if (find(obj, "levels")) fc.levels = get_int(obj, "levels", scope);
    if (find(obj, "filter")) {
        try {
            fc.filter = parse_filter(get_string(obj, "filter", scope));
        } catch (const Error& e) {
            throw ConfigError(std::string("key 'filter' in ") + scope + ": " + e.what());
        }
    }
    if (find(obj, "lag")) fc.lag = get_int(obj, "lag", scope);
    if (find(obj, "hidden_units")) fc.hidden_units = get_int(obj, "hidden_units", scope);
    if (find(obj, "epochs")) fc.epochs = get_int(obj, "epochs", scope);
    if (find(obj, "learning_rate")) fc.learning_rate = get_double(obj, "learning_rate", scope);
    if (find(obj, "batch_size")) fc.batch_size = get_int(obj, "batch_size", scope);

    if (fc.levels < 1) throw ConfigError("key 'levels' in " + scope + " must be >= 1");
    if (fc.lag < 1) throw ConfigError("key 'lag' in " + scope + " must be >= 1");
    if (fc.hidden_units < 1)
        throw ConfigError("key 'hidden_units' in " + scope + " must be >= 1");
    if (fc.epochs < 1) throw ConfigError("key 'epochs' in " + scope + " must be >= 1");
    if (!(fc.learning_rate > 0.0))
        throw ConfigError("key 'learning_rate' in " + scope + " must be > 0");
    if (fc.batch_size < 1) throw ConfigError("key 'batch_size' in " + scope + " must be >= 1");
}

// ---- artifact paths and shared stage plumbing ------------------------------

struct Paths {
    std::filesystem::path out;

    std::filesystem::path field_dir() const { return out / "field"; }
    std::filesystem::path clusters_json() const { return out / "clusters.json"; }
    std::filesystem::path dtw() const { return out / "dtw.f64le"; }
    std::filesystem::path assignments() const { return out / "assignments.json"; }
    std::filesystem::path coherence_csv() const { return out / "coherence.csv"; }
    std::filesystem::path accuracy_csv() const { return out / "accuracy.csv"; }
    std::filesystem::path report_json() const { return out / "report.json"; }
    std::filesystem::path timings() const { return out / "timings.log"; }
    std::filesystem::path cluster_dir(int c) const
    {
        return out / ("cluster_" + std::to_string(c));
    }
    std::filesystem::path fig_csv(int c) const
    {
        return out / ("fig_medoid_" + std::to_string(c) + ".csv");
    }
};

class StageTimer {
public:
    StageTimer(const Paths& paths, std::string label)
        : paths_(paths), label_(std::move(label)),
          start_(std::chrono::steady_clock::now())
    {
    }
    ~StageTimer()
    {
        const auto stop = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(stop - start_).count();
        // Wall-clock lives only here; report.json and the CSVs stay
        // byte-comparable across runs.
        std::ofstream log(paths_.timings(), std::ios::app);
        if (log) log << label_ << ' ' << detail::fmt_g9(secs) << "s\n";
    }

private:
    const Paths& paths_;
    std::string label_;
    std::chrono::steady_clock::time_point start_;
};

SpatioTemporalField load_stage_field(const Paths& paths)
{
    if (!std::filesystem::exists(paths.field_dir() / "meta.json"))
        throw InvalidArgument("no ingested field under " + paths.out.string() +
                              "; run the ingest stage first");
    return load_field(paths.field_dir());
}

std::vector<int> load_assignments(const Paths& paths)
{
    std::ifstream in(paths.assignments());
    if (!in)
        throw InvalidArgument("no cluster assignments under " + paths.out.string() +
                              "; run the cluster stage first");
    json j;
    in >> j;
    return j.at("labels").get<std::vector<int>>();
}

void check_train_window(const PipelineConfig& cfg, const TimeAxis& axis)
{
    if (!axis.index_of(cfg.train_window.start) || !axis.index_of(cfg.train_window.end))
        throw ConfigError("train window " + cfg.train_window.start.to_string() + ".." +
                          cfg.train_window.end.to_string() +
                          " is not fully inside the data range " +
                          axis.dates().front().to_string() + ".." +
                          axis.dates().back().to_string());
}

std::vector<std::vector<int>> members_by_cluster(const std::vector<int>& labels, int k)
{
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = labels[i];
        if (c < 1 || c > k)
            throw InvalidArgument("assignment label " + std::to_string(c) +
                                  " outside 1.." + std::to_string(k));
        members[static_cast<std::size_t>(c - 1)].push_back(static_cast<int>(i));
    }
    for (int c = 1; c <= k; ++c)
        if (members[static_cast<std::size_t>(c - 1)].empty())
            throw InvalidArgument("cluster " + std::to_string(c) +
                                  " has no assigned locations");
    return members;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& values, const std::vector<int>& rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
    return out;
}

void write_doubles(const std::filesystem::path& path, const std::vector<double>& v)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw InvalidArgument(path.string() + " is truncated");
    return v;
}

json accuracy_to_json(const AccuracyRow& row)
{
    json j;
    j["label"] = row.label;
    j["mae"] = detail::round9(row.mae);
    j["mape"] = row.mape ? json(detail::round9(*row.mape)) : json(nullptr);
    j["mase"] = detail::round9(row.mase);
    j["smape"] = detail::round9(row.smape);
    j["rmse"] = detail::round9(row.rmse);
    j["mape_excluded"] = row.mape_excluded;
    return j;
}

std::vector<CoherenceRow> read_coherence_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("no coherence table at " + path.string() +
                              "; run the coherence stage first");
    std::vector<CoherenceRow> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CoherenceRow r;
        std::string field;
        std::getline(ls, r.group, ',');
        std::getline(ls, field, ',');
        r.n_locations = std::stoi(field);
        std::getline(ls, field, ',');
        r.statistic = parse_statistic(field);
        std::getline(ls, field, ',');
        r.dof = std::strtod(field.c_str(), nullptr);
        std::getline(ls, field, ',');
        r.var_sai = std::strtod(field.c_str(), nullptr);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct KbarInfo {
    Eigen::Index k_bar = 0;
    double explained = 0.0;
};

KbarInfo read_kbar(const Paths& paths, int c)
{
    std::ifstream in(paths.cluster_dir(c) / "kbar.json");
    if (!in)
        throw InvalidArgument("cluster " + std::to_string(c) +
                              " has no decomposition; run the decompose stage first");
    json j;
    in >> j;
    return {j.at("k_bar").get<Eigen::Index>(), j.at("explained_variance").get<double>()};
}

} // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    check_keys(j, "the config root",
               {"data", "variable", "clustering", "coherence", "train", "horizon",
                "variance_threshold", "forecast", "seed", "out", "threads"});

    PipelineConfig cfg;
    cfg.data = get_string(j, "data", "the config root");
    if (find(j, "variable")) cfg.variable = get_string(j, "variable", "the config root");
    if (const json* v = find(j, "clustering")) parse_clustering(*v, cfg);
    if (const json* v = find(j, "coherence")) {
        check_keys(*v, "'coherence'", {"wet_threshold"});
        if (find(*v, "wet_threshold")) {
            cfg.wet_threshold = get_double(*v, "wet_threshold", "'coherence'");
            if (!(cfg.wet_threshold > 0.0))
                throw ConfigError("key 'wet_threshold' in 'coherence' must be > 0");
        }
    }
    const json* train = find(j, "train");
    if (!train) throw ConfigError("missing key 'train' in the config root");
    cfg.train_window = get_window(*train, "'train'");

    if (find(j, "horizon")) {
        cfg.forecast.horizon = get_int(j, "horizon", "the config root");
        if (cfg.forecast.horizon < 1)
            throw ConfigError("key 'horizon' in the config root must be >= 1");
    }
    if (find(j, "variance_threshold")) {
        cfg.variance_threshold = get_double(j, "variance_threshold", "the config root");
        if (!(cfg.variance_threshold > 0.0) || cfg.variance_threshold > 1.0)
            throw ConfigError(
                "key 'variance_threshold' in the config root must lie in (0, 1]");
    }
    if (const json* v = find(j, "forecast")) parse_forecast(*v, cfg.forecast);
    if (find(j, "seed")) {
        const json* v = find(j, "seed");
        if (!v->is_number_unsigned() && !v->is_number_integer())
            throw ConfigError("key 'seed' in the config root must be an integer");
        cfg.seed = v->get<std::uint64_t>();
    }
    if (find(j, "out")) cfg.out = get_string(j, "out", "the config root");
    if (find(j, "threads")) {
        const int t = get_int(j, "threads", "the config root");
        if (t < 0) throw ConfigError("key 'threads' in the config root must be >= 0");
        cfg.threads = static_cast<unsigned>(t);
    }
    return cfg;
}

void stage_ingest(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    std::filesystem::create_directories(paths.out);
    const StageTimer timer(paths, "ingest total");

    const SpatioTemporalField field =
        std::filesystem::is_directory(cfg.data)
            ? load_field(cfg.data)
            : ingest_tidy_csv(cfg.data, cfg.variable);
    check_train_window(cfg, field.time());
    save_field(field, paths.field_dir());
}

void stage_cluster(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    const StageTimer timer(paths, "cluster total");
    const SpatioTemporalField field = load_stage_field(paths);

    const SpatioTemporalField season = subset(field, cfg.cluster_window, cfg.months);

    std::vector<int> sample_ids = cfg.sample_ids;
    if (sample_ids.empty()) {
        sample_ids.resize(static_cast<std::size_t>(field.n_locations()));
        std::iota(sample_ids.begin(), sample_ids.end(), 0);
    }
    std::vector<Location> sample_locs;
    std::vector<std::vector<double>> series;
    for (int id : sample_ids) {
        if (id < 0 || id >= field.n_locations())
            throw ConfigError("sample id " + std::to_string(id) +
                              " outside the ingested grid (0.." +
                              std::to_string(field.n_locations() - 1) + ")");
        sample_locs.push_back(field.locations()[static_cast<std::size_t>(id)]);
        series.push_back(season.series(id));
    }
    if (cfg.normalize) {
        for (auto& x : series) {
            const double n = static_cast<double>(x.size());
            const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
            double ss = 0.0;
            for (double v : x) ss += (v - mean) * (v - mean);
            const double sd = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            for (double& v : x) v = sd > 0.0 ? (v - mean) / sd : 0.0;
        }
    }
    if (cfg.k > static_cast<int>(sample_ids.size()))
        throw ConfigError("k = " + std::to_string(cfg.k) + " exceeds the " +
                          std::to_string(sample_ids.size()) + " sample locations");

    const DistanceMatrix dist =
        dtw_distance_matrix(series, cfg.dtw_band, sample_ids, cfg.threads);
    const ClusterModel model = cluster_hierarchical(dist, cfg.k);
    save_cluster_model(model, paths.clusters_json(), paths.dtw());

    const std::vector<int> assignments =
        assign_grid(field.locations(), sample_locs, model.labels);
    json j;
    j["labels"] = assignments;
    std::vector<int> ids(static_cast<std::size_t>(field.n_locations()));
    std::iota(ids.begin(), ids.end(), 0);
    j["location_ids"] = ids;
    std::ofstream out(paths.assignments(), std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + paths.assignments().string());
    out << j.dump(2) << '\n';
}

void stage_coherence(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    const StageTimer timer(paths, "coherence total");
    const SpatioTemporalField field = load_stage_field(paths);
    const std::vector<int> labels = load_assignments(paths);

    constexpr SeasonalStatistic stats[] = {SeasonalStatistic::rainfall_amount,
                                           SeasonalStatistic::rainfall_intensity,
                                           SeasonalStatistic::rainfall_frequency};
    AnnualSeriesMatrix annual[3];
    for (int s = 0; s < 3; ++s)
        annual[s] = seasonal_series(field, stats[s], cfg.months, cfg.wet_threshold);

    // Location groups: the k clusters, then the three altitude classes.
    std::vector<std::pair<std::string, std::vector<int>>> groups;
    const auto members = members_by_cluster(labels, cfg.k);
    for (int c = 1; c <= cfg.k; ++c)
        groups.emplace_back("cluster_" + std::to_string(c),
                            members[static_cast<std::size_t>(c - 1)]);
    for (const AltitudeClass cls :
         {AltitudeClass::low, AltitudeClass::mid, AltitudeClass::high}) {
        std::vector<int> in_class;
        for (Eigen::Index i = 0; i < field.n_locations(); ++i)
            if (altitude_class(field.locations()[static_cast<std::size_t>(i)].elev) == cls)
                in_class.push_back(static_cast<int>(i));
        if (!in_class.empty()) groups.emplace_back(to_string(cls), std::move(in_class));
    }

    std::vector<CoherenceRow> rows(groups.size() * 3);
    detail::parallel_for(
        rows.size(),
        [&](std::size_t r) {
            const auto& [name, cols] = groups[r / 3];
            const AnnualSeriesMatrix& all = annual[r % 3];

            AnnualSeriesMatrix part;
            part.years = all.years;
            part.statistic = all.statistic;
            part.values.resize(all.values.rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) {
                part.values.col(static_cast<Eigen::Index>(c)) = all.values.col(cols[c]);
                part.location_ids.push_back(all.location_ids[static_cast<std::size_t>(cols[c])]);
            }

            CoherenceRow& row = rows[r];
            row.group = name;
            row.n_locations = static_cast<int>(cols.size());
            row.statistic = all.statistic;
            row.dof = dof(part);
            row.var_sai = var_sai(part);
        },
        cfg.threads);

    write_coherence_csv(rows, paths.coherence_csv());
}

void stage_decompose(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    const SpatioTemporalField field = load_stage_field(paths);
    check_train_window(cfg, field.time());
    const std::vector<int> labels = load_assignments(paths);
    const auto members = members_by_cluster(labels, cfg.k);

    const SpatioTemporalField train =
        subset(field, DateWindow{cfg.train_window.start, cfg.train_window.end});

    for (int c = 1; c <= cfg.k; ++c) {
        const StageTimer timer(paths, "decompose cluster_" + std::to_string(c));
        const auto& rows = members[static_cast<std::size_t>(c - 1)];
        std::filesystem::create_directories(paths.cluster_dir(c));

        const EofModel model = eof_decompose(gather_rows(train.values(), rows));
        save_eof_model(model, paths.cluster_dir(c) / "eof");

        // The full-record decomposition feeds the stability diagnostic.
        const EofModel full = eof_decompose(gather_rows(field.values(), rows));
        save_eof_model(full, paths.cluster_dir(c) / "eof_full");

        const Eigen::Index k_bar = truncate_rank(model, cfg.variance_threshold);
        const double explained = model.variance_shares.head(k_bar).sum();
        json j;
        j["k_bar"] = k_bar;
        j["explained_variance"] = detail::round9(explained);
        std::ofstream out(paths.cluster_dir(c) / "kbar.json", std::ios::binary);
        if (!out)
            throw InvalidArgument("cannot write " +
                                  (paths.cluster_dir(c) / "kbar.json").string());
        out << j.dump(2) << '\n';
    }
}

void stage_forecast(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    for (int c = 1; c <= cfg.k; ++c) {
        const StageTimer timer(paths, "forecast cluster_" + std::to_string(c));
        const EofModel model = load_eof_model(paths.cluster_dir(c) / "eof");
        const KbarInfo info = read_kbar(paths, c);

        ForecastConfig cluster_cfg = cfg.forecast;
        cluster_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(c - 1));

        const Eigen::Index p = model.p();
        const int h = cluster_cfg.horizon;

        // Train in parallel across EOF columns, then write everything from
        // this one thread.
        std::vector<WannModel> wanns(static_cast<std::size_t>(info.k_bar));
        std::vector<std::vector<double>> forecasts(static_cast<std::size_t>(info.k_bar));
        detail::parallel_for(
            static_cast<std::size_t>(info.k_bar),
            [&](std::size_t k) {
                std::vector<double> column(static_cast<std::size_t>(p));
                for (Eigen::Index t = 0; t < p; ++t)
                    column[static_cast<std::size_t>(t)] =
                        model.v(t, static_cast<Eigen::Index>(k));
                ForecastConfig col_cfg = cluster_cfg;
                col_cfg.seed = derive_seed(cluster_cfg.seed, k);
                wanns[k] = train_wavelet_ann(column, col_cfg);
                forecasts[k] = wann_forecast(wanns[k], column, h);
            },
            cfg.threads);

        std::vector<double> blob;
        blob.reserve(static_cast<std::size_t>((p + h) * info.k_bar));
        for (Eigen::Index t = 0; t < p + h; ++t)
            for (Eigen::Index k = 0; k < info.k_bar; ++k)
                blob.push_back(t < p ? model.v(t, k)
                                     : forecasts[static_cast<std::size_t>(k)]
                                                [static_cast<std::size_t>(t - p)]);
        write_doubles(paths.cluster_dir(c) / "v_ext.f64le", blob);

        json j;
        j["rows"] = p + h;
        j["cols"] = info.k_bar;
        j["horizon"] = h;
        std::ofstream out(paths.cluster_dir(c) / "forecast_meta.json", std::ios::binary);
        if (!out)
            throw InvalidArgument("cannot write " +
                                  (paths.cluster_dir(c) / "forecast_meta.json").string());
        out << j.dump(2) << '\n';

        for (Eigen::Index k = 0; k < info.k_bar; ++k)
            save_wann_model(wanns[static_cast<std::size_t>(k)],
                            paths.cluster_dir(c) / ("wann_" + std::to_string(k)));
    }
}

ForecastReport stage_evaluate(const PipelineConfig& cfg)
{
    const Paths paths{cfg.out};
    const SpatioTemporalField field = load_stage_field(paths);
    check_train_window(cfg, field.time());
    const std::vector<int> labels = load_assignments(paths);
    const auto members = members_by_cluster(labels, cfg.k);
    const ClusterModel clusters = load_cluster_model(paths.clusters_json(), paths.dtw());

    const SpatioTemporalField train =
        subset(field, DateWindow{cfg.train_window.start, cfg.train_window.end});
    const auto train_end_idx = field.time().index_of(cfg.train_window.end);
    const Eigen::Index holdout_start = static_cast<Eigen::Index>(*train_end_idx) + 1;

    ForecastReport report;
    std::vector<AccuracyRow> accuracy_rows;

    for (int c = 1; c <= cfg.k; ++c) {
        const StageTimer timer(paths, "evaluate cluster_" + std::to_string(c));
        const auto& rows = members[static_cast<std::size_t>(c - 1)];
        const EofModel model = load_eof_model(paths.cluster_dir(c) / "eof");
        const EofModel full = load_eof_model(paths.cluster_dir(c) / "eof_full");
        const KbarInfo info = read_kbar(paths, c);

        const Eigen::Index p = model.p();
        const int h = cfg.forecast.horizon;
        const std::vector<double> blob =
            read_doubles(paths.cluster_dir(c) / "v_ext.f64le",
                         static_cast<std::size_t>((p + h) * info.k_bar));
        Eigen::MatrixXd v_ext(p + h, info.k_bar);
        for (Eigen::Index t = 0; t < p + h; ++t)
            for (Eigen::Index k = 0; k < info.k_bar; ++k)
                v_ext(t, k) = blob[static_cast<std::size_t>(t * info.k_bar + k)];

        const Eigen::MatrixXd extended = reconstruct_extended(model, info.k_bar, v_ext, h);

        // The cluster's representative: its medoid sample location.
        const int medoid_sample = clusters.medoid_ids[static_cast<std::size_t>(c - 1)];
        const int medoid_loc = clusters.distance.series_ids[static_cast<std::size_t>(medoid_sample)];
        const auto row_it = std::find(rows.begin(), rows.end(), medoid_loc);
        if (row_it == rows.end())
            throw InvalidArgument("medoid of cluster " + std::to_string(c) +
                                  " is not assigned to it");
        const auto medoid_row = static_cast<Eigen::Index>(row_it - rows.begin());

        ClusterReport cr;
        cr.id = c;
        cr.n_locations = static_cast<int>(rows.size());
        cr.k_bar = info.k_bar;
        cr.explained_variance = info.explained;
        cr.medoid_id = medoid_loc;
        const Location& mloc = field.locations()[static_cast<std::size_t>(medoid_loc)];
        cr.medoid_lon = mloc.lon;
        cr.medoid_lat = mloc.lat;
        cr.medoid_elev = mloc.elev;
        cr.alpha_stability = alpha_stability(
            model, full, std::min(info.k_bar, std::min(model.k(), full.k())));

        const Eigen::Index avail =
            std::min<Eigen::Index>(h, field.n_times() - holdout_start);
        if (avail > 0) {
            std::vector<double> actual(static_cast<std::size_t>(avail));
            std::vector<double> forecast(static_cast<std::size_t>(avail));
            for (Eigen::Index t = 0; t < avail; ++t) {
                actual[static_cast<std::size_t>(t)] =
                    field.values()(medoid_loc, holdout_start + t);
                forecast[static_cast<std::size_t>(t)] = extended(medoid_row, p + t);
            }
            const std::vector<double> train_series =
                train.series(medoid_loc);

            AccuracyRow row = forecast_metrics(actual, forecast, train_series);
            row.label = "cluster_" + std::to_string(c) + "_medoid_" +
                        std::to_string(medoid_loc);
            cr.accuracy = row;
            accuracy_rows.push_back(row);

            AccuracyRow naive = forecast_metrics(
                actual, naive_forecast(train_series, static_cast<int>(avail)),
                train_series);
            naive.label = "cluster_" + std::to_string(c) + "_naive";
            cr.naive_accuracy = naive;
            accuracy_rows.push_back(naive);

            std::ofstream fig(paths.fig_csv(c), std::ios::binary);
            if (!fig) throw InvalidArgument("cannot write " + paths.fig_csv(c).string());
            fig << "date,actual,forecast\n";
            for (Eigen::Index t = 0; t < avail; ++t)
                fig << field.time()[static_cast<std::size_t>(holdout_start + t)].to_string()
                    << ',' << detail::fmt_g9(actual[static_cast<std::size_t>(t)]) << ','
                    << detail::fmt_g9(forecast[static_cast<std::size_t>(t)]) << '\n';
            cr.forecast_csv = paths.fig_csv(c).filename().string();
        }

        report.clusters.push_back(std::move(cr));
    }

    write_accuracy_csv(accuracy_rows, paths.accuracy_csv());
    report.coherence = read_coherence_csv(paths.coherence_csv());

    // report.json: everything above, doubles rounded to the artifact policy.
    json j;
    j["seed"] = cfg.seed;
    j["data"] = cfg.data.string();
    j["variable"] = cfg.variable;
    j["k"] = cfg.k;
    j["months"] = std::vector<int>(cfg.months.begin(), cfg.months.end());
    j["train"] = {{"start", cfg.train_window.start.to_string()},
                  {"end", cfg.train_window.end.to_string()}};
    j["horizon"] = cfg.forecast.horizon;
    j["variance_threshold"] = cfg.variance_threshold;
    j["forecast_config"] = {{"levels", cfg.forecast.levels},
                            {"filter", to_string(cfg.forecast.filter)},
                            {"lag", cfg.forecast.lag},
                            {"hidden_units", cfg.forecast.hidden_units},
                            {"epochs", cfg.forecast.epochs},
                            {"learning_rate", cfg.forecast.learning_rate},
                            {"batch_size", cfg.forecast.batch_size}};
    auto& jc = j["clusters"] = json::array();
    for (const ClusterReport& cr : report.clusters) {
        json e;
        e["id"] = cr.id;
        e["n_locations"] = cr.n_locations;
        e["k_bar"] = cr.k_bar;
        e["explained_variance"] = detail::round9(cr.explained_variance);
        e["medoid_id"] = cr.medoid_id;
        e["medoid_lon"] = detail::round9(cr.medoid_lon);
        e["medoid_lat"] = detail::round9(cr.medoid_lat);
        e["medoid_elev"] = detail::round9(cr.medoid_elev);
        auto& stab = e["alpha_stability"] = json::array();
        for (double s : cr.alpha_stability) stab.push_back(detail::round9(s));
        e["accuracy"] = cr.accuracy ? accuracy_to_json(*cr.accuracy) : json(nullptr);
        e["naive_accuracy"] =
            cr.naive_accuracy ? accuracy_to_json(*cr.naive_accuracy) : json(nullptr);
        e["forecast_csv"] = cr.forecast_csv;
        jc.push_back(std::move(e));
    }
    auto& jh = j["coherence"] = json::array();
    for (const CoherenceRow& r : report.coherence)
        jh.push_back({{"group", r.group},
                      {"n_locations", r.n_locations},
                      {"statistic", to_string(r.statistic)},
                      {"dof", detail::round9(r.dof)},
                      {"var_sai", detail::round9(r.var_sai)}});
    j["artifacts"] = {{"accuracy_csv", "accuracy.csv"},
                      {"coherence_csv", "coherence.csv"},
                      {"clusters_json", "clusters.json"}};

    std::ofstream out(paths.report_json(), std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + paths.report_json().string());
    out << j.dump(2) << '\n';

    return report;
}

ForecastReport run_pipeline(const PipelineConfig& cfg)
{
    stage_ingest(cfg);
    stage_cluster(cfg);
    stage_coherence(cfg);
    stage_decompose(cfg);
    stage_forecast(cfg);
    return stage_evaluate(cfg);
}

} // namespace eofcast

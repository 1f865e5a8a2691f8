#include "eofcast/forecast.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "eofcast/errors.hpp"
#include "parallel.hpp"

namespace eofcast {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

WannModel train_wavelet_ann(const std::vector<double>& x, const ForecastConfig& cfg)
{
    if (cfg.levels >= 1 && cfg.levels < 63 &&
        x.size() < (std::size_t{1} << cfg.levels))
        std::cerr << "warning: series length " << x.size() << " is below 2^"
                  << cfg.levels << " = " << (std::size_t{1} << cfg.levels)
                  << "; the deepest wavelet levels wrap around the whole series\n";

    const MraDecomposition mra = modwt_mra(x, cfg.levels, cfg.filter);

    WannModel model;
    model.cfg = cfg;
    model.components.resize(static_cast<std::size_t>(cfg.levels) + 1);
    detail::parallel_for(model.components.size(), [&](std::size_t j) {
        const std::vector<double>& series =
            j < mra.details.size() ? mra.details[j] : mra.smooth;
        ForecastConfig comp_cfg = cfg;
        comp_cfg.seed = derive_seed(cfg.seed, j);
        model.components[j] = train_component_ann(series, comp_cfg);
    });
    return model;
}

std::vector<double> wann_forecast(const WannModel& model, const std::vector<double>& x,
                                  int h)
{
    if (h < 0) throw InvalidArgument("horizon must be >= 0");
    const MraDecomposition mra = modwt_mra(x, model.cfg.levels, model.cfg.filter);

    std::vector<double> sum(static_cast<std::size_t>(h), 0.0);
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        const std::vector<double>& series =
            j < mra.details.size() ? mra.details[j] : mra.smooth;
        const std::vector<double> f = ann_forecast(model.components[j], series, h);
        for (std::size_t t = 0; t < f.size(); ++t) sum[t] += f[t];
    }
    return sum;
}

std::vector<double> forecast_series(const std::vector<double>& x,
                                    const ForecastConfig& cfg)
{
    return wann_forecast(train_wavelet_ann(x, cfg), x, cfg.horizon);
}

Eigen::MatrixXd forecast_eofs(const EofModel& model, Eigen::Index k_bar,
                              const ForecastConfig& cfg)
{
    if (k_bar < 1 || k_bar > model.k())
        throw InvalidArgument("k_bar must lie in [1, K]");
    const Eigen::Index p = model.p();
    const Eigen::Index h = cfg.horizon;

    Eigen::MatrixXd v_ext(p + h, k_bar);
    v_ext.topRows(p) = model.v.leftCols(k_bar);
    detail::parallel_for(static_cast<std::size_t>(k_bar), [&](std::size_t k) {
        std::vector<double> column(static_cast<std::size_t>(p));
        for (Eigen::Index t = 0; t < p; ++t)
            column[static_cast<std::size_t>(t)] = model.v(t, static_cast<Eigen::Index>(k));
        ForecastConfig col_cfg = cfg;
        col_cfg.seed = derive_seed(cfg.seed, k);
        const std::vector<double> f = forecast_series(column, col_cfg);
        for (Eigen::Index t = 0; t < h; ++t)
            v_ext(p + t, static_cast<Eigen::Index>(k)) = f[static_cast<std::size_t>(t)];
    });
    return v_ext;
}

namespace {

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

} // namespace

void save_wann_model(const WannModel& model, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);

    nlohmann::json j;
    j["config"] = {{"levels", model.cfg.levels},
                   {"filter", to_string(model.cfg.filter)},
                   {"lag", model.cfg.lag},
                   {"hidden_units", model.cfg.hidden_units},
                   {"epochs", model.cfg.epochs},
                   {"learning_rate", model.cfg.learning_rate},
                   {"batch_size", model.cfg.batch_size},
                   {"seed", model.cfg.seed},
                   {"horizon", model.cfg.horizon}};
    auto& jc = j["components"] = nlohmann::json::array();
    for (const auto& c : model.components)
        jc.push_back({{"seed", c.seed}, {"in_min", c.in_min}, {"in_max", c.in_max}});

    std::ofstream out(dir / "wann_meta.json", std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + (dir / "wann_meta.json").string());
    out << j.dump(2) << '\n';

    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const AnnModel& m = model.components[c];
        std::vector<double> blob;
        blob.reserve(static_cast<std::size_t>(m.hidden_units * (m.lag + 2)) + 1);
        for (int r = 0; r < m.hidden_units; ++r)
            for (int col = 0; col < m.lag; ++col) blob.push_back(m.w1(r, col));
        for (int r = 0; r < m.hidden_units; ++r) blob.push_back(m.b1[r]);
        for (int r = 0; r < m.hidden_units; ++r) blob.push_back(m.w2[r]);
        blob.push_back(m.b2);
        write_doubles(dir / ("comp_" + std::to_string(c) + ".f64le"), blob);
    }
}

WannModel load_wann_model(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "wann_meta.json");
    if (!in) throw InvalidArgument("cannot open " + (dir / "wann_meta.json").string());
    nlohmann::json j;
    in >> j;

    WannModel model;
    const auto& jc = j.at("config");
    model.cfg.levels = jc.at("levels").get<int>();
    model.cfg.filter = parse_filter(jc.at("filter").get<std::string>());
    model.cfg.lag = jc.at("lag").get<int>();
    model.cfg.hidden_units = jc.at("hidden_units").get<int>();
    model.cfg.epochs = jc.at("epochs").get<int>();
    model.cfg.learning_rate = jc.at("learning_rate").get<double>();
    model.cfg.batch_size = jc.at("batch_size").get<int>();
    model.cfg.seed = jc.at("seed").get<std::uint64_t>();
    model.cfg.horizon = jc.at("horizon").get<int>();

    const auto& comps = j.at("components");
    model.components.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        AnnModel& m = model.components[c];
        m.lag = model.cfg.lag;
        m.hidden_units = model.cfg.hidden_units;
        m.seed = comps[c].at("seed").get<std::uint64_t>();
        m.in_min = comps[c].at("in_min").get<double>();
        m.in_max = comps[c].at("in_max").get<double>();

        const std::size_t expect =
            static_cast<std::size_t>(m.hidden_units) * static_cast<std::size_t>(m.lag + 2) +
            1;
        const std::vector<double> blob =
            read_doubles(dir / ("comp_" + std::to_string(c) + ".f64le"), expect);
        std::size_t at = 0;
        m.w1.resize(m.hidden_units, m.lag);
        for (int r = 0; r < m.hidden_units; ++r)
            for (int col = 0; col < m.lag; ++col) m.w1(r, col) = blob[at++];
        m.b1.resize(m.hidden_units);
        for (int r = 0; r < m.hidden_units; ++r) m.b1[r] = blob[at++];
        m.w2.resize(m.hidden_units);
        for (int r = 0; r < m.hidden_units; ++r) m.w2[r] = blob[at++];
        m.b2 = blob[at++];
    }
    return model;
}

} // namespace eofcast

#include "eofcast/ann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eofcast/errors.hpp"

namespace eofcast {

double AnnModel::scale(double v) const
{
    if (in_max == in_min) return 0.0;
    return 2.0 * (v - in_min) / (in_max - in_min) - 1.0;
}

double AnnModel::unscale(double s) const
{
    return in_min + (s + 1.0) * (in_max - in_min) / 2.0;
}

double AnnModel::predict(std::span<const double> window) const
{
    if (static_cast<int>(window.size()) != lag)
        throw ShapeMismatch("prediction window length does not match the model lag");
    Eigen::VectorXd x(lag);
    for (int i = 0; i < lag; ++i) x[i] = scale(window[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd a1 = (w1 * x + b1).array().tanh();
    return unscale(w2.dot(a1) + b2);
}

AnnModel train_component_ann(std::span<const double> series, const ForecastConfig& cfg)
{
    const auto n = static_cast<int>(series.size());
    if (cfg.lag < 1) throw InvalidArgument("lag must be >= 1");
    if (cfg.hidden_units < 1) throw InvalidArgument("hidden_units must be >= 1");
    if (cfg.epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (cfg.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
    if (n <= cfg.lag)
        throw SeriesTooShort("series of length " + std::to_string(n) +
                             " has no training window for lag " + std::to_string(cfg.lag));
    for (double v : series)
        if (!std::isfinite(v)) throw NonFiniteValue("series contains a non-finite value");

    AnnModel model;
    model.lag = cfg.lag;
    model.hidden_units = cfg.hidden_units;
    model.seed = cfg.seed;
    const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
    model.in_min = *mn;
    model.in_max = *mx;

    // Sliding windows, already scaled.
    const int n_samples = n - cfg.lag;
    Eigen::MatrixXd inputs(cfg.lag, n_samples);
    Eigen::VectorXd targets(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        for (int i = 0; i < cfg.lag; ++i)
            inputs(i, s) = model.scale(series[static_cast<std::size_t>(s + i)]);
        targets[s] = model.scale(series[static_cast<std::size_t>(s + cfg.lag)]);
    }

    std::mt19937_64 rng(cfg.seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(cfg.lag));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_units));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    model.w1.resize(cfg.hidden_units, cfg.lag);
    for (int r = 0; r < cfg.hidden_units; ++r)
        for (int c = 0; c < cfg.lag; ++c) model.w1(r, c) = bound1 * unif(rng);
    model.b1 = Eigen::VectorXd::Zero(cfg.hidden_units);
    model.w2.resize(cfg.hidden_units);
    for (int r = 0; r < cfg.hidden_units; ++r) model.w2[r] = bound2 * unif(rng);
    model.b2 = 0.0;

    std::vector<int> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);

    Eigen::MatrixXd gw1(cfg.hidden_units, cfg.lag);
    Eigen::VectorXd gb1(cfg.hidden_units), gw2(cfg.hidden_units);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (int start = 0; start < n_samples; start += cfg.batch_size) {
            const int end = std::min(start + cfg.batch_size, n_samples);
            const int batch = end - start;
            gw1.setZero();
            gb1.setZero();
            gw2.setZero();
            double gb2 = 0.0;
            for (int s = start; s < end; ++s) {
                const auto col = inputs.col(order[static_cast<std::size_t>(s)]);
                const Eigen::VectorXd a1 = (model.w1 * col + model.b1).array().tanh();
                const double err =
                    model.w2.dot(a1) + model.b2 - targets[order[static_cast<std::size_t>(s)]];
                epoch_loss += err * err;

                gw2 += err * a1;
                gb2 += err;
                const Eigen::VectorXd delta =
                    (model.w2 * err).cwiseProduct((1.0 - a1.array().square()).matrix());
                gw1 += delta * col.transpose();
                gb1 += delta;
            }
            const double step = cfg.learning_rate / batch;
            model.w1 -= step * gw1;
            model.b1 -= step * gb1;
            model.w2 -= step * gw2;
            model.b2 -= step * gb2;
        }
        if (!std::isfinite(epoch_loss))
            throw NonFiniteLoss("training diverged at epoch " + std::to_string(epoch) +
                                "; lower the learning rate");
    }
    return model;
}

std::vector<double> ann_forecast(const AnnModel& model, std::span<const double> series,
                                 int h)
{
    if (h < 0) throw InvalidArgument("horizon must be >= 0");
    if (static_cast<int>(series.size()) < model.lag)
        throw SeriesTooShort("series shorter than the model lag");

    std::vector<double> window(series.end() - model.lag, series.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h));
    for (int step = 0; step < h; ++step) {
        const double next = model.predict(window);
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

} // namespace eofcast

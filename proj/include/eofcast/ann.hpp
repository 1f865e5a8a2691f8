#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eofcast/modwt.hpp"

namespace eofcast {

/// Hyperparameters for the wavelet-ANN forecaster. `levels`/`filter` control
/// the decomposition; the rest parameterize each per-component network.
struct ForecastConfig {
    int levels = 10;
    WaveletFilter filter = WaveletFilter::haar;
    int lag = 7;
    int hidden_units = 40;
    int epochs = 200;
    double learning_rate = 0.01;
    int batch_size = 32;
    std::uint64_t seed = 0;
    int horizon = 365;
};

/// One trained single-hidden-layer network: tanh hidden, linear output,
/// inputs min-max scaled to [-1, 1] with the bounds captured at training
/// time. A degenerate series (max == min) scales to all zeros and inverts
/// to the constant, so constant components are reproduced exactly.
struct AnnModel {
    int lag = 0;
    int hidden_units = 0;
    Eigen::MatrixXd w1; // hidden x lag
    Eigen::VectorXd b1; // hidden
    Eigen::VectorXd w2; // hidden
    double b2 = 0.0;
    double in_min = 0.0;
    double in_max = 0.0;
    std::uint64_t seed = 0;

    double scale(double v) const;
    double unscale(double s) const;

    /// Next-step prediction from the last `lag` raw values.
    double predict(std::span<const double> window) const;
};

/// Fits one network to a single series by mini-batch SGD on sliding
/// (lag -> next value) windows. Deterministic for a given (series, cfg):
/// weights are initialized uniformly in ±1/sqrt(fan-in) from cfg.seed and
/// batches are reshuffled each epoch with the same engine. Throws
/// SeriesTooShort (length <= lag) and NonFiniteLoss (divergence).
AnnModel train_component_ann(std::span<const double> series, const ForecastConfig& cfg);

/// Recursive h-step forecast: predictions are fed back as inputs.
std::vector<double> ann_forecast(const AnnModel& model, std::span<const double> series,
                                 int h);

} // namespace eofcast

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "eofcast/ann.hpp"
#include "eofcast/eof.hpp"

namespace eofcast {

/// The hybrid forecaster for one series: a wavelet multiresolution split
/// plus one network per component (levels details, then the smooth).
struct WannModel {
    ForecastConfig cfg;
    std::vector<AnnModel> components; // cfg.levels + 1 models
};

/// Stable per-task seed stream (splitmix64 finalizer) so nested loops over
/// EOF columns and wavelet components get independent, reproducible seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Decomposes x and trains one network per component, seeded from
/// derive_seed(cfg.seed, component). Warns on stderr (without failing)
/// when the series is shorter than 2^levels samples.
WannModel train_wavelet_ann(const std::vector<double>& x, const ForecastConfig& cfg);

/// Recursive h-step forecast of x: each component of modwt_mra(x) is
/// forecast by its network and the forecasts are summed elementwise.
std::vector<double> wann_forecast(const WannModel& model, const std::vector<double>& x,
                                  int h);

/// train_wavelet_ann + wann_forecast over cfg.horizon steps.
std::vector<double> forecast_series(const std::vector<double>& x,
                                    const ForecastConfig& cfg);

/// Extends the temporal EOFs: column k of the result is model.v column k
/// (verbatim) followed by its cfg.horizon-step forecast, seeded from
/// derive_seed(cfg.seed, k). Result is (p + horizon) x k_bar, ready for
/// reconstruct_extended.
Eigen::MatrixXd forecast_eofs(const EofModel& model, Eigen::Index k_bar,
                              const ForecastConfig& cfg);

/// Persistence: wann_meta.json + one comp_<j>.f64le weight blob per model.
void save_wann_model(const WannModel& model, const std::filesystem::path& dir);
WannModel load_wann_model(const std::filesystem::path& dir);

} // namespace eofcast

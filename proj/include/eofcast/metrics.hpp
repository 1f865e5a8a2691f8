#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eofcast/eof.hpp"

namespace eofcast {

/// One accuracy-table row. `mape` is absent (not zero) when every actual is
/// zero; `mape_excluded` counts the zero-actual steps left out of its mean —
/// daily precipitation is zero-inflated, so the count is worth surfacing.
struct AccuracyRow {
    std::string label;
    double mae = 0.0;
    std::optional<double> mape; // percent
    double mase = 0.0;
    double smape = 0.0; // percent, in [0, 200]
    double rmse = 0.0;
    int mape_excluded = 0;
};

/// Persistence baseline: every forecast value equals the last training value.
std::vector<double> naive_forecast(std::span<const double> train, int h);

/// MAE, RMSE, MAPE (zero-actual steps excluded), SMAPE (0/0 terms count as
/// 0), and MASE scaled by the in-sample one-step naive MAE over `train`.
/// Throws ZeroNaiveError when the training series is constant.
AccuracyRow forecast_metrics(std::span<const double> actual,
                             std::span<const double> forecast,
                             std::span<const double> train);

/// Per-mode |cosine similarity| between the spatial coefficients alpha_k of
/// two decompositions over the same locations, for k = 1..k_bar. Absolute
/// value because the sign of each (u_k, v_k) pair is arbitrary.
std::vector<double> alpha_stability(const EofModel& model_a, const EofModel& model_b,
                                    Eigen::Index k_bar);

/// Writes `label,mae,mape,mase,smape,rmse`; an absent MAPE prints as NA.
/// Values at 9 significant digits.
void write_accuracy_csv(const std::vector<AccuracyRow>& rows,
                        const std::filesystem::path& path);

} // namespace eofcast

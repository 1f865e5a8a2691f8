#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eofcast/grid.hpp"

namespace eofcast {

/// Parameters for the bundled synthetic precipitation-like field: a
/// winter-wet seasonal envelope times (base + three separable space-time
/// modes of distinct period and amplitude), plus white noise, clamped at
/// zero. The dry season keeps wet-day statistics varying across years, and
/// the amplitudes are well separated so the leading modes of a decomposition
/// dominate the noise and stay stable across seeds and window lengths.
struct SyntheticFieldSpec {
    int grid_nx = 20; // longitudes
    int grid_ny = 20; // latitudes
    int years = 5;    // daily calendar starting 2018-01-01
    double base = 20.0;
    std::array<double, 3> mode_amplitudes{24.0, 14.0, 8.0};
    std::array<double, 3> mode_periods_days{365.25, 182.625, 48.0};
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

/// Builds the field on a lon/lat grid over central Chile with elevation
/// rising west-to-east.
SpatioTemporalField synthetic_field(const SyntheticFieldSpec& spec);

/// Series with planted regimes for clustering tests: regime r is a sinusoid
/// of regime-specific frequency and phase; members add white noise. Returns
/// per-series regime labels (1-based, regime of series i) through
/// `labels_out`.
std::vector<std::vector<double>> regime_series(int regimes, int per_regime, int length,
                                               std::uint64_t seed,
                                               std::vector<int>& labels_out);

/// Daily test signal: annual sinusoid + weekly sinusoid + Gaussian noise.
std::vector<double> synthetic_daily_series(int n_days, double annual_amp,
                                           double weekly_amp, double noise_sd,
                                           std::uint64_t seed);

} // namespace eofcast

#pragma once

#include <string>
#include <vector>

namespace eofcast {

// Only Haar ships; the enum keeps the config slot open for longer filters.
enum class WaveletFilter { haar };

std::string to_string(WaveletFilter filter);
WaveletFilter parse_filter(const std::string& name);

/// Coefficient form of the maximal-overlap transform: wavelet coefficients
/// W̃_1..W̃_J plus the final scaling coefficients Ṽ_J, each of length N.
/// Energy splits exactly: ||x||^2 = sum_j ||W̃_j||^2 + ||Ṽ_J||^2.
struct ModwtCoefficients {
    std::vector<std::vector<double>> w; // J series, level 1 first
    std::vector<double> v_final;        // Ṽ_J
    int levels = 0;
    WaveletFilter filter = WaveletFilter::haar;
};

/// Additive multiresolution form: x = D_1 + ... + D_J + S_J elementwise.
struct MraDecomposition {
    std::vector<std::vector<double>> details; // D_1..D_J
    std::vector<double> smooth;               // S_J
    int levels = 0;
    WaveletFilter filter = WaveletFilter::haar;
};

/// Pyramid analysis with circular boundary and MODWT-rescaled Haar taps
/// (1/2, 1/2) / (1/2, -1/2); level j reaches back 2^(j-1) samples.
ModwtCoefficients modwt(const std::vector<double>& x, int levels, WaveletFilter filter);

/// Inverse transform; exact to round-off for any N >= 2 and any level count.
std::vector<double> imodwt(const ModwtCoefficients& coeffs);

/// Synthesizes each W̃_j (and Ṽ_J) back to the sample domain separately,
/// yielding the additive detail/smooth components.
MraDecomposition modwt_mra(const std::vector<double>& x, int levels,
                           WaveletFilter filter);

} // namespace eofcast

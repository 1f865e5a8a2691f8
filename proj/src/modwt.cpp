#include "eofcast/modwt.hpp"

#include <cmath>

#include "eofcast/errors.hpp"

namespace eofcast {

std::string to_string(WaveletFilter filter)
{
    switch (filter) {
    case WaveletFilter::haar: return "haar";
    }
    throw InvalidArgument("unknown wavelet filter");
}

WaveletFilter parse_filter(const std::string& name)
{
    if (name == "haar") return WaveletFilter::haar;
    throw InvalidArgument("unknown wavelet filter '" + name + "'");
}

namespace {

void check_input(std::size_t n, int levels)
{
    if (n < 2) throw SeriesTooShort("need at least 2 samples for the wavelet transform");
    if (levels < 1 || levels > 60) throw InvalidArgument("levels must lie in [1, 60]");
}

// Sample t - shift, wrapped circularly.
std::size_t back(std::size_t t, std::size_t shift, std::size_t n)
{
    return (t + n - shift % n) % n;
}

// One analysis step at level j (shift = 2^(j-1)): splits v into the next
// coarser (w, v) pair.
void analysis_step(const std::vector<double>& v, std::size_t shift,
                   std::vector<double>& w_out, std::vector<double>& v_out)
{
    const std::size_t n = v.size();
    w_out.resize(n);
    v_out.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double lagged = v[back(t, shift, n)];
        w_out[t] = (v[t] - lagged) / 2.0;
        v_out[t] = (v[t] + lagged) / 2.0;
    }
}

// One synthesis step: recombines (w, v) at level j into the finer v. Either
// input may be all-zero, which is how the MRA components are isolated.
std::vector<double> synthesis_step(const std::vector<double>& w,
                                   const std::vector<double>& v, std::size_t shift)
{
    const std::size_t n = v.empty() ? w.size() : v.size();
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t fwd = (t + shift) % n;
        double acc = 0.0;
        if (!w.empty()) acc += (w[t] - w[fwd]) / 2.0;
        if (!v.empty()) acc += (v[t] + v[fwd]) / 2.0;
        out[t] = acc;
    }
    return out;
}

// Runs a lone level-j component down the smooth half of the synthesis
// cascade to the sample domain.
std::vector<double> cascade_down(std::vector<double> component, int from_level,
                                 bool is_detail)
{
    static const std::vector<double> empty;
    std::vector<double> v = is_detail
                                ? synthesis_step(component, empty,
                                                 std::size_t{1} << (from_level - 1))
                                : std::move(component);
    for (int j = is_detail ? from_level - 1 : from_level; j >= 1; --j)
        v = synthesis_step(empty, v, std::size_t{1} << (j - 1));
    return v;
}

} // namespace

ModwtCoefficients modwt(const std::vector<double>& x, int levels, WaveletFilter filter)
{
    check_input(x.size(), levels);

    ModwtCoefficients coeffs;
    coeffs.levels = levels;
    coeffs.filter = filter;
    coeffs.w.resize(static_cast<std::size_t>(levels));

    std::vector<double> v = x;
    std::vector<double> v_next;
    for (int j = 1; j <= levels; ++j) {
        analysis_step(v, std::size_t{1} << (j - 1), coeffs.w[static_cast<std::size_t>(j - 1)],
                      v_next);
        v.swap(v_next);
    }
    coeffs.v_final = std::move(v);
    return coeffs;
}

std::vector<double> imodwt(const ModwtCoefficients& coeffs)
{
    std::vector<double> v = coeffs.v_final;
    for (int j = coeffs.levels; j >= 1; --j)
        v = synthesis_step(coeffs.w[static_cast<std::size_t>(j - 1)], v,
                           std::size_t{1} << (j - 1));
    return v;
}

MraDecomposition modwt_mra(const std::vector<double>& x, int levels, WaveletFilter filter)
{
    const ModwtCoefficients coeffs = modwt(x, levels, filter);

    MraDecomposition mra;
    mra.levels = levels;
    mra.filter = filter;
    mra.details.resize(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j)
        mra.details[static_cast<std::size_t>(j - 1)] =
            cascade_down(coeffs.w[static_cast<std::size_t>(j - 1)], j, true);
    mra.smooth = cascade_down(coeffs.v_final, levels, false);
    return mra;
}

} // namespace eofcast

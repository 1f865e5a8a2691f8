#include "eofcast/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "eofcast/errors.hpp"

namespace eofcast {

SpatioTemporalField synthetic_field(const SyntheticFieldSpec& spec)
{
    if (spec.grid_nx < 2 || spec.grid_ny < 2)
        throw InvalidArgument("grid must be at least 2x2");
    if (spec.years < 1) throw InvalidArgument("years must be >= 1");

    // Central Chile box; elevation climbs toward the Andes in the east.
    constexpr double lon_min = -73.0, lon_max = -69.0;
    constexpr double lat_min = -38.0, lat_max = -30.0;

    std::vector<Location> locations;
    locations.reserve(static_cast<std::size_t>(spec.grid_nx * spec.grid_ny));
    std::vector<double> pat1, pat2, pat3; // per-location mode weights
    // Canonical order: latitude descending, longitude ascending.
    for (int iy = 0; iy < spec.grid_ny; ++iy) {
        const double v = static_cast<double>(iy) / (spec.grid_ny - 1); // 0 at north
        const double lat = lat_max - v * (lat_max - lat_min);
        for (int ix = 0; ix < spec.grid_nx; ++ix) {
            const double u = static_cast<double>(ix) / (spec.grid_nx - 1);
            const double lon = lon_min + u * (lon_max - lon_min);
            Location loc;
            loc.id = static_cast<int>(locations.size());
            loc.lon = lon;
            loc.lat = lat;
            loc.elev = 4000.0 * u; // spans all three altitude classes
            locations.push_back(loc);
            pat1.push_back(v - 0.5);                         // north-south gradient
            pat2.push_back(u - 0.5);                         // east-west gradient
            pat3.push_back(0.5 * std::cos(std::numbers::pi * u) *
                           std::cos(std::numbers::pi * v)); // corner-to-corner saddle
        }
    }

    const Date start{2018, 1, 1};
    const Date end{2018 + spec.years - 1, 12, 31};
    std::vector<Date> dates;
    for (Date d = start; d <= end; d = add_days(d, 1)) dates.push_back(d);

    const auto n = static_cast<Eigen::Index>(locations.size());
    const auto p = static_cast<Eigen::Index>(dates.size());
    Eigen::MatrixXd values(n, p);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sd);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index t = 0; t < p; ++t) {
        // Winter-wet envelope: zero through the austral summer so the field
        // has a genuine dry season. Without it every day is wet and the
        // interannual wet-day statistics collapse to constants.
        const double envelope =
            std::max(0.0, -std::sin(two_pi * static_cast<double>(t) / 365.25));
        const double phi1 =
            std::sin(two_pi * static_cast<double>(t) / spec.mode_periods_days[0]);
        const double phi2 =
            std::sin(two_pi * static_cast<double>(t) / spec.mode_periods_days[1]);
        const double phi3 =
            std::sin(two_pi * static_cast<double>(t) / spec.mode_periods_days[2]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            const double wet = spec.base + spec.mode_amplitudes[0] * pat1[s] * phi1 +
                               spec.mode_amplitudes[1] * pat2[s] * phi2 +
                               spec.mode_amplitudes[2] * pat3[s] * phi3;
            values(i, t) = std::max(0.0, envelope * wet + noise(rng));
        }
    }

    return SpatioTemporalField(std::move(locations), TimeAxis(std::move(dates)),
                               std::move(values), "precipitation");
}

std::vector<std::vector<double>> regime_series(int regimes, int per_regime, int length,
                                               std::uint64_t seed,
                                               std::vector<int>& labels_out)
{
    if (regimes < 1 || per_regime < 1) throw InvalidArgument("need >= 1 series per regime");
    if (length < 2) throw SeriesTooShort("regime series need length >= 2");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.5);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<std::vector<double>> series;
    labels_out.clear();
    for (int r = 0; r < regimes; ++r) {
        // Well-separated cycle counts keep regimes far apart under warping.
        const double cycles = 2.0 + 3.0 * r;
        const double phase = 0.4 * r;
        for (int member = 0; member < per_regime; ++member) {
            std::vector<double> x(static_cast<std::size_t>(length));
            for (int t = 0; t < length; ++t)
                x[static_cast<std::size_t>(t)] =
                    10.0 * std::sin(two_pi * cycles * t / length + phase) + noise(rng);
            series.push_back(std::move(x));
            labels_out.push_back(r + 1);
        }
    }
    return series;
}

std::vector<double> synthetic_daily_series(int n_days, double annual_amp,
                                           double weekly_amp, double noise_sd,
                                           std::uint64_t seed)
{
    if (n_days < 1) throw InvalidArgument("n_days must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> x(static_cast<std::size_t>(n_days));
    for (int t = 0; t < n_days; ++t)
        x[static_cast<std::size_t>(t)] = annual_amp * std::sin(two_pi * t / 365.25) +
                                         weekly_amp * std::sin(two_pi * t / 7.0) +
                                         noise(rng);
    return x;
}

} // namespace eofcast

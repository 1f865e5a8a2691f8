#include "eofcast/dtw.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>

#include "eofcast/errors.hpp"
#include "parallel.hpp"

namespace eofcast {

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<int> band)
{
    if (a.empty() || b.empty()) throw EmptySeries("dtw_distance requires non-empty series");
    for (double v : a)
        if (!std::isfinite(v)) throw NonFiniteValue("dtw_distance: non-finite value in series");
    for (double v : b)
        if (!std::isfinite(v)) throw NonFiniteValue("dtw_distance: non-finite value in series");

    const auto na = static_cast<std::ptrdiff_t>(a.size());
    const auto nb = static_cast<std::ptrdiff_t>(b.size());
    if (band) {
        if (*band < 0) throw BandTooNarrow("band must be nonnegative");
        if (*band < std::abs(na - nb))
            throw BandTooNarrow("band " + std::to_string(*band) +
                                " narrower than length difference " +
                                std::to_string(std::abs(na - nb)));
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    // D[i][j] = |a_i - b_j| + min(D[i-1][j-1], D[i-1][j], D[i][j-1]),
    // rolling two rows of the (na+1) x (nb+1) table.
    std::vector<double> prev(static_cast<std::size_t>(nb) + 1, inf);
    std::vector<double> cur(static_cast<std::size_t>(nb) + 1, inf);
    prev[0] = 0.0;

    for (std::ptrdiff_t i = 1; i <= na; ++i) {
        std::ptrdiff_t jlo = 1;
        std::ptrdiff_t jhi = nb;
        if (band) {
            jlo = std::max<std::ptrdiff_t>(1, i - *band);
            jhi = std::min<std::ptrdiff_t>(nb, i + *band);
        }
        std::fill(cur.begin(), cur.end(), inf);
        for (std::ptrdiff_t j = jlo; j <= jhi; ++j) {
            const double cost = std::abs(a[static_cast<std::size_t>(i - 1)] -
                                         b[static_cast<std::size_t>(j - 1)]);
            const double best =
                std::min({prev[static_cast<std::size_t>(j - 1)],
                          prev[static_cast<std::size_t>(j)],
                          cur[static_cast<std::size_t>(j - 1)]});
            cur[static_cast<std::size_t>(j)] = cost + best;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(nb)];
}

DistanceMatrix dtw_distance_matrix(const std::vector<std::vector<double>>& series,
                                   std::optional<int> band, std::vector<int> series_ids,
                                   unsigned threads)
{
    const auto m = series.size();
    if (m == 0) throw EmptySeries("dtw_distance_matrix requires at least one series");
    if (series_ids.empty()) {
        series_ids.resize(m);
        std::iota(series_ids.begin(), series_ids.end(), 0);
    }
    if (series_ids.size() != m)
        throw LengthMismatch("series_ids length does not match series count");

    DistanceMatrix out;
    out.series_ids = std::move(series_ids);
    out.d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);

    detail::parallel_for(
        pairs.size(),
        [&](std::size_t idx) {
            const auto [i, j] = pairs[idx];
            const double d = dtw_distance(series[i], series[j], band);
            out.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
            out.d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
        },
        threads);
    return out;
}

void save_distance_matrix(const DistanceMatrix& dist, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    const auto m = dist.size();
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] = dist.d(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path,
                                    std::vector<int> series_ids)
{
    const auto m = static_cast<Eigen::Index>(series_ids.size());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    DistanceMatrix out;
    out.series_ids = std::move(series_ids);
    out.d.resize(m, m);
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw InvalidArgument("truncated " + path.string());
        for (Eigen::Index j = 0; j < m; ++j) out.d(i, j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace eofcast

#include "eofcast/metrics.hpp"

#include <cmath>
#include <fstream>

#include "eofcast/errors.hpp"
#include "format.hpp"

namespace eofcast {

std::vector<double> naive_forecast(std::span<const double> train, int h)
{
    if (train.empty()) throw EmptySeries("naive forecast needs a nonempty training series");
    if (h < 0) throw InvalidArgument("horizon must be >= 0");
    return std::vector<double>(static_cast<std::size_t>(h), train.back());
}

AccuracyRow forecast_metrics(std::span<const double> actual,
                             std::span<const double> forecast,
                             std::span<const double> train)
{
    if (actual.empty()) throw EmptySeries("no evaluation steps");
    if (actual.size() != forecast.size())
        throw LengthMismatch("actual and forecast lengths differ");
    if (train.size() < 2)
        throw InvalidArgument("MASE needs at least two training points");

    const auto n = actual.size();
    AccuracyRow row;
    double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0, sape_sum = 0.0;
    int nonzero = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double e = forecast[t] - actual[t];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        if (actual[t] != 0.0) {
            ape_sum += std::abs(e / actual[t]);
            ++nonzero;
        }
        const double denom = std::abs(actual[t]) + std::abs(forecast[t]);
        sape_sum += denom == 0.0 ? 0.0 : 2.0 * std::abs(e) / denom;
    }
    row.mae = abs_sum / static_cast<double>(n);
    row.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    row.smape = 100.0 * sape_sum / static_cast<double>(n);
    row.mape_excluded = static_cast<int>(n) - nonzero;
    if (nonzero > 0) row.mape = 100.0 * ape_sum / nonzero;

    double naive_abs = 0.0;
    for (std::size_t t = 1; t < train.size(); ++t)
        naive_abs += std::abs(train[t] - train[t - 1]);
    const double naive_mae = naive_abs / static_cast<double>(train.size() - 1);
    if (naive_mae == 0.0)
        throw ZeroNaiveError("training series is constant; MASE is undefined");
    row.mase = row.mae / naive_mae;
    return row;
}

std::vector<double> alpha_stability(const EofModel& model_a, const EofModel& model_b,
                                    Eigen::Index k_bar)
{
    if (model_a.u.rows() != model_b.u.rows())
        throw ShapeMismatch("models cover different location counts");
    if (k_bar < 1 || k_bar > std::min(model_a.k(), model_b.k()))
        throw InvalidArgument("k_bar exceeds a model's rank");

    const Eigen::MatrixXd alpha_a = spatial_coefficients(model_a, k_bar).alpha;
    const Eigen::MatrixXd alpha_b = spatial_coefficients(model_b, k_bar).alpha;

    std::vector<double> sim(static_cast<std::size_t>(k_bar));
    for (Eigen::Index k = 0; k < k_bar; ++k) {
        const double na = alpha_a.col(k).norm();
        const double nb = alpha_b.col(k).norm();
        if (na == 0.0 && nb == 0.0)
            sim[static_cast<std::size_t>(k)] = 1.0;
        else if (na == 0.0 || nb == 0.0)
            sim[static_cast<std::size_t>(k)] = 0.0;
        else
            sim[static_cast<std::size_t>(k)] =
                std::abs(alpha_a.col(k).dot(alpha_b.col(k))) / (na * nb);
    }
    return sim;
}

void write_accuracy_csv(const std::vector<AccuracyRow>& rows,
                        const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "label,mae,mape,mase,smape,rmse\n";
    for (const auto& r : rows)
        out << r.label << ',' << detail::fmt_g9(r.mae) << ','
            << (r.mape ? detail::fmt_g9(*r.mape) : std::string("NA")) << ','
            << detail::fmt_g9(r.mase) << ',' << detail::fmt_g9(r.smape) << ','
            << detail::fmt_g9(r.rmse) << '\n';
}

} // namespace eofcast

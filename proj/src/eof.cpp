#include "eofcast/eof.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "eofcast/errors.hpp"

namespace eofcast {

namespace {

void write_matrix_row_major(const Eigen::MatrixXd& m, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

Eigen::MatrixXd read_matrix_row_major(const std::filesystem::path& path, Eigen::Index rows,
                                      Eigen::Index cols)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    Eigen::MatrixXd m(rows, cols);
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw InvalidArgument("truncated " + path.string());
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
}

} // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_scale(const Eigen::MatrixXd& x)
{
    if (x.rows() < 1 || x.cols() < 1)
        throw InvalidArgument("center_scale requires a non-empty matrix");
    if (!x.allFinite()) throw NonFiniteValue("center_scale input contains non-finite values");

    const auto n = x.rows();
    Eigen::VectorXd mean = x.colwise().mean();
    Eigen::MatrixXd z = (x.rowwise() - mean.transpose()) / std::sqrt(static_cast<double>(n));
    return {std::move(z), std::move(mean)};
}

EofModel svd_eof(const Eigen::MatrixXd& z, const Eigen::VectorXd& mean_vector)
{
    if (!z.allFinite()) throw NonFiniteValue("svd_eof input contains non-finite values");
    if (mean_vector.size() != z.cols())
        throw ShapeMismatch("mean vector length does not match column count");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw SvdFailure("singular value decomposition did not converge");

    EofModel model;
    model.u = svd.matrixU();
    model.v = svd.matrixV();
    model.singular_values = svd.singularValues();
    model.mean_vector = mean_vector;
    model.n_locations = z.rows();

    // Sign convention: largest-magnitude entry of each EOF is positive.
    for (Eigen::Index k = 0; k < model.k(); ++k) {
        Eigen::Index imax = 0;
        model.v.col(k).cwiseAbs().maxCoeff(&imax);
        if (model.v(imax, k) < 0.0) {
            model.v.col(k) = -model.v.col(k);
            model.u.col(k) = -model.u.col(k);
        }
    }

    const Eigen::VectorXd lambda = model.singular_values.array().square();
    const double total = lambda.sum();
    model.variance_shares =
        total > 0.0 ? Eigen::VectorXd(lambda / total) : Eigen::VectorXd::Zero(model.k());
    return model;
}

EofModel eof_decompose(const Eigen::MatrixXd& x)
{
    auto [z, mean] = center_scale(x);
    return svd_eof(z, mean);
}

Eigen::Index truncate_rank(const EofModel& model, double threshold)
{
    if (!(threshold > 0.0) || threshold > 1.0)
        throw InvalidArgument("variance threshold must lie in (0, 1]");
    if (model.variance_shares.sum() <= 0.0) return 1; // null field: one trivial mode

    double cum = 0.0;
    for (Eigen::Index k = 0; k < model.k(); ++k) {
        cum += model.variance_shares(k);
        if (cum >= threshold - 1e-12) return k + 1;
    }
    return model.k();
}

SpatialCoefficients spatial_coefficients(const EofModel& model, Eigen::Index k_bar)
{
    if (k_bar < 1 || k_bar > model.k())
        throw InvalidArgument("k_bar must lie in [1, K]");
    SpatialCoefficients coeffs;
    coeffs.k_used = k_bar;
    coeffs.alpha = model.u.leftCols(k_bar) * model.singular_values.head(k_bar).asDiagonal();
    return coeffs;
}

Eigen::MatrixXd reconstruct(const EofModel& model, Eigen::Index k_bar)
{
    if (k_bar < 0 || k_bar > model.k())
        throw InvalidArgument("k_bar must lie in [0, K]");
    const double scale = std::sqrt(static_cast<double>(model.n_locations));
    Eigen::MatrixXd x =
        Eigen::MatrixXd::Zero(model.n_locations, model.p()).rowwise() +
        model.mean_vector.transpose();
    if (k_bar > 0) {
        x += scale * model.u.leftCols(k_bar) *
             model.singular_values.head(k_bar).asDiagonal() *
             model.v.leftCols(k_bar).transpose();
    }
    return x;
}

Eigen::MatrixXd reconstruct_extended(const EofModel& model, Eigen::Index k_bar,
                                     const Eigen::MatrixXd& v_ext, Eigen::Index h)
{
    if (k_bar < 1 || k_bar > model.k())
        throw InvalidArgument("k_bar must lie in [1, K]");
    if (h < 0) throw InvalidArgument("horizon must be nonnegative");
    const auto p = model.p();
    if (v_ext.rows() != p + h || v_ext.cols() != k_bar)
        throw ShapeMismatch("v_ext must be (p+h) x k_bar");
    if (v_ext.topRows(p) != model.v.leftCols(k_bar))
        throw ShapeMismatch("first p rows of v_ext must equal the model EOFs");

    Eigen::MatrixXd out(model.n_locations, p + h);
    out.leftCols(p) = reconstruct(model, k_bar);
    if (h > 0) {
        const double scale = std::sqrt(static_cast<double>(model.n_locations));
        const double grand_mean = model.mean_vector.mean();
        out.rightCols(h) =
            (scale * model.u.leftCols(k_bar) *
             model.singular_values.head(k_bar).asDiagonal() *
             v_ext.bottomRows(h).transpose())
                .array() +
            grand_mean;
    }
    return out;
}

void save_eof_model(const EofModel& model, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);

    nlohmann::json meta;
    meta["n"] = model.n_locations;
    meta["p"] = model.p();
    meta["k"] = model.k();
    meta["mean_vector"] = std::vector<double>(model.mean_vector.begin(), model.mean_vector.end());
    meta["variance_shares"] =
        std::vector<double>(model.variance_shares.begin(), model.variance_shares.end());

    std::ofstream mj(dir / "eof_meta.json", std::ios::binary);
    if (!mj) throw InvalidArgument("cannot write " + (dir / "eof_meta.json").string());
    mj << meta.dump(2) << '\n';

    write_matrix_row_major(model.u, dir / "u.f64le");
    write_matrix_row_major(model.v, dir / "v.f64le");
    write_matrix_row_major(model.singular_values, dir / "d.f64le");
}

EofModel load_eof_model(const std::filesystem::path& dir)
{
    std::ifstream mj(dir / "eof_meta.json");
    if (!mj) throw InvalidArgument("cannot open " + (dir / "eof_meta.json").string());
    nlohmann::json meta;
    mj >> meta;

    const auto n = meta.at("n").get<Eigen::Index>();
    const auto p = meta.at("p").get<Eigen::Index>();
    const auto k = meta.at("k").get<Eigen::Index>();

    EofModel model;
    model.n_locations = n;
    const auto mean = meta.at("mean_vector").get<std::vector<double>>();
    const auto shares = meta.at("variance_shares").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(mean.size()) != p ||
        static_cast<Eigen::Index>(shares.size()) != k)
        throw ShapeMismatch("eof_meta.json vector lengths inconsistent with n/p/k");
    model.mean_vector = Eigen::Map<const Eigen::VectorXd>(mean.data(), p);
    model.variance_shares = Eigen::Map<const Eigen::VectorXd>(shares.data(), k);
    model.u = read_matrix_row_major(dir / "u.f64le", n, k);
    model.v = read_matrix_row_major(dir / "v.f64le", p, k);
    model.singular_values = read_matrix_row_major(dir / "d.f64le", k, 1).col(0);
    return model;
}

} // namespace eofcast

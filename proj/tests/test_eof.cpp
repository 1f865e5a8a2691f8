#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "eofcast/eof.hpp"
#include "eofcast/errors.hpp"

using namespace eofcast;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = dist(rng);
    return x;
}

double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    const double denom = b.norm();
    return denom == 0.0 ? a.norm() : (a - b).norm() / denom;
}

} // namespace

TEST_CASE("center_scale: hand case and identities")
{
    Eigen::MatrixXd x(2, 2);
    x << 1, 2, 3, 4;
    const auto [z, xbar] = center_scale(x);

    CHECK(xbar[0] == doctest::Approx(2.0));
    CHECK(xbar[1] == doctest::Approx(3.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(z(0, 0) == doctest::Approx(-r));
    CHECK(z(0, 1) == doctest::Approx(-r));
    CHECK(z(1, 0) == doctest::Approx(r));
    CHECK(z(1, 1) == doctest::Approx(r));

    // constants vanish
    const auto [zc, xc] = center_scale(Eigen::MatrixXd::Constant(5, 7, 3.25));
    CHECK(zc.norm() == doctest::Approx(0.0));
    CHECK(xc.minCoeff() == doctest::Approx(3.25));

    // column sums of Z are zero; Z^T Z equals the covariance form (1/n) X^T H X
    const Eigen::MatrixXd xr = random_matrix(9, 6, 11);
    const auto [zr, xbr] = center_scale(xr);
    CHECK(zr.colwise().sum().cwiseAbs().maxCoeff() < 1e-12 * xr.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd h =
        Eigen::MatrixXd::Identity(9, 9) - Eigen::MatrixXd::Constant(9, 9, 1.0 / 9.0);
    const Eigen::MatrixXd c = xr.transpose() * h * xr / 9.0;
    CHECK(rel_frobenius(zr.transpose() * zr, c) < 1e-9);
}

TEST_CASE("svd_eof: orthonormal factors, shares, sign convention")
{
    const Eigen::MatrixXd x = random_matrix(5, 8, 21);
    const EofModel model = eof_decompose(x);

    CHECK(model.k() == 5); // min(n, p)
    const Eigen::MatrixXd vtv = model.v.transpose() * model.v;
    const Eigen::MatrixXd utu = model.u.transpose() * model.u;
    CHECK((vtv - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);
    CHECK((utu - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);

    for (Eigen::Index k = 1; k < model.k(); ++k)
        CHECK(model.singular_values[k] <= model.singular_values[k - 1]);

    // shares are the normalized squared singular values and sum to one
    const double total = model.singular_values.array().square().sum();
    for (Eigen::Index k = 0; k < model.k(); ++k)
        CHECK(model.variance_shares[k] ==
              doctest::Approx(model.singular_values[k] * model.singular_values[k] / total));
    CHECK(model.variance_shares.sum() == doctest::Approx(1.0).epsilon(1e-12));

    // the largest-magnitude entry of every EOF is positive
    for (Eigen::Index k = 0; k < model.k(); ++k) {
        Eigen::Index at = 0;
        model.v.col(k).cwiseAbs().maxCoeff(&at);
        CHECK(model.v(at, k) > 0.0);
    }
}

TEST_CASE("svd_eof: rank-1 input concentrates all variance")
{
    Eigen::VectorXd u(4), v(6);
    u << 1, 2, -1, 0.5;
    v << 1, 0.5, 0.25, -0.5, 1.5, 2;
    Eigen::MatrixXd x = u * v.transpose();
    // shift columns so the cross-location mean is zero: keeps x rank 1 in Z
    const auto [z, xbar] = center_scale(x);
    const EofModel model = svd_eof(z, xbar);

    int above = 0;
    for (Eigen::Index k = 0; k < model.k(); ++k)
        if (model.singular_values[k] > 1e-12) ++above;
    CHECK(above == 1);
    CHECK(model.variance_shares[0] == doctest::Approx(1.0));
}

TEST_CASE("truncate_rank: cumulative thresholding")
{
    EofModel model;
    model.mean_vector = Eigen::VectorXd::Zero(4);
    model.singular_values.resize(4);
    model.singular_values << std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.15),
        std::sqrt(0.05);
    model.variance_shares.resize(4);
    model.variance_shares << 0.5, 0.3, 0.15, 0.05;

    CHECK(truncate_rank(model, 0.8) == 2);
    CHECK(truncate_rank(model, 0.5) == 1);
    CHECK(truncate_rank(model, 0.81) == 3);
    CHECK(truncate_rank(model, 1.0) == 4);

    // trailing zero shares are never selected by threshold 1.0
    model.variance_shares << 0.6, 0.4, 0.0, 0.0;
    CHECK(truncate_rank(model, 1.0) == 2);

    CHECK_THROWS_AS(truncate_rank(model, 0.0), InvalidArgument);
    CHECK_THROWS_AS(truncate_rank(model, 1.5), InvalidArgument);
}

TEST_CASE("spatial_coefficients: alpha = UD = ZV and PC properties")
{
    const Eigen::MatrixXd x = random_matrix(6, 10, 33);
    const auto [z, xbar] = center_scale(x);
    const EofModel model = svd_eof(z, xbar);

    const auto coeff = spatial_coefficients(model, model.k());
    CHECK(rel_frobenius(coeff.alpha, z * model.v) < 1e-10);

    // alpha^T alpha = D^2
    const Eigen::MatrixXd gram = coeff.alpha.transpose() * coeff.alpha;
    for (Eigen::Index a = 0; a < model.k(); ++a)
        for (Eigen::Index b = 0; b < model.k(); ++b) {
            const double expect =
                a == b ? model.singular_values[a] * model.singular_values[a] : 0.0;
            CHECK(gram(a, b) == doctest::Approx(expect).epsilon(1e-9));
        }

    // columns have zero mean and nonincreasing variance
    for (Eigen::Index k = 0; k < coeff.k_used; ++k)
        CHECK(std::abs(coeff.alpha.col(k).mean()) < 1e-9);
    for (Eigen::Index k = 1; k < coeff.k_used; ++k)
        CHECK(coeff.alpha.col(k).squaredNorm() <=
              coeff.alpha.col(k - 1).squaredNorm() + 1e-12);
}

TEST_CASE("reconstruct: full rank exact, K=0 mean field, monotone error")
{
    const Eigen::MatrixXd x = random_matrix(12, 9, 55);
    const EofModel model = eof_decompose(x);

    CHECK(rel_frobenius(reconstruct(model, model.k()), x) < 1e-9);

    const Eigen::MatrixXd mean_field = reconstruct(model, 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        CHECK((mean_field.row(i).transpose() - model.mean_vector).norm() < 1e-12);

    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index kbar = 0; kbar <= model.k(); ++kbar) {
        const double err = (reconstruct(model, kbar) - x).norm();
        CHECK(err <= prev + 1e-9);
        prev = err;
    }
}

TEST_CASE("reconstruct_extended: periodic oracle continues the field exactly")
{
    // exactly rank-2 field built from whole periods of two Fourier modes, so
    // the short-window EOFs are the restriction of the long-window ones
    const Eigen::Index n = 4, p = 365, h = 73;
    Eigen::VectorXd a1(n), a2(n);
    a1 << 2, -2, 1, -1; // zero-mean so centering leaves the modes intact
    a2 << 1, 1, -1, -1; // orthogonal to a1
    constexpr double two_pi = 2.0 * std::numbers::pi;

    Eigen::MatrixXd x_full(n, p + h);
    for (Eigen::Index t = 0; t < p + h; ++t) {
        const double b1 = 4.0 * std::sin(two_pi * static_cast<double>(t) / 73.0);
        const double b2 = 2.0 * std::cos(2.0 * two_pi * static_cast<double>(t) / 73.0);
        x_full.col(t) = a1 * b1 + a2 * b2;
    }

    const EofModel model = eof_decompose(x_full.leftCols(p));
    REQUIRE(model.variance_shares[0] + model.variance_shares[1] ==
            doctest::Approx(1.0));

    // continue each temporal EOF with the same Fourier mode, sign-aligned
    Eigen::MatrixXd v_ext(p + h, 2);
    v_ext.topRows(p) = model.v.leftCols(2);
    for (Eigen::Index k = 0; k < 2; ++k) {
        Eigen::VectorXd mode(p + h);
        for (Eigen::Index t = 0; t < p + h; ++t)
            mode[t] = k == 0 ? std::sin(two_pi * static_cast<double>(t) / 73.0)
                             : std::cos(2.0 * two_pi * static_cast<double>(t) / 73.0);
        const Eigen::VectorXd head = mode.head(p) / mode.head(p).norm();
        const double sign = head.dot(model.v.col(k)) >= 0 ? 1.0 : -1.0;
        v_ext.col(k).tail(h) = sign * mode.tail(h) / mode.head(p).norm();
    }

    const Eigen::MatrixXd extended = reconstruct_extended(model, 2, v_ext, h);
    CHECK(extended.rows() == n);
    CHECK(extended.cols() == p + h);
    CHECK(rel_frobenius(extended.leftCols(p), reconstruct(model, 2)) == 0.0);
    CHECK(rel_frobenius(extended.rightCols(h), x_full.rightCols(h)) < 1e-9);

    // h = 0 degenerates to the plain truncated reconstruction
    const Eigen::MatrixXd same =
        reconstruct_extended(model, 2, Eigen::MatrixXd(model.v.leftCols(2)), 0);
    CHECK(rel_frobenius(same, reconstruct(model, 2)) == 0.0);

    // first rows must match V exactly
    Eigen::MatrixXd bad = v_ext;
    bad(0, 0) += 1e-6;
    CHECK_THROWS_AS(reconstruct_extended(model, 2, bad, h), ShapeMismatch);
}

TEST_CASE("eof model persistence round trip")
{
    const Eigen::MatrixXd x = random_matrix(7, 11, 77);
    const EofModel model = eof_decompose(x);

    const auto dir = std::filesystem::temp_directory_path() / "eofcast_eof_io";
    save_eof_model(model, dir);
    const EofModel loaded = load_eof_model(dir);

    CHECK(loaded.n_locations == model.n_locations);
    CHECK(loaded.u == model.u);
    CHECK(loaded.v == model.v);
    CHECK(loaded.singular_values == model.singular_values);
    CHECK(loaded.mean_vector == model.mean_vector);
    CHECK(loaded.variance_shares == model.variance_shares);
}

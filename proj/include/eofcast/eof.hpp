#pragma once

#include <filesystem>
#include <utility>

#include <Eigen/Dense>

namespace eofcast {

/// SVD-based factorization of a centered and normalized field:
/// Z = U * diag(singular_values) * V^T with Z = (X - 1 xbar^T) / sqrt(n).
/// Columns of `v` are the temporal EOFs; variance_shares[k] is d_k^2 / sum d^2.
struct EofModel {
    Eigen::VectorXd mean_vector;     // length p, cross-location mean per time step
    Eigen::MatrixXd u;               // n x K
    Eigen::VectorXd singular_values; // length K, nonincreasing
    Eigen::MatrixXd v;               // p x K, temporal EOFs
    Eigen::Index n_locations = 0;
    Eigen::VectorXd variance_shares; // length K, sums to 1 unless Z == 0

    Eigen::Index k() const { return singular_values.size(); }
    Eigen::Index p() const { return mean_vector.size(); }
};

/// Spatial principal components alpha = U D, one column per retained mode.
struct SpatialCoefficients {
    Eigen::MatrixXd alpha; // n x k_used
    Eigen::Index k_used = 0;
};

/// Removes the cross-location mean at each time step and scales by 1/sqrt(n):
/// Z = (X - 1 xbar^T)/sqrt(n), xbar = (1/n) X^T 1. Returns (Z, xbar).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_scale(const Eigen::MatrixXd& x);

/// Thin SVD of Z with a fixed sign convention: each (u_k, v_k) pair is flipped
/// so the largest-magnitude entry of v_k is positive.
EofModel svd_eof(const Eigen::MatrixXd& z, const Eigen::VectorXd& mean_vector);

/// Convenience: center_scale followed by svd_eof.
EofModel eof_decompose(const Eigen::MatrixXd& x);

/// Smallest K̄ whose cumulative variance share reaches `threshold` in (0,1].
Eigen::Index truncate_rank(const EofModel& model, double threshold);

SpatialCoefficients spatial_coefficients(const EofModel& model, Eigen::Index k_bar);

/// sqrt(n) U D V^T + 1 xbar^T over the first k_bar modes; k_bar = 0 yields the
/// mean field.
Eigen::MatrixXd reconstruct(const EofModel& model, Eigen::Index k_bar);

/// Extended reconstruction over p+h time steps. `v_ext` is (p+h) x k_bar whose
/// first p rows must equal the model's EOFs; the h appended rows are forecasts.
/// The additive constant for the appended columns is the grand mean of xbar.
Eigen::MatrixXd reconstruct_extended(const EofModel& model, Eigen::Index k_bar,
                                     const Eigen::MatrixXd& v_ext, Eigen::Index h);

/// Persistence: eof_meta.json + u.f64le / v.f64le / d.f64le (row-major).
void save_eof_model(const EofModel& model, const std::filesystem::path& dir);
EofModel load_eof_model(const std::filesystem::path& dir);

} // namespace eofcast

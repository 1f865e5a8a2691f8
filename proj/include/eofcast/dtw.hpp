#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace eofcast {

/// Symmetric matrix of pairwise DTW distances.
struct DistanceMatrix {
    Eigen::MatrixXd d;           // m x m, zero diagonal
    std::vector<int> series_ids; // length m

    Eigen::Index size() const { return d.rows(); }
};

/// Dynamic time warping distance with absolute-difference local cost and
/// symmetric steps (match/insert/delete). `band` restricts the alignment to
/// |i - j| <= band (Sakoe-Chiba); it must be at least |len(a) - len(b)|.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<int> band = {});

/// Pairwise DTW matrix over a set of series. Fills (i,j) pairs in parallel;
/// the result does not depend on thread count.
DistanceMatrix dtw_distance_matrix(const std::vector<std::vector<double>>& series,
                                   std::optional<int> band = {},
                                   std::vector<int> series_ids = {},
                                   unsigned threads = 0);

/// Flat m x m row-major binary persistence.
void save_distance_matrix(const DistanceMatrix& dist, const std::filesystem::path& path);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path,
                                    std::vector<int> series_ids);

} // namespace eofcast

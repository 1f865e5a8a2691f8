#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "eofcast/dtw.hpp"
#include "eofcast/grid.hpp"

namespace eofcast {

/// One agglomerative merge. Leaves are 0..m-1; the cluster created by merge
/// t gets id m+t (so `a` and `b` may refer to leaves or earlier merges).
struct MergeStep {
    int a = 0;
    int b = 0;
    double height = 0.0;
};

/// Hierarchical clustering result cut at k clusters.
struct ClusterModel {
    std::vector<MergeStep> merge_history; // m-1 steps, heights nondecreasing
    std::vector<int> labels;              // per series, values 1..k
    int k = 0;
    std::vector<int> medoid_ids;          // per cluster c: series index of the medoid
    DistanceMatrix distance;
};

/// Agglomerative clustering with the Ward criterion applied to squared
/// distances (Lance-Williams update, ward.D2 convention), cut at k clusters.
/// The medoid of each cluster minimizes the summed distance to its members;
/// ties break toward the lowest series index. Cluster labels 1..k are
/// assigned by the lowest member index.
ClusterModel cluster_hierarchical(const DistanceMatrix& dist, int k);

/// Great-circle distance in kilometers (haversine, Earth radius 6371 km).
double haversine_km(double lon1, double lat1, double lon2, double lat2);

/// Labels each grid point with the cluster of its nearest sample under
/// great-circle distance; exact ties resolve to the lowest cluster id.
std::vector<int> assign_grid(const std::vector<Location>& grid,
                             const std::vector<Location>& samples,
                             const std::vector<int>& labels);

/// Adjusted Rand Index between two partitions of the same items, in [-1, 1].
double partition_similarity(std::span<const int> labels_a, std::span<const int> labels_b);

/// clusters.json: {k, series_ids, labels, medoid_ids, merge_history}.
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& json_path,
                        const std::filesystem::path& dtw_path);
ClusterModel load_cluster_model(const std::filesystem::path& json_path,
                                const std::filesystem::path& dtw_path);

} // namespace eofcast

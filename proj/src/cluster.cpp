#include "eofcast/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "eofcast/errors.hpp"

namespace eofcast {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n))
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

double binom2(double n) { return n * (n - 1.0) / 2.0; }

} // namespace

ClusterModel cluster_hierarchical(const DistanceMatrix& dist, int k)
{
    const auto m = static_cast<int>(dist.size());
    if (m < 1) throw EmptySeries("distance matrix is empty");
    if (k < 1 || k > m) throw InvalidArgument("k must lie in [1, m]");

    // Ward via Lance-Williams on squared distances (ward.D2): merging i and j,
    // S(l, i+j) = ((n_l+n_i) S(l,i) + (n_l+n_j) S(l,j) - n_l S(i,j)) / (n_l+n_i+n_j).
    Eigen::MatrixXd s = dist.d.array().square();
    std::vector<bool> active(static_cast<std::size_t>(m), true);
    std::vector<double> sizes(static_cast<std::size_t>(m), 1.0);
    std::vector<int> slot_id(static_cast<std::size_t>(m)); // cluster id living in each slot
    std::iota(slot_id.begin(), slot_id.end(), 0);

    ClusterModel model;
    model.k = k;
    model.distance = dist;
    model.merge_history.reserve(static_cast<std::size_t>(m - 1));

    for (int step = 0; step < m - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < m; ++j) {
                if (!active[static_cast<std::size_t>(j)]) continue;
                const double v = s(i, j);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }

        const double ni = sizes[static_cast<std::size_t>(bi)];
        const double nj = sizes[static_cast<std::size_t>(bj)];
        for (int l = 0; l < m; ++l) {
            if (!active[static_cast<std::size_t>(l)] || l == bi || l == bj) continue;
            const double nl = sizes[static_cast<std::size_t>(l)];
            const double updated = ((nl + ni) * s(l, bi) + (nl + nj) * s(l, bj) - nl * best) /
                                   (nl + ni + nj);
            s(l, bi) = s(bi, l) = updated;
        }

        const int ida = std::min(slot_id[static_cast<std::size_t>(bi)],
                                 slot_id[static_cast<std::size_t>(bj)]);
        const int idb = std::max(slot_id[static_cast<std::size_t>(bi)],
                                 slot_id[static_cast<std::size_t>(bj)]);
        model.merge_history.push_back(MergeStep{ida, idb, std::sqrt(best)});

        sizes[static_cast<std::size_t>(bi)] = ni + nj;
        active[static_cast<std::size_t>(bj)] = false;
        slot_id[static_cast<std::size_t>(bi)] = m + step;
    }

    // Cut: replay the first m-k merges over the leaves.
    UnionFind uf(m);
    std::vector<int> merge_leaf(static_cast<std::size_t>(m - 1), -1); // id -> any leaf
    auto leaf_of = [&](int id) {
        return id < m ? id : merge_leaf[static_cast<std::size_t>(id - m)];
    };
    for (int step = 0; step < m - 1; ++step) {
        const auto& ms = model.merge_history[static_cast<std::size_t>(step)];
        if (step < m - k) uf.unite(leaf_of(ms.a), leaf_of(ms.b));
        merge_leaf[static_cast<std::size_t>(step)] = leaf_of(ms.a);
    }

    // Components ordered by their lowest member become clusters 1..k.
    std::map<int, int> root_label;
    model.labels.resize(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        const int root = uf.find(i);
        auto [it, inserted] = root_label.emplace(root, 0);
        if (inserted) it->second = static_cast<int>(root_label.size());
        model.labels[static_cast<std::size_t>(i)] = it->second;
    }

    model.medoid_ids.resize(static_cast<std::size_t>(k), -1);
    for (int c = 1; c <= k; ++c) {
        std::vector<int> members;
        for (int i = 0; i < m; ++i)
            if (model.labels[static_cast<std::size_t>(i)] == c) members.push_back(i);
        double best_sum = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (int i : members) {
            double sum = 0.0;
            for (int j : members) sum += dist.d(i, j);
            if (sum < best_sum) {
                best_sum = sum;
                best_idx = i;
            }
        }
        model.medoid_ids[static_cast<std::size_t>(c - 1)] = best_idx;
    }
    return model;
}

double haversine_km(double lon1, double lat1, double lon2, double lat2)
{
    constexpr double earth_radius_km = 6371.0;
    constexpr double deg = std::numbers::pi / 180.0;
    const double dphi = (lat2 - lat1) * deg;
    const double dlam = (lon2 - lon1) * deg;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlam / 2) *
                         std::sin(dlam / 2);
    return 2.0 * earth_radius_km * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<int> assign_grid(const std::vector<Location>& grid,
                             const std::vector<Location>& samples,
                             const std::vector<int>& labels)
{
    if (samples.empty()) throw InvalidArgument("assign_grid requires at least one sample");
    if (labels.size() != samples.size())
        throw LengthMismatch("labels length does not match sample count");

    std::vector<int> out(grid.size(), 0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double best = std::numeric_limits<double>::infinity();
        int best_label = std::numeric_limits<int>::max();
        for (std::size_t sidx = 0; sidx < samples.size(); ++sidx) {
            const double d = haversine_km(grid[g].lon, grid[g].lat, samples[sidx].lon,
                                          samples[sidx].lat);
            if (d < best || (d == best && labels[sidx] < best_label)) {
                best = d;
                best_label = labels[sidx];
            }
        }
        out[g] = best_label;
    }
    return out;
}

double partition_similarity(std::span<const int> labels_a, std::span<const int> labels_b)
{
    if (labels_a.size() != labels_b.size())
        throw LengthMismatch("partitions have different lengths");
    const auto n = labels_a.size();
    if (n == 0) throw InvalidArgument("partitions are empty");

    std::map<std::pair<int, int>, double> contingency;
    std::map<int, double> row_sum, col_sum;
    for (std::size_t i = 0; i < n; ++i) {
        contingency[{labels_a[i], labels_b[i]}] += 1.0;
        row_sum[labels_a[i]] += 1.0;
        col_sum[labels_b[i]] += 1.0;
    }

    double index = 0.0;
    for (const auto& [key, count] : contingency) index += binom2(count);
    double sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, count] : row_sum) sum_a += binom2(count);
    for (const auto& [key, count] : col_sum) sum_b += binom2(count);

    const double expected = sum_a * sum_b / binom2(static_cast<double>(n));
    const double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return index == expected ? 1.0 : 0.0;
    return (index - expected) / (max_index - expected);
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& json_path,
                        const std::filesystem::path& dtw_path)
{
    nlohmann::json j;
    j["k"] = model.k;
    j["series_ids"] = model.distance.series_ids;
    j["labels"] = model.labels;
    j["medoid_ids"] = model.medoid_ids;
    auto& jm = j["merge_history"] = nlohmann::json::array();
    for (const auto& ms : model.merge_history) jm.push_back({ms.a, ms.b, ms.height});

    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + json_path.string());
    out << j.dump(2) << '\n';

    save_distance_matrix(model.distance, dtw_path);
}

ClusterModel load_cluster_model(const std::filesystem::path& json_path,
                                const std::filesystem::path& dtw_path)
{
    std::ifstream in(json_path);
    if (!in) throw InvalidArgument("cannot open " + json_path.string());
    nlohmann::json j;
    in >> j;

    ClusterModel model;
    model.k = j.at("k").get<int>();
    model.labels = j.at("labels").get<std::vector<int>>();
    model.medoid_ids = j.at("medoid_ids").get<std::vector<int>>();
    for (const auto& jm : j.at("merge_history"))
        model.merge_history.push_back(
            MergeStep{jm.at(0).get<int>(), jm.at(1).get<int>(), jm.at(2).get<double>()});
    model.distance =
        load_distance_matrix(dtw_path, j.at("series_ids").get<std::vector<int>>());
    return model;
}

} // namespace eofcast

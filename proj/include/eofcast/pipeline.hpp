#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eofcast/ann.hpp"
#include "eofcast/coherence.hpp"
#include "eofcast/grid.hpp"
#include "eofcast/metrics.hpp"

namespace eofcast {

/// Everything a run needs, read from one JSON document. Parsing is strict:
/// an unknown key anywhere is a ConfigError naming the key, so typos fail
/// loudly instead of silently using a default.
struct PipelineConfig {
    std::filesystem::path data; // tidy CSV, or a directory saved by save_field
    std::string variable = "precipitation";

    std::optional<DateWindow> cluster_window; // default: the whole record
    std::set<int> months{5, 6, 7, 8};         // clustering + coherence season
    int k = 7;
    std::optional<int> dtw_band; // Sakoe-Chiba half-width; absent = exact DTW
    std::vector<int> sample_ids; // empty = cluster on every location
    bool normalize = false;      // z-normalize series before DTW; amplitude is
                                 // usually part of the regional signal, so off

    double wet_threshold = 1.0; // mm; wet day is value strictly above

    DateWindow train_window;
    double variance_threshold = 0.8;
    ForecastConfig forecast; // horizon lives here; seed injected from below

    std::uint64_t seed = 0;
    std::filesystem::path out;
    unsigned threads = 0; // 0 = hardware concurrency
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Per-cluster results gathered by the evaluate stage. Wall-clock seconds are
/// reported in timings.log only — never in report.json or the CSVs, which
/// must be byte-identical across reruns.
struct ClusterReport {
    int id = 0;
    int n_locations = 0;
    Eigen::Index k_bar = 0;
    double explained_variance = 0.0;
    int medoid_id = -1;
    double medoid_lon = 0.0, medoid_lat = 0.0, medoid_elev = 0.0;
    std::vector<double> alpha_stability; // train window vs full record, per mode
    std::optional<AccuracyRow> accuracy;       // absent when no held-out data
    std::optional<AccuracyRow> naive_accuracy; // persistence baseline
    std::string forecast_csv; // fig_medoid_<id>.csv, relative to the out dir
};

struct ForecastReport {
    std::vector<ClusterReport> clusters;
    std::vector<CoherenceRow> coherence;
};

/// Stages. Each reads the artifacts of the stages before it from cfg.out and
/// writes its own there, so a pipeline can be resumed or rerun per stage:
///   ingest     -> field/
///   cluster    -> clusters.json, dtw.f64le, assignments.json
///   coherence  -> coherence.csv
///   decompose  -> cluster_<c>/eof, cluster_<c>/eof_full, cluster_<c>/kbar.json
///   forecast   -> cluster_<c>/wann_<k>, cluster_<c>/v_ext.f64le (+ meta)
///   evaluate   -> accuracy.csv, fig_medoid_<c>.csv, report.json
void stage_ingest(const PipelineConfig& cfg);
void stage_cluster(const PipelineConfig& cfg);
void stage_coherence(const PipelineConfig& cfg);
void stage_decompose(const PipelineConfig& cfg);
void stage_forecast(const PipelineConfig& cfg);
ForecastReport stage_evaluate(const PipelineConfig& cfg);

/// All six stages in order; fully deterministic for a given (cfg, data).
ForecastReport run_pipeline(const PipelineConfig& cfg);

} // namespace eofcast

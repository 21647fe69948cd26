#ifndef SPEHEATAL_PIPELINE_HPP
#define SPEHEATAL_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "speheatal/con2dis.hpp"
#include "speheatal/head_filter.hpp"
#include "speheatal/preprocess.hpp"
#include "speheatal/splice.hpp"

namespace speheatal {

struct PipelineConfig {
    PreprocessConfig preprocess;
    FilterThresholds filter;
    Con2DisConfig con2dis;
    SpliceThresholds splice;
    std::optional<std::string> heads_dir;
    unsigned seed = 1;
};

/// Flat key-value config ("con2dis.knn_k = 8", '#' comments). Unknown keys
/// are rejected. serialize() emits the canonical form: every key, fixed
/// order.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);
std::string serialize_config(const PipelineConfig& cfg);

/// Tail clustering over a whole scene. Each connected component of the
/// tail image is clustered independently: the cluster count for a
/// component is the number of heads adjacent to it (at least one), so a
/// crossing pair splits in two while a breakpoint fragment stays whole
/// for the splice stage to reattach. An explicit num_clusters in the
/// config overrides this and clusters the full image jointly.
struct TailClustering {
    std::vector<BinaryMask> cluster_masks;
    std::vector<BinaryMask> cluster_skeletons;  // parallel to cluster_masks
    BinaryMask skeleton;                        // union of all skeleton points
    Con2DisDiagnostics diagnostics;             // aggregated over components
};
TailClustering cluster_tails(const BinaryMask& tail_image,
                             const std::vector<BinaryMask>& heads,
                             const Con2DisConfig& cfg);

struct StageTimings {
    double preprocess_ms = 0;
    double head_filter_ms = 0;
    double con2dis_ms = 0;
    double splice_ms = 0;
};

struct PipelineResult {
    std::vector<SpermInstance> instances;
    std::vector<BinaryMask> heads;
    std::vector<BinaryMask> dye;
    BinaryMask tail_image;
    BinaryMask tail_skeleton;
    std::vector<BinaryMask> tail_clusters;
    StageTimings timings;
    Con2DisDiagnostics diagnostics;
    bool empty_foreground = false;
};

/// preprocess -> head filter -> con2dis -> splice. The cluster count
/// defaults to the number of detected heads (eigengap fallback when none).
/// Dye pixels are excluded from every instance mask.
PipelineResult run_pipeline(const RgbImage& image, const PipelineConfig& cfg);

/// Per-instance overlay rendering: distinct hues, overlap pixels blended.
RgbImage render_overlay(const RgbImage& base, const std::vector<SpermInstance>& instances);

}  // namespace speheatal

#endif

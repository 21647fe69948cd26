#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "speheatal/baselines.hpp"
#include "speheatal/image_io.hpp"
#include "speheatal/metrics.hpp"
#include "speheatal/pipeline.hpp"
#include "speheatal/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace speheatal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

std::vector<std::string> list_pngs(const std::string& dir) {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".png")
            out.push_back(e.path().string());
    if (ec) throw IoError("cannot list directory: " + dir);
    std::sort(out.begin(), out.end());
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << text;
}

std::string pad2(int i) {
    std::string s = std::to_string(i);
    return s.size() < 2 ? "0" + s : s;
}

struct SegmentOptions {
    std::string input;
    std::string out_dir = "out";
    std::string config_path;
    std::string heads_dir;
    std::string diagnostics_dir;
    int jobs = 1;
    int seed = -1;
    double alpha = -1, beta = -1, gamma = -1, lambda1 = -1, lambda2 = -1;
    int k = -1;
};

PipelineConfig make_config(const SegmentOptions& opt) {
    PipelineConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
    if (!opt.heads_dir.empty()) cfg.heads_dir = opt.heads_dir;
    if (opt.seed >= 0) cfg.seed = static_cast<unsigned>(opt.seed);
    if (opt.alpha > 0) cfg.filter.alpha = opt.alpha;
    if (opt.beta > 0) cfg.filter.beta = opt.beta;
    if (opt.gamma > 0) cfg.con2dis.restore_gamma = opt.gamma;
    if (opt.lambda1 > 0) cfg.splice.lambda1 = opt.lambda1;
    if (opt.lambda2 > 0) cfg.splice.lambda2 = opt.lambda2;
    if (opt.k > 0) cfg.con2dis.num_clusters = opt.k;
    cfg.con2dis.seed = cfg.seed;
    return cfg;
}

json segment_one(const std::string& image_path, const PipelineConfig& cfg,
                 const std::string& out_dir, const std::string& diag_dir) {
    std::string stem = fs::path(image_path).stem().string();
    RgbImage img = read_png_rgb(image_path);
    PipelineResult res = run_pipeline(img, cfg);

    fs::create_directories(fs::path(out_dir) / "masks");
    fs::create_directories(fs::path(out_dir) / "overlays");
    json entry;
    entry["image"] = fs::path(image_path).filename().string();
    entry["instances"] = res.instances.size();
    entry["heads"] = res.heads.size();
    entry["dye_blocks"] = res.dye.size();
    entry["empty_foreground"] = res.empty_foreground;
    json mask_files = json::array();
    for (size_t i = 0; i < res.instances.size(); ++i) {
        std::string name = stem + "_instance_" + pad2(static_cast<int>(i)) + ".png";
        write_png((fs::path(out_dir) / "masks" / name).string(), res.instances[i].full_mask);
        mask_files.push_back(name);
    }
    entry["masks"] = mask_files;
    write_png((fs::path(out_dir) / "overlays" / (stem + ".png")).string(),
              render_overlay(img, res.instances));
    if (res.empty_foreground)
        std::cerr << "warning: empty foreground in " << image_path << "\n";

    if (!diag_dir.empty()) {
        fs::create_directories(diag_dir);
        json diag;
        diag["num_points"] = res.diagnostics.num_points;
        diag["num_isolated"] = res.diagnostics.num_isolated;
        diag["num_components"] = res.diagnostics.num_components;
        diag["affinity_nonzeros"] = res.diagnostics.affinity_nonzeros;
        diag["chosen_k"] = res.diagnostics.chosen_k;
        diag["eigenvalues"] = res.diagnostics.eigenvalues;
        diag["em_loglik_trace"] = res.diagnostics.em_loglik_trace;
        diag["em_reseeds"] = res.diagnostics.em_reseeds;
        diag["timings_ms"] = {{"preprocess", res.timings.preprocess_ms},
                              {"head_filter", res.timings.head_filter_ms},
                              {"con2dis", res.timings.con2dis_ms},
                              {"splice", res.timings.splice_ms}};
        write_text((fs::path(diag_dir) / (stem + "_diagnostics.json")).string(),
                   diag.dump(2) + "\n");
        write_png((fs::path(diag_dir) / (stem + "_skeleton.png")).string(),
                  res.tail_skeleton.width() > 0
                      ? res.tail_skeleton
                      : BinaryMask(img.width(), img.height()));
        for (size_t c = 0; c < res.tail_clusters.size(); ++c)
            write_png((fs::path(diag_dir) / (stem + "_cluster_" + pad2(int(c)) + ".png"))
                          .string(),
                      res.tail_clusters[c]);
    }
    return entry;
}

int cmd_segment(const SegmentOptions& opt) {
    PipelineConfig cfg = make_config(opt);
    std::vector<std::string> inputs;
    if (fs::is_directory(opt.input)) {
        inputs = list_pngs(opt.input);
    } else if (fs::is_regular_file(opt.input)) {
        inputs.push_back(opt.input);
    } else {
        throw IoError("input not found: " + opt.input);
    }
    if (inputs.empty()) throw IoError("no .png images under " + opt.input);
    fs::create_directories(opt.out_dir);

    std::vector<json> entries(inputs.size());
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < inputs.size(); i = next.fetch_add(1)) {
            try {
                entries[i] = segment_one(inputs[i], cfg, opt.out_dir, opt.diagnostics_dir);
            } catch (...) {
                std::lock_guard lk(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    int jobs = std::max(1, opt.jobs);
    if (jobs == 1 || inputs.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<size_t>(jobs, inputs.size()); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    json report;
    report["config"] = serialize_config(cfg);
    report["images"] = entries;
    write_text((fs::path(opt.out_dir) / "report.json").string(), report.dump(2) + "\n");
    return kExitOk;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
    auto [img, gt] = generate(spec);
    fs::create_directories(fs::path(out_dir) / "truth");
    write_png((fs::path(out_dir) / "image.png").string(), img);
    json manifest;
    manifest["seed"] = spec.seed;
    manifest["width"] = spec.width;
    manifest["height"] = spec.height;
    manifest["num_sperm"] = spec.num_sperm;
    auto dump_masks = [&](const std::vector<BinaryMask>& masks, const std::string& prefix) {
        json names = json::array();
        for (size_t i = 0; i < masks.size(); ++i) {
            std::string name = prefix + "_" + pad2(static_cast<int>(i)) + ".png";
            write_png((fs::path(out_dir) / "truth" / name).string(), masks[i]);
            names.push_back(name);
        }
        return names;
    };
    manifest["full_masks"] = dump_masks(gt.full_masks, "full");
    manifest["tail_masks"] = dump_masks(gt.tail_masks, "tail");
    manifest["head_masks"] = dump_masks(gt.head_masks, "head");
    manifest["dye_masks"] = dump_masks(gt.dye_masks, "dye");
    write_text((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_eval(const std::string& truth_dir, const std::string& pred_dir,
             const std::string& report_path) {
    std::vector<BinaryMask> truth, pred;
    for (const auto& p : list_pngs(truth_dir)) truth.push_back(read_png_mask(p));
    for (const auto& p : list_pngs(pred_dir)) pred.push_back(read_png_mask(p));
    if (truth.empty() || pred.empty()) throw IoError("eval: empty mask directory");
    PairedScores scores = miou_mdice(truth, pred);

    std::printf("%-12s %8s %8s %16s %15s\n", "method", "mIoU", "mDice", "unmatched_truth",
                "unmatched_pred");
    std::printf("%-12s %8.4f %8.4f %16d %15d\n", "speheatal", scores.miou, scores.mdice,
                scores.unmatched_truth, scores.unmatched_pred);
    if (!report_path.empty()) {
        json rep;
        rep["miou"] = scores.miou;
        rep["mdice"] = scores.mdice;
        rep["unmatched_truth"] = scores.unmatched_truth;
        rep["unmatched_pred"] = scores.unmatched_pred;
        json pairs = json::array();
        for (const auto& p : scores.pairs)
            pairs.push_back({{"truth", p.truth_idx},
                             {"pred", p.pred_idx},
                             {"iou", p.iou},
                             {"dice", p.dice}});
        rep["pairs"] = pairs;
        write_text(report_path, rep.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_ablate(const std::string& suite, unsigned seed, int count) {
    if (suite != "cross20") throw ConfigError("unknown ablation suite: " + suite);
    Con2DisConfig cfg;
    cfg.seed = seed;
    double acc_con2dis = 0, acc_sc = 0, acc_ahc = 0, acc_km = 0;
    for (int i = 0; i < count; ++i) {
        CrossFixture fix = make_cross_fixture(seed + i);
        Con2DisConfig c = cfg;
        c.num_clusters = 2;
        Con2DisResult res = con2dis(fix.tail_image, c);
        acc_con2dis += cross_label_accuracy(fix, res.points.points,
                                            res.assignment.skeleton_labels);
        const auto& pts = res.points.points;
        acc_sc += cross_label_accuracy(fix, pts, spectral_distance_only(pts, 2, 0, c));
        acc_ahc += cross_label_accuracy(fix, pts, ahc(pts, 2, Linkage::Single));
        acc_km += cross_label_accuracy(fix, pts, kmeans_pixels(pts, 2, c.seed));
    }
    std::printf("%-10s %14s\n", "method", "mean_accuracy");
    std::printf("%-10s %14.4f\n", "con2dis", acc_con2dis / count);
    std::printf("%-10s %14.4f\n", "sc", acc_sc / count);
    std::printf("%-10s %14.4f\n", "ahc", acc_ahc / count);
    std::printf("%-10s %14.4f\n", "kmeans", acc_km / count);
    return kExitOk;
}

int cmd_cluster(const std::string& mask_path, int k, const std::string& out_dir,
                const std::string& config_path, const std::string& diag_dir) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    Con2DisConfig c = cfg.con2dis;
    if (k > 0) c.num_clusters = k;
    BinaryMask mask = read_png_mask(mask_path);
    Con2DisResult res = con2dis(mask, c);
    fs::create_directories(out_dir);
    std::string stem = fs::path(mask_path).stem().string();
    for (size_t i = 0; i < res.cluster_masks.size(); ++i)
        write_png((fs::path(out_dir) / (stem + "_cluster_" + pad2(int(i)) + ".png")).string(),
                  res.cluster_masks[i]);
    write_png((fs::path(out_dir) / (stem + "_skeleton.png")).string(), res.points.skeleton);
    if (!diag_dir.empty()) {
        fs::create_directories(diag_dir);
        json diag;
        diag["num_points"] = res.diagnostics.num_points;
        diag["chosen_k"] = res.diagnostics.chosen_k;
        diag["eigenvalues"] = res.diagnostics.eigenvalues;
        diag["em_loglik_trace"] = res.diagnostics.em_loglik_trace;
        diag["affinity_nonzeros"] = res.diagnostics.affinity_nonzeros;
        write_text((fs::path(diag_dir) / (stem + "_diagnostics.json")).string(),
                   diag.dump(2) + "\n");
    }
    std::printf("clusters: %zu\n", res.cluster_masks.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised segmentation of overlapping tubular structures"};
    app.require_subcommand(1);

    SegmentOptions seg;
    auto* segment = app.add_subcommand("segment", "Run the full pipeline on an image or directory");
    segment->add_option("input", seg.input, "PNG image or directory of PNGs")->required();
    segment->add_option("--out", seg.out_dir, "Output directory");
    segment->add_option("--config", seg.config_path, "Config file");
    segment->add_option("--heads-dir", seg.heads_dir, "Directory of external head mask PNGs");
    segment->add_option("--dump-diagnostics", seg.diagnostics_dir, "Diagnostics output directory");
    segment->add_option("--jobs", seg.jobs, "Concurrent images");
    segment->add_option("--seed", seg.seed, "Random seed");
    segment->add_option("--alpha", seg.alpha, "Shape threshold");
    segment->add_option("--beta", seg.beta, "Color threshold");
    segment->add_option("--gamma", seg.gamma, "Restoration distance (px)");
    segment->add_option("--lambda1", seg.lambda1, "Splice distance threshold (px)");
    segment->add_option("--lambda2", seg.lambda2, "Splice angle threshold (deg)");
    segment->add_option("--k", seg.k, "Number of tail clusters");

    SynthSpec spec;
    std::string synth_out = "synth_out";
    int spec_seed = 1;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--seed", spec_seed, "Random seed");
    synth->add_option("--num-sperm", spec.num_sperm, "Sperm count");
    synth->add_option("--num-dye", spec.num_dye_blobs, "Dye blob count");
    synth->add_option("--breakpoint-prob", spec.breakpoint_prob, "Tail gap probability");
    synth->add_option("--noise-prob", spec.noise_prob, "Speckle noise level");
    synth->add_flag("--force-crossing", spec.force_crossing, "Force sperm 1 to cross sperm 0");
    synth->add_option("--width", spec.width, "Image width");
    synth->add_option("--height", spec.height, "Image height");

    std::string truth_dir, pred_dir, eval_report;
    auto* eval = app.add_subcommand("eval", "Score predicted instance masks against ground truth");
    eval->add_option("--truth", truth_dir, "Ground-truth mask directory")->required();
    eval->add_option("--pred", pred_dir, "Predicted mask directory")->required();
    eval->add_option("--report", eval_report, "JSON report path");

    std::string suite = "cross20";
    int ablate_seed = 1000, ablate_count = 20;
    auto* ablate = app.add_subcommand("ablate", "Compare clusterers on the synthetic cross suite");
    ablate->add_option("--suite", suite, "Suite name (cross20)");
    ablate->add_option("--seed", ablate_seed, "Base seed");
    ablate->add_option("--count", ablate_count, "Fixture count");

    std::string cluster_input, cluster_out = "cluster_out", cluster_cfg, cluster_diag;
    int cluster_k = 0;
    auto* cluster = app.add_subcommand("cluster", "Run tail clustering alone on a mask PNG");
    cluster->add_option("input", cluster_input, "Tail mask PNG")->required();
    cluster->add_option("--k", cluster_k, "Number of clusters (0 = auto)");
    cluster->add_option("--out", cluster_out, "Output directory");
    cluster->add_option("--config", cluster_cfg, "Config file");
    cluster->add_option("--dump-diagnostics", cluster_diag, "Diagnostics output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (segment->parsed()) return cmd_segment(seg);
        if (synth->parsed()) {
            spec.seed = static_cast<unsigned>(spec_seed);
            return cmd_synth(spec, synth_out);
        }
        if (eval->parsed()) return cmd_eval(truth_dir, pred_dir, eval_report);
        if (ablate->parsed()) return cmd_ablate(suite, static_cast<unsigned>(ablate_seed),
                                                ablate_count);
        if (cluster->parsed())
            return cmd_cluster(cluster_input, cluster_k, cluster_out, cluster_cfg,
                               cluster_diag);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ProviderError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

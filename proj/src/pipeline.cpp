#include "speheatal/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace speheatal {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d != std::floor(d)) throw ConfigError("expected integer for " + key + ": " + v);
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("expected bool for " + key + ": " + v);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));

        if (key == "preprocess.brightness_gain") cfg.preprocess.brightness_gain = to_double(key, val);
        else if (key == "preprocess.contrast_gain") cfg.preprocess.contrast_gain = to_double(key, val);
        else if (key == "preprocess.saturation_gain") cfg.preprocess.saturation_gain = to_double(key, val);
        else if (key == "preprocess.sharpen") cfg.preprocess.sharpen = to_bool(key, val);
        else if (key == "preprocess.whiten_background") cfg.preprocess.whiten_background = to_bool(key, val);
        else if (key == "preprocess.purple_hue_lo") cfg.preprocess.purple_hue_lo = to_double(key, val);
        else if (key == "preprocess.purple_hue_hi") cfg.preprocess.purple_hue_hi = to_double(key, val);
        else if (key == "preprocess.green_hue_lo") cfg.preprocess.green_hue_lo = to_double(key, val);
        else if (key == "preprocess.green_hue_hi") cfg.preprocess.green_hue_hi = to_double(key, val);
        else if (key == "preprocess.min_saturation") cfg.preprocess.min_saturation = to_double(key, val);
        else if (key == "preprocess.min_value") cfg.preprocess.min_value = to_double(key, val);
        else if (key == "filter.alpha") cfg.filter.alpha = to_double(key, val);
        else if (key == "filter.beta") cfg.filter.beta = to_double(key, val);
        else if (key == "con2dis.knn_k") cfg.con2dis.knn_k = to_int(key, val);
        else if (key == "con2dis.dbscan_eps") cfg.con2dis.dbscan_eps = to_double(key, val);
        else if (key == "con2dis.dbscan_min_pts") cfg.con2dis.dbscan_min_pts = to_int(key, val);
        else if (key == "con2dis.mppca_num_analyzers") cfg.con2dis.mppca_num_analyzers = to_int(key, val);
        else if (key == "con2dis.tangent_dim") cfg.con2dis.tangent_dim = to_int(key, val);
        else if (key == "con2dis.conformity_exponent") cfg.con2dis.conformity_exponent = to_int(key, val);
        else if (key == "con2dis.num_clusters") cfg.con2dis.num_clusters = to_int(key, val);
        else if (key == "con2dis.em_max_iters") cfg.con2dis.em_max_iters = to_int(key, val);
        else if (key == "con2dis.em_tol") cfg.con2dis.em_tol = to_double(key, val);
        else if (key == "con2dis.restore_gamma") cfg.con2dis.restore_gamma = to_double(key, val);
        else if (key == "con2dis.max_points") cfg.con2dis.max_points = to_int(key, val);
        else if (key == "splice.lambda1") cfg.splice.lambda1 = to_double(key, val);
        else if (key == "splice.lambda2") cfg.splice.lambda2 = to_double(key, val);
        else if (key == "splice.n_slope") cfg.splice.n_slope = to_int(key, val);
        else if (key == "heads_dir") cfg.heads_dir = val.empty() ? std::nullopt : std::optional(val);
        else if (key == "seed") cfg.seed = static_cast<unsigned>(to_int(key, val));
        else throw ConfigError("unknown config key: " + key);
    }
    if (cfg.filter.alpha <= 0 || cfg.filter.alpha >= 1 || cfg.filter.beta <= 0 ||
        cfg.filter.beta >= 1)
        throw ConfigError("filter.alpha and filter.beta must lie in (0,1)");
    if (cfg.con2dis.restore_gamma <= 0) throw ConfigError("con2dis.restore_gamma must be > 0");
    if (cfg.splice.lambda1 <= 0 || cfg.splice.lambda2 <= 0)
        throw ConfigError("splice thresholds must be > 0");
    cfg.con2dis.seed = cfg.seed;
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(12);
    out << "preprocess.brightness_gain = " << cfg.preprocess.brightness_gain << "\n";
    out << "preprocess.contrast_gain = " << cfg.preprocess.contrast_gain << "\n";
    out << "preprocess.saturation_gain = " << cfg.preprocess.saturation_gain << "\n";
    out << "preprocess.sharpen = " << (cfg.preprocess.sharpen ? "true" : "false") << "\n";
    out << "preprocess.whiten_background = "
        << (cfg.preprocess.whiten_background ? "true" : "false") << "\n";
    out << "preprocess.purple_hue_lo = " << cfg.preprocess.purple_hue_lo << "\n";
    out << "preprocess.purple_hue_hi = " << cfg.preprocess.purple_hue_hi << "\n";
    out << "preprocess.green_hue_lo = " << cfg.preprocess.green_hue_lo << "\n";
    out << "preprocess.green_hue_hi = " << cfg.preprocess.green_hue_hi << "\n";
    out << "preprocess.min_saturation = " << cfg.preprocess.min_saturation << "\n";
    out << "preprocess.min_value = " << cfg.preprocess.min_value << "\n";
    out << "filter.alpha = " << cfg.filter.alpha << "\n";
    out << "filter.beta = " << cfg.filter.beta << "\n";
    out << "con2dis.knn_k = " << cfg.con2dis.knn_k << "\n";
    out << "con2dis.dbscan_eps = " << cfg.con2dis.dbscan_eps << "\n";
    out << "con2dis.dbscan_min_pts = " << cfg.con2dis.dbscan_min_pts << "\n";
    out << "con2dis.mppca_num_analyzers = " << cfg.con2dis.mppca_num_analyzers << "\n";
    out << "con2dis.tangent_dim = " << cfg.con2dis.tangent_dim << "\n";
    out << "con2dis.conformity_exponent = " << cfg.con2dis.conformity_exponent << "\n";
    out << "con2dis.num_clusters = " << cfg.con2dis.num_clusters << "\n";
    out << "con2dis.em_max_iters = " << cfg.con2dis.em_max_iters << "\n";
    out << "con2dis.em_tol = " << cfg.con2dis.em_tol << "\n";
    out << "con2dis.restore_gamma = " << cfg.con2dis.restore_gamma << "\n";
    out << "con2dis.max_points = " << cfg.con2dis.max_points << "\n";
    out << "splice.lambda1 = " << cfg.splice.lambda1 << "\n";
    out << "splice.lambda2 = " << cfg.splice.lambda2 << "\n";
    out << "splice.n_slope = " << cfg.splice.n_slope << "\n";
    out << "heads_dir = " << (cfg.heads_dir ? *cfg.heads_dir : "") << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Fold one con2dis run into the scene-level diagnostics.
void merge_diagnostics(Con2DisDiagnostics& agg, const Con2DisDiagnostics& d) {
    agg.num_points += d.num_points;
    agg.num_isolated += d.num_isolated;
    agg.num_components += d.num_components;
    agg.affinity_nonzeros += d.affinity_nonzeros;
    agg.eigenvalues.insert(agg.eigenvalues.end(), d.eigenvalues.begin(), d.eigenvalues.end());
    agg.em_loglik_trace.insert(agg.em_loglik_trace.end(), d.em_loglik_trace.begin(),
                               d.em_loglik_trace.end());
    agg.em_reseeds += d.em_reseeds;
    agg.chosen_k += d.chosen_k;
}

}  // namespace

TailClustering cluster_tails(const BinaryMask& tail_image,
                             const std::vector<BinaryMask>& heads,
                             const Con2DisConfig& cfg) {
    TailClustering out;
    out.skeleton = BinaryMask(tail_image.width(), tail_image.height());

    auto add_cluster = [&](const BinaryMask& mask, const BinaryMask& skel) {
        out.cluster_masks.push_back(mask);
        out.cluster_skeletons.push_back(skel);
        out.skeleton = out.skeleton | skel;
    };
    auto run_con2dis = [&](const BinaryMask& region, int k) {
        Con2DisConfig c = cfg;
        c.num_clusters = k;
        Con2DisResult res = con2dis(region, c);
        std::vector<BinaryMask> skels(res.cluster_masks.size(),
                                      BinaryMask(region.width(), region.height()));
        for (size_t i = 0; i < res.points.points.size(); ++i) {
            const PixelPoint& p = res.points.points[i];
            skels[res.assignment.skeleton_labels[i]].set(p.x, p.y, true);
        }
        for (size_t c2 = 0; c2 < res.cluster_masks.size(); ++c2)
            add_cluster(res.cluster_masks[c2], skels[c2]);
        merge_diagnostics(out.diagnostics, res.diagnostics);
    };

    if (cfg.num_clusters > 0) {
        // Explicit cluster count: one joint clustering of the whole image.
        run_con2dis(tail_image, cfg.num_clusters);
        return out;
    }

    std::vector<BinaryMask> comps = connected_components(tail_image);
    // A head belongs to a component when it lies within the restoration
    // radius of it; that count is the component's cluster budget.
    const int reach = std::max(1, static_cast<int>(std::ceil(cfg.restore_gamma)));
    std::vector<BinaryMask> head_zones;
    head_zones.reserve(heads.size());
    for (const auto& h : heads) head_zones.push_back(h.dilate(reach));

    for (const auto& comp : comps) {
        int k = 0;
        for (const auto& zone : head_zones)
            if ((zone & comp).area() > 0) ++k;
        bool done = false;
        // Multi-head components need splitting; with no heads at all fall
        // back to the eigengap heuristic inside con2dis (k = 0).
        if (k > 1 || heads.empty()) {
            try {
                run_con2dis(comp, k > 1 ? k : 0);
                done = true;
            } catch (const TooFewPointsError&) {
            } catch (const DegenerateAffinityError&) {
            }
        }
        if (!done) {
            BinaryMask skel = thin_to_skeleton(comp);
            add_cluster(comp, skel);
            out.diagnostics.num_points += static_cast<int>(skel.area());
            out.diagnostics.num_components += 1;
            out.diagnostics.chosen_k += 1;
        }
    }
    return out;
}

PipelineResult run_pipeline(const RgbImage& image, const PipelineConfig& cfg) {
    PipelineResult res;
    auto t0 = std::chrono::steady_clock::now();
    RgbImage norm = normalize(image, cfg.preprocess);
    res.timings.preprocess_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    HeadMaskProvider provider = cfg.heads_dir
                                    ? HeadMaskProvider::from_directory(*cfg.heads_dir)
                                    : HeadMaskProvider::builtin();
    HeadFilterResult hf = provide_heads(norm, provider, cfg.filter, cfg.preprocess);
    res.heads = hf.heads;
    res.dye = hf.dye;
    res.tail_image = hf.tail_image;
    res.timings.head_filter_ms = ms_since(t0);

    if (foreground_mask(norm, cfg.preprocess).empty()) {
        res.empty_foreground = true;
        return res;
    }

    t0 = std::chrono::steady_clock::now();
    Con2DisConfig c2d = cfg.con2dis;
    c2d.seed = cfg.seed;

    std::vector<BinaryMask> tail_masks;
    std::vector<BinaryMask> tail_skeletons;
    if (hf.tail_image.area() >= 8) {
        try {
            TailClustering tc = cluster_tails(hf.tail_image, hf.heads, c2d);
            tail_masks = tc.cluster_masks;
            tail_skeletons = tc.cluster_skeletons;
            res.tail_clusters = tc.cluster_masks;
            res.tail_skeleton = tc.skeleton;
            res.diagnostics = tc.diagnostics;
        } catch (const TooFewPointsError&) {
        } catch (const DegenerateAffinityError&) {
        }
    }
    res.timings.con2dis_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    std::vector<Ellipse> head_ellipses;
    std::vector<BinaryMask> splice_heads;
    for (const auto& head : hf.heads) {
        try {
            head_ellipses.push_back(fit_ellipse_moments(head));
            splice_heads.push_back(head);
        } catch (const std::runtime_error&) {
            // Degenerate head: keep it as an instance without axis endpoints.
            head_ellipses.push_back({});
            head_ellipses.back().major_semiaxis = 0;
            splice_heads.push_back(head);
        }
    }
    std::vector<Endpoint> endpoints =
        extract_endpoints(head_ellipses, tail_skeletons, cfg.splice);
    std::vector<MatchedPair> matches = match_endpoints(endpoints, cfg.splice);
    res.instances = assemble(splice_heads, tail_masks, tail_skeletons, endpoints, matches);

    // Dye pixels never belong to an instance.
    if (!hf.dye.empty()) {
        BinaryMask dye_union(image.width(), image.height());
        for (const auto& d : hf.dye) dye_union = dye_union | d;
        for (auto& inst : res.instances) inst.full_mask = inst.full_mask.minus(dye_union);
    }
    res.timings.splice_ms = ms_since(t0);
    return res;
}

RgbImage render_overlay(const RgbImage& base, const std::vector<SpermInstance>& instances) {
    RgbImage out = base;
    const int n = static_cast<int>(instances.size());
    if (n == 0) return out;
    std::vector<Rgb> colors(n);
    for (int i = 0; i < n; ++i)
        colors[i] = hsv_to_rgb({360.0 * i / n, 0.85, 0.9});
    std::vector<int> rsum(static_cast<size_t>(base.width()) * base.height(), 0);
    std::vector<int> gsum(rsum.size(), 0), bsum(rsum.size(), 0), cnt(rsum.size(), 0);
    for (int i = 0; i < n; ++i)
        for (int y = 0; y < base.height(); ++y)
            for (int x = 0; x < base.width(); ++x) {
                if (!instances[i].full_mask.at(x, y)) continue;
                size_t idx = static_cast<size_t>(y) * base.width() + x;
                rsum[idx] += colors[i].r;
                gsum[idx] += colors[i].g;
                bsum[idx] += colors[i].b;
                ++cnt[idx];
            }
    for (int y = 0; y < base.height(); ++y)
        for (int x = 0; x < base.width(); ++x) {
            size_t idx = static_cast<size_t>(y) * base.width() + x;
            if (cnt[idx] == 0) continue;
            // Overlap pixels blend the contributing instance colors.
            out.at(x, y) = {static_cast<std::uint8_t>(rsum[idx] / cnt[idx]),
                            static_cast<std::uint8_t>(gsum[idx] / cnt[idx]),
                            static_cast<std::uint8_t>(bsum[idx] / cnt[idx])};
        }
    return out;
}

}  // namespace speheatal

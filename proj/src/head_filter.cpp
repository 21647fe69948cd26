#include "speheatal/head_filter.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "speheatal/image_io.hpp"

namespace speheatal {

double shape_index(const BinaryMask& m) {
    std::size_t area = m.area();
    if (area == 0) throw EmptyMaskError("shape_index: empty mask");
    Circle c = min_enclosing_circle(m);
    double s_scc = M_PI * c.radius * c.radius;
    if (s_scc < 1.0) s_scc = 1.0;  // radius-0 dot counts as one pixel
    return std::min(1.0, double(area) / s_scc);
}

double color_index(const BinaryMask& m, const BinaryMask& purple) {
    if (!m.same_size(purple))
        throw DimensionMismatchError("color_index: mask sizes differ");
    std::size_t area = m.area();
    if (area == 0) throw EmptyMaskError("color_index: empty mask");
    return double((m & purple).area()) / double(area);
}

MaskClass classify_mask(const BinaryMask& m, const BinaryMask& purple,
                        const FilterThresholds& th) {
    double si = shape_index(m);
    if (si <= th.alpha) return MaskClass::Tail;
    double ci = color_index(m, purple);
    return ci >= th.beta ? MaskClass::Head : MaskClass::DyeBlock;
}

namespace {

std::vector<BinaryMask> builtin_candidates(const RgbImage& img,
                                           const PreprocessConfig& cfg) {
    std::vector<BinaryMask> cands;
    BinaryMask purple = classify_purple(img, cfg);
    for (auto& c : connected_components(purple.dilate(1), 8))
        if (c.area() >= 5) cands.push_back(std::move(c));
    BinaryMask green = classify_green(img, cfg);
    for (auto& c : connected_components(green, 8))
        if (c.area() >= 5) cands.push_back(std::move(c));
    return cands;
}

std::vector<BinaryMask> directory_candidates(const std::string& dir, int w, int h) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw ProviderError("heads directory unreadable: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            paths.push_back(entry.path().string());
    }
    if (ec) throw ProviderError("heads directory unreadable: " + dir);
    std::sort(paths.begin(), paths.end());
    std::vector<BinaryMask> cands;
    for (const auto& p : paths) {
        BinaryMask m = read_png_mask(p);
        if (m.width() != w || m.height() != h)
            throw ProviderError("mask size mismatch: " + p);
        if (m.area() > 0) cands.push_back(std::move(m));
    }
    return cands;
}

}  // namespace

HeadFilterResult provide_heads(const RgbImage& img, const HeadMaskProvider& provider,
                               const FilterThresholds& th, const PreprocessConfig& cfg) {
    std::vector<BinaryMask> cands =
        provider.source == HeadMaskProvider::Source::BuiltinHeuristic
            ? builtin_candidates(img, cfg)
            : directory_candidates(provider.directory, img.width(), img.height());

    BinaryMask purple = classify_purple(img, cfg);
    HeadFilterResult out;
    BinaryMask removed(img.width(), img.height());
    for (auto& m : cands) {
        switch (classify_mask(m, purple, th)) {
            case MaskClass::Head:
                removed = removed | m;
                out.heads.push_back(std::move(m));
                break;
            case MaskClass::DyeBlock:
                removed = removed | m;
                out.dye.push_back(std::move(m));
                break;
            case MaskClass::Tail:
                break;  // left in the tail image
        }
    }
    // External masks cover heads only; still sweep the image for dye blocks
    // so they never reach the tail clustering.
    if (provider.source == HeadMaskProvider::Source::ExternalMaskFiles) {
        for (auto& m : builtin_candidates(img, cfg)) {
            if ((m & removed).area() > 0) continue;
            if (classify_mask(m, purple, th) == MaskClass::DyeBlock) {
                removed = removed | m;
                out.dye.push_back(std::move(m));
            }
        }
    }
    out.tail_image = foreground_mask(img, cfg).minus(removed);
    return out;
}

}  // namespace speheatal

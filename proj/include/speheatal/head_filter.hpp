#ifndef SPEHEATAL_HEAD_FILTER_HPP
#define SPEHEATAL_HEAD_FILTER_HPP

#include <optional>
#include <string>
#include <vector>

#include "speheatal/preprocess.hpp"
#include "speheatal/raster.hpp"

namespace speheatal {

enum class MaskClass { Head, DyeBlock, Tail };

struct FilterThresholds {
    double alpha = 0.25;  // shape threshold, (0,1)
    double beta = 0.4;    // color threshold, (0,1)
};

/// Where head candidate masks come from: a directory of per-candidate PNGs
/// (one mask per file, any filename order), or the built-in color/shape
/// heuristic that needs no external segmenter.
struct HeadMaskProvider {
    enum class Source { ExternalMaskFiles, BuiltinHeuristic };
    Source source = Source::BuiltinHeuristic;
    std::string directory;  // used for ExternalMaskFiles

    static HeadMaskProvider builtin() { return {}; }
    static HeadMaskProvider from_directory(std::string dir) {
        return {Source::ExternalMaskFiles, std::move(dir)};
    }
};

/// Mask area divided by the area of its minimum enclosing circle.
/// Low values mean elongated tubular shapes. A single pixel (radius 0)
/// counts its circle as one pixel, so SI = 1.
double shape_index(const BinaryMask& m);

/// Fraction of the mask lying on purple-classified pixels, in [0,1].
double color_index(const BinaryMask& m, const BinaryMask& purple);

/// Three-way shape/color classification. SI <= alpha is a tail; otherwise
/// CI >= beta is a head and CI < beta a dye block (the CI == beta boundary
/// resolves to Head).
MaskClass classify_mask(const BinaryMask& m, const BinaryMask& purple,
                        const FilterThresholds& th);

struct HeadFilterResult {
    std::vector<BinaryMask> heads;
    std::vector<BinaryMask> dye;
    BinaryMask tail_image;  // foreground minus head and dye pixels
};

/// Gather candidate masks from the provider, classify them, and subtract
/// heads and dye blocks from the stained foreground.
HeadFilterResult provide_heads(const RgbImage& img, const HeadMaskProvider& provider,
                               const FilterThresholds& th, const PreprocessConfig& cfg);

}  // namespace speheatal

#endif

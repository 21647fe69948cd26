#ifndef SPEHEATAL_SYNTHGEN_HPP
#define SPEHEATAL_SYNTHGEN_HPP

#include <utility>
#include <vector>

#include "speheatal/raster.hpp"

namespace speheatal {

struct Range {
    double lo = 0, hi = 0;
    bool valid() const { return hi >= lo; }
};

struct SynthSpec {
    unsigned seed = 1;
    int width = 720, height = 540;
    int num_sperm = 3;
    Range tail_width{3, 5};
    Range tail_length{150, 260};
    Range curvature{0.05, 0.3};  // lateral Bezier control offset / length
    Range head_major{9, 13};
    Range head_minor{5, 8};
    int num_dye_blobs = 1;
    double breakpoint_prob = 0.0;
    Range breakpoint_gap{3, 6};
    double noise_prob = 0.0;  // per-mille-ish chance of stray speckles
    bool force_crossing = false;  // make sperm 1 cross sperm 0 at 60-90 degrees
    Rgb head_color{150, 40, 160};
    Rgb tail_color{40, 170, 70};
    Rgb dye_color{60, 150, 80};
    Rgb background{255, 255, 255};
};

struct GroundTruth {
    std::vector<BinaryMask> full_masks;  // head + tail, one per sperm
    std::vector<BinaryMask> tail_masks;  // tail only
    std::vector<BinaryMask> head_masks;
    std::vector<BinaryMask> dye_masks;
};

/// Deterministic scene generator: Bezier tails with linearly varying width,
/// elliptical heads at one end, irregular dye blobs, optional breakpoint
/// gaps. The same seed gives bit-identical output.
std::pair<RgbImage, GroundTruth> generate(const SynthSpec& spec);

/// Two curves of width 3-5 px crossing at 60-90 degrees, with exact
/// per-curve ground truth. The standard con2dis stress fixture.
struct CrossFixture {
    BinaryMask tail_image;              // union of both curves
    std::vector<BinaryMask> curves;     // ground-truth masks, size 2
};
CrossFixture make_cross_fixture(unsigned seed, int size = 220);

/// Label accuracy of a 2-way clustering against the cross ground truth,
/// scored over unambiguous skeleton points (junction-disc points excluded)
/// under the best label permutation.
double cross_label_accuracy(const CrossFixture& fix, const std::vector<PixelPoint>& points,
                            const std::vector<int>& labels, double junction_radius = 3.0);

}  // namespace speheatal

#endif

#include <doctest.h>

#include "speheatal/head_filter.hpp"
#include "speheatal/preprocess.hpp"
#include "speheatal/synthgen.hpp"

using namespace speheatal;

TEST_CASE("generate is deterministic for a fixed seed") {
    SynthSpec spec;
    spec.seed = 123;
    spec.num_sperm = 3;
    spec.force_crossing = true;
    spec.breakpoint_prob = 0.5;
    auto [img1, gt1] = generate(spec);
    auto [img2, gt2] = generate(spec);
    CHECK(img1 == img2);
    REQUIRE(gt1.full_masks.size() == gt2.full_masks.size());
    for (size_t i = 0; i < gt1.full_masks.size(); ++i)
        CHECK(gt1.full_masks[i] == gt2.full_masks[i]);

    spec.seed = 124;
    auto [img3, gt3] = generate(spec);
    CHECK_FALSE(img1 == img3);  // different seed, different scene
}

TEST_CASE("ground truth covers the painted foreground") {
    SynthSpec spec;
    spec.seed = 7;
    spec.num_sperm = 1;
    spec.num_dye_blobs = 0;
    spec.width = 400;
    spec.height = 300;
    auto [img, gt] = generate(spec);
    REQUIRE(gt.full_masks.size() == 1);
    REQUIRE(gt.tail_masks.size() == 1);
    REQUIRE(gt.head_masks.size() == 1);
    CHECK(gt.dye_masks.empty());

    BinaryMask fg = foreground_mask(img, PreprocessConfig{});
    BinaryMask truth = gt.full_masks[0];
    double inter = double((fg & truth).area());
    double uni = double((fg | truth).area());
    CHECK(inter / uni >= 0.98);
    // full = head | tail
    CHECK(truth == (gt.head_masks[0] | gt.tail_masks[0]));
    CHECK(gt.head_masks[0].area() > 0);
    CHECK(gt.tail_masks[0].area() > gt.head_masks[0].area());
}

TEST_CASE("force_crossing makes the first two tails overlap") {
    for (unsigned seed : {1u, 9u, 33u}) {
        SynthSpec spec;
        spec.seed = seed;
        spec.num_sperm = 2;
        spec.num_dye_blobs = 0;
        spec.force_crossing = true;
        auto [img, gt] = generate(spec);
        REQUIRE(gt.tail_masks.size() == 2);
        CHECK((gt.tail_masks[0] & gt.tail_masks[1]).area() >= 1);
    }
}

TEST_CASE("breakpoints carve a gap in the tail image but not the truth") {
    SynthSpec spec;
    spec.seed = 5;
    spec.num_sperm = 1;
    spec.num_dye_blobs = 0;
    spec.breakpoint_prob = 1.0;
    spec.width = 400;
    spec.height = 300;
    auto [img, gt] = generate(spec);
    BinaryMask fg = foreground_mask(img, PreprocessConfig{});
    // Painted pixels are a strict subset of the ground truth: the gap exists.
    CHECK(fg.minus(gt.full_masks[0]).area() == 0);
    CHECK(gt.full_masks[0].minus(fg).area() > 0);
}

TEST_CASE("generated heads and dye classify as their own categories") {
    SynthSpec spec;
    spec.seed = 21;
    spec.num_sperm = 2;
    spec.num_dye_blobs = 2;
    auto [img, gt] = generate(spec);
    PreprocessConfig pcfg;
    BinaryMask purple = classify_purple(img, pcfg);
    FilterThresholds th;
    for (const auto& h : gt.head_masks)
        CHECK(classify_mask(h, purple, th) == MaskClass::Head);
    for (const auto& d : gt.dye_masks)
        CHECK(classify_mask(d, purple, th) == MaskClass::DyeBlock);
    for (const auto& t : gt.tail_masks)
        CHECK(classify_mask(t, purple, th) == MaskClass::Tail);
}

TEST_CASE("cross fixture: geometry and scoring") {
    CrossFixture fix = make_cross_fixture(4);
    REQUIRE(fix.curves.size() == 2);
    CHECK((fix.curves[0] & fix.curves[1]).area() >= 1);
    CHECK(fix.tail_image == (fix.curves[0] | fix.curves[1]));

    // Perfect labels from the ground truth itself score 1.
    std::vector<PixelPoint> pts;
    std::vector<int> labels;
    for (int c = 0; c < 2; ++c)
        for (const auto& p : fix.curves[c].foreground_points())
            if (!fix.curves[1 - c].at(p.x, p.y)) {
                pts.push_back(p);
                labels.push_back(c);
            }
    CHECK(cross_label_accuracy(fix, pts, labels) == doctest::Approx(1.0));
    // The flipped labeling scores identically (permutation handled inside).
    for (auto& l : labels) l = 1 - l;
    CHECK(cross_label_accuracy(fix, pts, labels) == doctest::Approx(1.0));
    // Constant labels score about half.
    std::fill(labels.begin(), labels.end(), 0);
    double acc = cross_label_accuracy(fix, pts, labels);
    CHECK(acc >= 0.3);
    CHECK(acc <= 0.7);
}

TEST_CASE("cross fixtures are deterministic and vary with the seed") {
    CHECK(make_cross_fixture(8).tail_image == make_cross_fixture(8).tail_image);
    CHECK_FALSE(make_cross_fixture(8).tail_image == make_cross_fixture(9).tail_image);
}

TEST_CASE("impossible placement throws") {
    SynthSpec spec;
    spec.seed = 1;
    spec.width = 40;
    spec.height = 40;  // far too small for a 150-260 px tail
    spec.num_sperm = 1;
    CHECK_THROWS_AS(generate(spec), PlacementError);
}

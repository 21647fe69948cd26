#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "speheatal/head_filter.hpp"
#include "speheatal/image_io.hpp"
#include "speheatal/synthgen.hpp"

using namespace speheatal;
namespace fs = std::filesystem;

namespace {

BinaryMask disk_mask(int size, int cx, int cy, int r) {
    BinaryMask m(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
    return m;
}

}  // namespace

TEST_CASE("shape index: rasterized disk is near 1") {
    CHECK(shape_index(disk_mask(50, 25, 25, 20)) >= 0.95);
}

TEST_CASE("shape index: single pixel is 1") {
    BinaryMask m(5, 5);
    m.set(2, 2, true);
    CHECK(shape_index(m) == doctest::Approx(1.0));
}

TEST_CASE("shape index: thin line is strongly elongated") {
    BinaryMask m(110, 5);
    for (int x = 0; x < 100; ++x) m.set(x, 2, true);
    double expected = 100.0 / (M_PI * 49.5 * 49.5);
    CHECK(shape_index(m) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("color index: containment, disjointness, ratio") {
    BinaryMask m(20, 20), purple(20, 20);
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 5; ++y) m.set(x, y, true);  // area 40
    CHECK(color_index(m, purple) == doctest::Approx(0.0));
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 5; ++y) purple.set(x, y, true);
    CHECK(color_index(m, purple) == doctest::Approx(1.0));
    purple = BinaryMask(20, 20);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 5; ++y) purple.set(x, y, true);  // 10 purple
    CHECK(color_index(m, purple) == doctest::Approx(0.25));
}

TEST_CASE("color index: dimension mismatch throws") {
    BinaryMask m(4, 4, true), purple(5, 5);
    CHECK_THROWS_AS(color_index(m, purple), DimensionMismatchError);
}

TEST_CASE("classify: head, dye block, tail branches") {
    FilterThresholds th;  // alpha 0.25, beta 0.4
    BinaryMask blob = disk_mask(50, 25, 25, 15);
    BinaryMask all_purple(50, 50, true), no_purple(50, 50);
    CHECK(classify_mask(blob, all_purple, th) == MaskClass::Head);
    CHECK(classify_mask(blob, no_purple, th) == MaskClass::DyeBlock);
    BinaryMask line(120, 120);
    for (int x = 0; x < 100; ++x) line.set(x, 60, true);
    CHECK(classify_mask(line, all_purple, th) == MaskClass::Tail);
}

TEST_CASE("classify: CI exactly at beta resolves to Head") {
    FilterThresholds th;
    th.beta = 0.5;
    BinaryMask blob = disk_mask(30, 15, 15, 8);
    // Purple covers exactly half the blob pixels.
    BinaryMask purple(30, 30);
    int want = static_cast<int>(blob.area()) / 2;
    th.beta = double(want) / double(blob.area());
    int painted = 0;
    for (int y = 0; y < 30 && painted < want; ++y)
        for (int x = 0; x < 30 && painted < want; ++x)
            if (blob.at(x, y)) {
                purple.set(x, y, true);
                ++painted;
            }
    CHECK(classify_mask(blob, purple, th) == MaskClass::Head);
}

TEST_CASE("classify is translation invariant") {
    FilterThresholds th;
    BinaryMask blob = disk_mask(60, 15, 15, 8);
    BinaryMask purple = disk_mask(60, 15, 15, 6);
    BinaryMask blob_t(60, 60), purple_t(60, 60);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 60; ++x) {
            if (blob.at(x, y)) blob_t.set(x + 20, y + 25, true);
            if (purple.at(x, y)) purple_t.set(x + 20, y + 25, true);
        }
    CHECK(classify_mask(blob, purple, th) == classify_mask(blob_t, purple_t, th));
}

TEST_CASE("raising beta only moves masks from Head toward DyeBlock") {
    BinaryMask blob = disk_mask(40, 20, 20, 10);
    BinaryMask purple = disk_mask(40, 20, 20, 7);
    for (double b1 : {0.1, 0.3, 0.5, 0.7}) {
        for (double b2 : {0.2, 0.4, 0.6, 0.9}) {
            if (b2 <= b1) continue;
            MaskClass lo = classify_mask(blob, purple, {0.25, b1});
            MaskClass hi = classify_mask(blob, purple, {0.25, b2});
            if (lo == MaskClass::DyeBlock) CHECK(hi == MaskClass::DyeBlock);
        }
    }
}

TEST_CASE("provide_heads: builtin heuristic on a synthetic scene") {
    SynthSpec spec;
    spec.seed = 42;
    spec.num_sperm = 2;
    spec.num_dye_blobs = 1;
    spec.width = 360;
    spec.height = 280;
    auto [img, gt] = generate(spec);
    HeadFilterResult res =
        provide_heads(img, HeadMaskProvider::builtin(), FilterThresholds{}, PreprocessConfig{});
    CHECK(res.heads.size() == 2);
    CHECK(res.dye.size() >= 1);

    // heads, dye, and tail image are pairwise disjoint
    BinaryMask heads_u(img.width(), img.height()), dye_u(img.width(), img.height());
    for (const auto& h : res.heads) heads_u = heads_u | h;
    for (const auto& d : res.dye) dye_u = dye_u | d;
    CHECK((heads_u & dye_u).area() == 0);
    CHECK((heads_u & res.tail_image).area() == 0);
    CHECK((dye_u & res.tail_image).area() == 0);

    // tail image approximates the ground-truth tails
    BinaryMask tails_gt(img.width(), img.height());
    for (const auto& t : gt.tail_masks) tails_gt = tails_gt | t;
    double inter = double((res.tail_image & tails_gt).area());
    double uni = double((res.tail_image | tails_gt).area());
    CHECK(inter / uni >= 0.8);
}

TEST_CASE("provide_heads: image with no purple has zero heads") {
    RgbImage img(40, 40, {255, 255, 255});
    for (int x = 5; x < 35; ++x) img.at(x, 20) = {40, 170, 70};
    HeadFilterResult res =
        provide_heads(img, HeadMaskProvider::builtin(), FilterThresholds{}, PreprocessConfig{});
    CHECK(res.heads.empty());
}

TEST_CASE("provide_heads: external mask files") {
    fs::path dir = fs::temp_directory_path() / "speheatal_heads_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    RgbImage img(120, 80, {255, 255, 255});
    // two purple blobs and one elongated green curve
    BinaryMask blob1 = disk_mask(120, 20, 20, 8);
    BinaryMask blob2 = disk_mask(120, 60, 40, 8);
    BinaryMask line(120, 80);
    for (int x = 10; x < 110; ++x) line.set(x, 70, true);
    for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 120; ++x) {
            if (blob1.at_or(x, y) || blob2.at_or(x, y)) img.at(x, y) = {150, 40, 160};
            if (line.at(x, y)) img.at(x, y) = {40, 170, 70};
        }
    BinaryMask b1(120, 80), b2(120, 80);
    for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 120; ++x) {
            if (blob1.at_or(x, y)) b1.set(x, y, true);
            if (blob2.at_or(x, y)) b2.set(x, y, true);
        }
    write_png((dir / "a.png").string(), b1);
    write_png((dir / "b.png").string(), b2);
    write_png((dir / "c.png").string(), line);

    HeadFilterResult res = provide_heads(img, HeadMaskProvider::from_directory(dir.string()),
                                         FilterThresholds{}, PreprocessConfig{});
    CHECK(res.heads.size() == 2);
    CHECK(res.dye.empty());
    CHECK((res.tail_image & line).area() == line.area());  // tail kept
    fs::remove_all(dir);
}

TEST_CASE("provide_heads: unreadable directory throws ProviderError") {
    RgbImage img(10, 10, {255, 255, 255});
    CHECK_THROWS_AS(provide_heads(img, HeadMaskProvider::from_directory("/no/such/dir"),
                                  FilterThresholds{}, PreprocessConfig{}),
                    ProviderError);
}

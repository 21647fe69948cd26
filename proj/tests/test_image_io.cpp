#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "speheatal/image_io.hpp"

using namespace speheatal;

namespace {

std::string temp_png(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("png round trip: rgb image") {
    RgbImage img(17, 9);
    std::mt19937 rng(3);
    for (auto& p : img.pixels())
        p = {std::uint8_t(rng() & 255), std::uint8_t(rng() & 255), std::uint8_t(rng() & 255)};
    std::string path = temp_png("speheatal_io_rgb.png");
    write_png(path, img);
    CHECK(read_png_rgb(path) == img);
    std::remove(path.c_str());
}

TEST_CASE("png round trip: binary mask") {
    BinaryMask m(23, 11);
    std::mt19937 rng(4);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) m.set(x, y, rng() % 3 == 0);
    std::string path = temp_png("speheatal_io_mask.png");
    write_png(path, m);
    CHECK(read_png_mask(path) == m);
    std::remove(path.c_str());
}

TEST_CASE("rle json: runs start with background") {
    BinaryMask m(4, 1);
    m.set(1, 0, true);
    m.set(2, 0, true);
    std::string j = mask_to_rle_json(m);
    CHECK(j.find("\"rle\":[1,2,1]") != std::string::npos);
    CHECK(mask_from_rle_json(j) == m);
}

TEST_CASE("rle json: round trip on random masks") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMask m(31, 17);
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x) m.set(x, y, rng() % 4 == 0);
        CHECK(mask_from_rle_json(mask_to_rle_json(m)) == m);
    }
}

TEST_CASE("rle json: all-foreground leading zero run") {
    BinaryMask m(3, 1, true);
    std::string j = mask_to_rle_json(m);
    CHECK(j.find("\"rle\":[0,3]") != std::string::npos);
    CHECK(mask_from_rle_json(j) == m);
}

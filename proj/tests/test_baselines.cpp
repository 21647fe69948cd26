#include <doctest.h>

#include <random>

#include "speheatal/baselines.hpp"

using namespace speheatal;

namespace {

std::vector<PixelPoint> two_blobs(int sep = 60) {
    std::vector<PixelPoint> pts;
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> off(-4, 4);
    for (int i = 0; i < 25; ++i) pts.push_back({20 + off(rng), 20 + off(rng)});
    for (int i = 0; i < 25; ++i) pts.push_back({20 + sep + off(rng), 20 + off(rng)});
    return pts;
}

bool splits_blobs(const std::vector<int>& labels) {
    for (int i = 1; i < 25; ++i)
        if (labels[i] != labels[0]) return false;
    for (int i = 26; i < 50; ++i)
        if (labels[i] != labels[25]) return false;
    return labels[0] != labels[25];
}

}  // namespace

TEST_CASE("kmeans_pixels separates two far blobs") {
    auto pts = two_blobs();
    CHECK(splits_blobs(kmeans_pixels(pts, 2, 11)));
}

TEST_CASE("kmeans_pixels edge cases: k=1 and k=n") {
    auto pts = two_blobs();
    auto one = kmeans_pixels(pts, 1, 3);
    CHECK(one == std::vector<int>(pts.size(), 0));
    std::vector<PixelPoint> few{{0, 0}, {10, 0}, {20, 0}};
    auto all = kmeans_pixels(few, 3, 3);
    CHECK(all[0] != all[1]);
    CHECK(all[1] != all[2]);
    CHECK(all[0] != all[2]);
    CHECK_THROWS_AS(kmeans_pixels(few, 0, 3), InvalidKError);
    CHECK_THROWS_AS(kmeans_pixels(few, 4, 3), InvalidKError);
}

TEST_CASE("kmeans_pixels is deterministic under a fixed seed") {
    auto pts = two_blobs();
    CHECK(kmeans_pixels(pts, 2, 5) == kmeans_pixels(pts, 2, 5));
}

TEST_CASE("ahc separates two far blobs under both linkages") {
    auto pts = two_blobs();
    CHECK(splits_blobs(ahc(pts, 2, Linkage::Single)));
    CHECK(splits_blobs(ahc(pts, 2, Linkage::Average)));
}

TEST_CASE("ahc single linkage chains across a small gap") {
    // A line with a 4-px break plus a distant blob: single linkage keeps the
    // broken line together and isolates the blob.
    std::vector<PixelPoint> pts;
    for (int x = 0; x < 30; ++x) pts.push_back({x, 0});
    for (int x = 34; x < 60; ++x) pts.push_back({x, 0});
    for (int i = 0; i < 5; ++i) pts.push_back({100 + i, 50});
    auto labels = ahc(pts, 2, Linkage::Single);
    for (size_t i = 1; i < 56; ++i) CHECK(labels[i] == labels[0]);
    CHECK(labels[56] != labels[0]);
}

TEST_CASE("ahc edge cases") {
    std::vector<PixelPoint> pts{{0, 0}, {5, 0}, {50, 0}};
    auto one = ahc(pts, 1, Linkage::Average);
    CHECK(one == std::vector<int>(3, 0));
    auto all = ahc(pts, 3, Linkage::Average);
    CHECK((all[0] != all[1] && all[1] != all[2] && all[0] != all[2]));
    CHECK_THROWS_AS(ahc(pts, 4, Linkage::Single), InvalidKError);
}

TEST_CASE("spectral_distance_only separates two far blobs") {
    auto pts = two_blobs();
    Con2DisConfig cfg;
    CHECK(splits_blobs(spectral_distance_only(pts, 2, -1.0, cfg)));
}

TEST_CASE("spectral_distance_only labels align with the caller's point order") {
    auto pts = two_blobs();
    Con2DisConfig cfg;
    auto base = spectral_distance_only(pts, 2, -1.0, cfg);
    // Feed the points reversed: each point must keep its cluster membership.
    std::vector<PixelPoint> rev(pts.rbegin(), pts.rend());
    auto rlab = spectral_distance_only(rev, 2, -1.0, cfg);
    for (size_t i = 0; i < pts.size(); ++i) {
        size_t j = pts.size() - 1 - i;
        CHECK((base[i] == base[0]) == (rlab[j] == rlab[pts.size() - 1]));
    }
}

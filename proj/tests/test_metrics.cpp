#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "speheatal/metrics.hpp"

using namespace speheatal;

namespace {

BinaryMask box(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.set(x, y, true);
    return m;
}

// Exhaustive oracle over all injective truth->pred maps (for tiny inputs).
double best_total_iou(const std::vector<BinaryMask>& truth,
                      const std::vector<BinaryMask>& pred) {
    // Pad the prediction side with -1 "skip" slots so every injective
    // truth->pred map appears as a prefix of some permutation.
    size_t n = std::max(truth.size(), pred.size());
    std::vector<int> perm(n, -1);
    for (size_t i = 0; i < pred.size(); ++i) perm[i] = static_cast<int>(i);
    std::sort(perm.begin(), perm.end());
    double best = 0;
    do {
        double total = 0;
        for (size_t t = 0; t < truth.size(); ++t)
            if (perm[t] >= 0) total += iou(truth[t], pred[perm[t]]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

BinaryMask random_box(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> px(0, w - 8), py(0, h - 8), len(3, 7);
    int x0 = px(rng), y0 = py(rng);
    return box(w, h, x0, y0, x0 + len(rng), y0 + len(rng));
}

}  // namespace

TEST_CASE("iou and dice on half-overlapping boxes") {
    BinaryMask a = box(30, 10, 0, 0, 10, 5);   // 50 px
    BinaryMask b = box(30, 10, 5, 0, 15, 5);   // 50 px, overlap 25
    CHECK(iou(a, b) == doctest::Approx(25.0 / 75.0));
    CHECK(dice(a, b) == doctest::Approx(0.5));
    CHECK(iou(a, a) == doctest::Approx(1.0));
    CHECK(iou(a, BinaryMask(30, 10)) == doctest::Approx(0.0));
}

TEST_CASE("dice equals 2*iou/(1+iou)") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        BinaryMask a = random_box(rng, 40, 40), b = random_box(rng, 40, 40);
        double i = iou(a, b);
        CHECK(dice(a, b) == doctest::Approx(2 * i / (1 + i)).epsilon(1e-12));
    }
}

TEST_CASE("pair_optimal: identity pairing on identical sets") {
    std::vector<BinaryMask> truth{box(20, 20, 0, 0, 5, 5), box(20, 20, 10, 10, 16, 16)};
    auto pairs = pair_optimal(truth, truth);
    REQUIRE(pairs.size() == 2);
    for (auto [t, p] : pairs) CHECK(t == p);
}

TEST_CASE("pair_optimal: spurious prediction left unmatched") {
    std::vector<BinaryMask> truth{box(40, 20, 0, 0, 8, 8), box(40, 20, 20, 0, 28, 8)};
    std::vector<BinaryMask> pred{box(40, 20, 1, 0, 8, 8), box(40, 20, 21, 0, 28, 8),
                                 box(40, 20, 0, 12, 6, 18)};  // overlaps nothing
    auto pairs = pair_optimal(truth, pred);
    REQUIRE(pairs.size() == 2);
    for (auto [t, p] : pairs) {
        CHECK(t == p);  // the matching prediction shares the index here
        CHECK(p != 2);
    }
    PairedScores s = miou_mdice(truth, pred);
    CHECK(s.unmatched_pred == 1);
    CHECK(s.unmatched_truth == 0);
}

TEST_CASE("pair_optimal: zero-overlap pairs are dropped entirely") {
    std::vector<BinaryMask> truth{box(30, 30, 0, 0, 5, 5)};
    std::vector<BinaryMask> pred{box(30, 30, 20, 20, 25, 25)};
    CHECK(pair_optimal(truth, pred).empty());
    CHECK_THROWS_AS(miou_mdice(truth, pred), EmptyPairingError);
}

TEST_CASE("pair_optimal matches the exhaustive oracle") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<int> nt(1, 4), np(1, 4);
        std::vector<BinaryMask> truth, pred;
        for (int i = 0, n = nt(rng); i < n; ++i) truth.push_back(random_box(rng, 32, 32));
        for (int i = 0, n = np(rng); i < n; ++i) pred.push_back(random_box(rng, 32, 32));
        double got = 0;
        for (auto [t, p] : pair_optimal(truth, pred)) got += iou(truth[t], pred[p]);
        CHECK(got == doctest::Approx(best_total_iou(truth, pred)).epsilon(1e-9));
    }
}

TEST_CASE("miou_mdice is invariant to prediction order") {
    std::mt19937 rng(41);
    std::vector<BinaryMask> truth, pred;
    for (int i = 0; i < 4; ++i) truth.push_back(random_box(rng, 48, 48));
    pred = truth;
    pred.push_back(random_box(rng, 48, 48));
    PairedScores base = miou_mdice(truth, pred);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(pred.begin(), pred.end(), rng);
        PairedScores s = miou_mdice(truth, pred);
        CHECK(s.miou == doctest::Approx(base.miou).epsilon(1e-12));
        CHECK(s.mdice == doctest::Approx(base.mdice).epsilon(1e-12));
        CHECK(s.unmatched_pred == base.unmatched_pred);
    }
}

TEST_CASE("miou_mdice aggregates per-pair scores") {
    std::vector<BinaryMask> truth{box(40, 10, 0, 0, 10, 5)};
    std::vector<BinaryMask> pred{box(40, 10, 5, 0, 15, 5)};
    PairedScores s = miou_mdice(truth, pred);
    REQUIRE(s.pairs.size() == 1);
    CHECK(s.miou == doctest::Approx(1.0 / 3.0));
    CHECK(s.mdice == doctest::Approx(0.5));
}

TEST_CASE("max_weight_assignment on a hand-checked matrix") {
    // rows x cols = 2 x 3; best total = 0.9 + 0.8 via off-diagonal picks.
    std::vector<double> w{0.9, 0.1, 0.2,
                          0.85, 0.8, 0.0};
    auto a = detail::max_weight_assignment(w, 2, 3);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == 0);
    CHECK(a[1] == 1);
}

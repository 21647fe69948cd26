#include "speheatal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace speheatal {

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b)) throw DimensionMismatchError("iou: mask sizes differ");
    std::size_t inter = (a & b).area();
    std::size_t uni = (a | b).area();
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b)) throw DimensionMismatchError("dice: mask sizes differ");
    std::size_t inter = (a & b).area();
    std::size_t total = a.area() + b.area();
    return total == 0 ? 0.0 : 2.0 * double(inter) / double(total);
}

namespace detail {

std::vector<int> max_weight_assignment(const std::vector<double>& weights, int rows,
                                       int cols) {
    // Hungarian algorithm (potentials form) on a square matrix padded with
    // zero-weight cells; minimizes cost = -weight.
    const int n = std::max(rows, cols);
    const double INF = std::numeric_limits<double>::infinity();
    auto cost = [&](int r, int c) -> double {
        if (r < rows && c < cols) return -weights[static_cast<size_t>(r) * cols + c];
        return 0.0;
    };
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, INF);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            double delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(rows, -1);
    for (int j = 1; j <= n; ++j) {
        int r = p[j] - 1, c = j - 1;
        if (r < rows && c < cols) match[r] = c;
    }
    return match;
}

}  // namespace detail

std::vector<std::pair<int, int>> pair_optimal(const std::vector<BinaryMask>& truth,
                                              const std::vector<BinaryMask>& pred) {
    const int nt = static_cast<int>(truth.size());
    const int np = static_cast<int>(pred.size());
    for (const auto& t : truth)
        for (const auto& q : pred)
            if (!t.same_size(q))
                throw DimensionMismatchError("pair_optimal: mask sizes differ");
    if (nt == 0 || np == 0) return {};
    std::vector<double> w(static_cast<size_t>(nt) * np);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) w[static_cast<size_t>(i) * np + j] = iou(truth[i], pred[j]);
    std::vector<int> match = detail::max_weight_assignment(w, nt, np);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < nt; ++i) {
        int j = match[i];
        if (j >= 0 && w[static_cast<size_t>(i) * np + j] > 0) pairs.emplace_back(i, j);
    }
    return pairs;
}

PairedScores miou_mdice(const std::vector<BinaryMask>& truth,
                        const std::vector<BinaryMask>& pred) {
    auto pairs = pair_optimal(truth, pred);
    if (pairs.empty()) throw EmptyPairingError("miou_mdice: no overlapping pairs");
    PairedScores out;
    double sum_iou = 0, sum_dice = 0;
    for (auto [i, j] : pairs) {
        double v_iou = iou(truth[i], pred[j]);
        double v_dice = dice(truth[i], pred[j]);
        out.pairs.push_back({i, j, v_iou, v_dice});
        sum_iou += v_iou;
        sum_dice += v_dice;
    }
    out.miou = sum_iou / pairs.size();
    out.mdice = sum_dice / pairs.size();
    out.unmatched_truth = static_cast<int>(truth.size() - pairs.size());
    out.unmatched_pred = static_cast<int>(pred.size() - pairs.size());
    return out;
}

}  // namespace speheatal

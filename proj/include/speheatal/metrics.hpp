#ifndef SPEHEATAL_METRICS_HPP
#define SPEHEATAL_METRICS_HPP

#include <vector>

#include "speheatal/raster.hpp"

namespace speheatal {

struct PairedScores {
    struct Pair {
        int truth_idx;
        int pred_idx;
        double iou;
        double dice;
    };
    std::vector<Pair> pairs;
    double miou = 0;
    double mdice = 0;
    int unmatched_truth = 0;
    int unmatched_pred = 0;
};

double iou(const BinaryMask& a, const BinaryMask& b);
double dice(const BinaryMask& a, const BinaryMask& b);

/// One-to-one truth/prediction pairing maximizing total IoU
/// (Hungarian assignment); zero-IoU pairs are discarded.
std::vector<std::pair<int, int>> pair_optimal(const std::vector<BinaryMask>& truth,
                                              const std::vector<BinaryMask>& pred);

/// mIoU and mDice over the retained optimal pairs, with unmatched counts.
PairedScores miou_mdice(const std::vector<BinaryMask>& truth,
                        const std::vector<BinaryMask>& pred);

namespace detail {
/// Maximum-weight assignment on a rows x cols weight matrix (row-major).
/// Returns per-row column index, -1 when unassigned.
std::vector<int> max_weight_assignment(const std::vector<double>& weights, int rows,
                                       int cols);
}  // namespace detail

}  // namespace speheatal

#endif

#include "speheatal/kmeans.hpp"

#include <limits>
#include <random>

namespace speheatal::detail {

namespace {

std::vector<int> kmeans_once(const Eigen::MatrixXd& rows, int k, unsigned seed,
                             int max_iters) {
    const int n = static_cast<int>(rows.rows());
    std::mt19937 rng(seed);

    // k-means++ seeding.
    Eigen::MatrixXd centers(k, rows.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    {
        std::uniform_int_distribution<int> uni(0, n - 1);
        int first = uni(rng);
        centers.row(0) = rows.row(first);
        for (int c = 1; c < k; ++c) {
            double total = 0;
            for (int i = 0; i < n; ++i) {
                double d = (rows.row(i) - centers.row(c - 1)).squaredNorm();
                if (d < d2[i]) d2[i] = d;
                total += d2[i];
            }
            int pick = 0;
            if (total > 0) {
                std::uniform_real_distribution<double> ur(0.0, total);
                double target = ur(rng), acc = 0;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = uni(rng);
            }
            centers.row(c) = rows.row(pick);
        }
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (rows.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                moved = true;
            }
        }
        if (!moved && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[i]) += rows.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / counts[c];
            } else {
                // Re-seed from the point farthest from its own centroid.
                int far_i = 0;
                double far_d = -1;
                for (int i = 0; i < n; ++i) {
                    double d = (rows.row(i) - centers.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centers.row(c) = rows.row(far_i);
            }
        }
    }
    return labels;
}

double inertia(const Eigen::MatrixXd& rows, const std::vector<int>& labels, int k) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    std::vector<int> counts(k, 0);
    const int n = static_cast<int>(rows.rows());
    for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += rows.row(i);
        ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c)
        if (counts[c] > 0) sums.row(c) /= counts[c];
    double total = 0;
    for (int i = 0; i < n; ++i) total += (rows.row(i) - sums.row(labels[i])).squaredNorm();
    return total;
}

}  // namespace

std::vector<int> kmeans(const Eigen::MatrixXd& rows, int k, unsigned seed, int max_iters) {
    // Multiple deterministic restarts, keep the lowest-inertia solution.
    constexpr int kRestarts = 8;
    std::vector<int> best_labels;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kRestarts; ++r) {
        std::vector<int> labels = kmeans_once(rows, k, seed + 0x9e3779b9u * r, max_iters);
        double obj = inertia(rows, labels, k);
        if (obj < best_inertia) {
            best_inertia = obj;
            best_labels = std::move(labels);
        }
    }
    return best_labels;
}

}  // namespace speheatal::detail

#ifndef SPEHEATAL_KMEANS_HPP
#define SPEHEATAL_KMEANS_HPP

#include <Eigen/Dense>
#include <vector>

namespace speheatal::detail {

/// Lloyd's algorithm with k-means++ seeding. Deterministic under seed.
/// Empty clusters are re-seeded from the point farthest from its centroid.
std::vector<int> kmeans(const Eigen::MatrixXd& rows, int k, unsigned seed,
                        int max_iters = 100);

}  // namespace speheatal::detail

#endif

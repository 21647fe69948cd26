#ifndef SPEHEATAL_CON2DIS_HPP
#define SPEHEATAL_CON2DIS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "speheatal/raster.hpp"

namespace speheatal {

/// Sample points for clustering: skeletonized tail pixels plus the
/// full-width mask they came from. Points are kept in canonical
/// row-major order so results do not depend on insertion order.
struct TailPointSet {
    std::vector<PixelPoint> points;
    BinaryMask source_mask;
    BinaryMask skeleton;

    static TailPointSet from_mask(const BinaryMask& tail_mask);
    static TailPointSet from_points(std::vector<PixelPoint> pts, const BinaryMask& source,
                                    const BinaryMask& skeleton);
};

struct Con2DisConfig {
    int knn_k = 24;
    // Bridges breakpoint gaps: thinning erodes a couple of pixels at cut
    // ends, so the skeleton gap runs a few pixels wider than the mask gap.
    double dbscan_eps = 9.0;
    int dbscan_min_pts = 4;
    int mppca_num_analyzers = 0;  // 0 = auto: max(8, n/60)
    int tangent_dim = 1;
    int conformity_exponent = 8;
    int num_clusters = 0;  // 0 = auto (head count or eigengap)
    int em_max_iters = 100;
    double em_tol = 1e-5;  // relative log-likelihood improvement
    double restore_gamma = 5.0;
    int max_points = 1000;  // subsample cap on skeleton points fed to the eigensolve
    unsigned seed = 1;
};

struct MppcaAnalyzer {
    Eigen::Vector2d mean;
    Eigen::MatrixXd basis;  // 2 x d, orthonormal columns (tangent space)
    double principal_var = 1.0;
    double noise_var = 1.0;
    double weight = 0.0;
};

struct MppcaModel {
    std::vector<MppcaAnalyzer> analyzers;
    Eigen::MatrixXd responsibilities;  // n x M, rows sum to 1
    std::vector<double> loglik_trace;  // one entry per EM iteration
    int reseed_count = 0;
};

/// Symmetric kNN adjacency: p(i,j) = 1 iff i is among j's K nearest or
/// vice versa. Stored as sorted neighbor lists.
struct KnnGraph {
    std::vector<std::vector<int>> neighbors;
    bool adjacent(int i, int j) const;
};

struct AffinityMatrix {
    int n = 0;
    // Upper-triangle entries (i < j) with w > 0.
    struct Entry {
        int i, j;
        double w;
    };
    std::vector<Entry> entries;
    std::vector<double> degree;  // E_ii = sum_j w_ij
};

struct SpectralEmbedding {
    Eigen::MatrixXd rows;          // n x k generalized eigenvectors
    std::vector<double> eigenvalues;  // ascending, size k
};

/// Per-pixel multi-assignment after restoration. restored[c] is the
/// full-width mask of cluster c; a pixel may appear in several.
struct ClusterAssignment {
    std::vector<int> skeleton_labels;       // per point, in [0,k)
    std::vector<BinaryMask> restored;       // k full-width cluster masks
};

struct Con2DisDiagnostics {
    int num_points = 0;
    int num_isolated = 0;
    int num_components = 0;
    std::size_t affinity_nonzeros = 0;
    std::vector<double> eigenvalues;
    std::vector<double> em_loglik_trace;
    int em_reseeds = 0;
    int chosen_k = 0;
};

struct Con2DisResult {
    std::vector<BinaryMask> cluster_masks;  // one per tail cluster, may overlap
    ClusterAssignment assignment;
    TailPointSet points;
    Con2DisDiagnostics diagnostics;
};

KnnGraph knn_adjacency(const TailPointSet& pts, const Con2DisConfig& cfg);

/// DBSCAN-filtered connected components: gaps up to eps are bridged,
/// noise points inherit the nearest core point's component.
std::vector<int> filtered_components(const TailPointSet& pts, const Con2DisConfig& cfg);

MppcaModel fit_mppca(const TailPointSet& pts, const Con2DisConfig& cfg);

/// Tangent basis of the analyzer most responsible for point i
/// (ties break to the lower analyzer index).
Eigen::MatrixXd tangent_at(const MppcaModel& model, int i);

/// Principal angles between equal-dimension orthonormal bases, ascending
/// in [0, pi/2]; cosines are the singular values of Bi^T Bj.
std::vector<double> principal_angles(const Eigen::MatrixXd& basis_i,
                                     const Eigen::MatrixXd& basis_j);

double conformity(const Eigen::MatrixXd& basis_i, const Eigen::MatrixXd& basis_j,
                  int exponent);

AffinityMatrix build_affinity(const TailPointSet& pts, const Con2DisConfig& cfg,
                              MppcaModel* model_out = nullptr,
                              std::vector<int>* components_out = nullptr);

/// Solve (E - W) u = lambda E u for the k smallest eigenvalues via the
/// symmetric normalized reduction. Requires every degree > 0.
SpectralEmbedding spectral_embed(const AffinityMatrix& affinity, int k);

/// Seeded k-means over embedding rows.
std::vector<int> cluster_rows(const Eigen::MatrixXd& rows, int k, unsigned seed);

/// Assign every source-mask pixel to each cluster owning a skeleton point
/// within restore_gamma of it; overlap pixels get multiple labels.
ClusterAssignment restore(const std::vector<int>& skeleton_labels, const TailPointSet& pts,
                          const Con2DisConfig& cfg);

/// Full pipeline: skeletonize, build the affinity, spectral embedding,
/// k-means readout, and full-width restoration.
Con2DisResult con2dis(const BinaryMask& tail_image, const Con2DisConfig& cfg);

}  // namespace speheatal

#endif

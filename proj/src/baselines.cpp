#include "speheatal/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "speheatal/kmeans.hpp"

namespace speheatal {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<PixelPoint>& pts) {
    Eigen::MatrixXd x(pts.size(), 2);
    for (size_t i = 0; i < pts.size(); ++i) x.row(i) << pts[i].x, pts[i].y;
    return x;
}

}  // namespace

std::vector<int> kmeans_pixels(const std::vector<PixelPoint>& pts, int k, unsigned seed) {
    if (k < 1 || k > static_cast<int>(pts.size()))
        throw InvalidKError("kmeans_pixels: k out of range");
    return detail::kmeans(to_matrix(pts), k, seed);
}

std::vector<int> ahc(const std::vector<PixelPoint>& pts, int k, Linkage linkage) {
    const int n = static_cast<int>(pts.size());
    if (k < 1 || k > n) throw InvalidKError("ahc: k out of range");

    // O(n^2) Lance-Williams merging over an explicit distance matrix.
    std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
    auto d = [&](int i, int j) -> double& { return dist[static_cast<size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            d(i, j) = d(j, i) = std::sqrt(dx * dx + dy * dy);
        }
    std::vector<bool> alive(n, true);
    std::vector<int> size(n, 1);
    std::vector<int> member(n);
    std::iota(member.begin(), member.end(), 0);

    for (int clusters = n; clusters > k; --clusters) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!alive[j]) continue;
                if (d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        // Merge bj into bi.
        for (int m = 0; m < n; ++m) {
            if (!alive[m] || m == bi || m == bj) continue;
            double dn = linkage == Linkage::Single
                            ? std::min(d(bi, m), d(bj, m))
                            : (size[bi] * d(bi, m) + size[bj] * d(bj, m)) /
                                  (size[bi] + size[bj]);
            d(bi, m) = d(m, bi) = dn;
        }
        size[bi] += size[bj];
        alive[bj] = false;
        for (int m = 0; m < n; ++m)
            if (member[m] == bj) member[m] = bi;
    }

    // Renumber to [0, k) in first-occurrence order.
    std::vector<int> remap(n, -1);
    int next = 0;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        if (remap[member[i]] < 0) remap[member[i]] = next++;
        labels[i] = remap[member[i]];
    }
    return labels;
}

std::vector<int> spectral_distance_only(const std::vector<PixelPoint>& pts, int k,
                                        double sigma, const Con2DisConfig& cfg) {
    const int n = static_cast<int>(pts.size());
    if (k < 1 || k > n) throw InvalidKError("spectral_distance_only: k out of range");

    BinaryMask dummy;
    TailPointSet set = TailPointSet::from_points(pts, dummy, dummy);
    KnnGraph knn = knn_adjacency(set, cfg);
    const int m = static_cast<int>(set.points.size());
    if (k > m) throw InvalidKError("spectral_distance_only: k exceeds distinct points");

    // Points were canonicalized (sorted, deduplicated); map each caller
    // point to its canonical slot by value.
    auto canon = [&](PixelPoint p) {
        auto it = std::lower_bound(set.points.begin(), set.points.end(), p,
                                   [](PixelPoint a, PixelPoint b) {
                                       return std::tie(a.y, a.x) < std::tie(b.y, b.x);
                                   });
        return static_cast<int>(it - set.points.begin());
    };

    if (sigma <= 0) {
        std::vector<double> ds;
        for (int i = 0; i < m; ++i)
            for (int j : knn.neighbors[i]) {
                if (j <= i) continue;
                double dx = set.points[i].x - set.points[j].x;
                double dy = set.points[i].y - set.points[j].y;
                ds.push_back(std::sqrt(dx * dx + dy * dy));
            }
        std::nth_element(ds.begin(), ds.begin() + ds.size() / 2, ds.end());
        sigma = std::max(ds[ds.size() / 2], 1e-6);
    }

    AffinityMatrix aff;
    aff.n = m;
    aff.degree.assign(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j : knn.neighbors[i]) {
            if (j <= i) continue;
            double dx = set.points[i].x - set.points[j].x;
            double dy = set.points[i].y - set.points[j].y;
            double w = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            aff.entries.push_back({i, j, w});
            aff.degree[i] += w;
            aff.degree[j] += w;
        }
    SpectralEmbedding embed = spectral_embed(aff, k);
    std::vector<int> canonical_labels = cluster_rows(embed.rows, k, cfg.seed);

    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = canonical_labels[canon(pts[i])];
    return labels;
}

}  // namespace speheatal

#include "speheatal/con2dis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "speheatal/kmeans.hpp"

namespace speheatal {

namespace {

inline double sqdist(const PixelPoint& a, const PixelPoint& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Uniform bucket grid over point coordinates for radius queries.
class PointGrid {
public:
    PointGrid(const std::vector<PixelPoint>& pts, double cell)
        : pts_(pts), cell_(std::max(cell, 1.0)) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells_[key(pts[i].x, pts[i].y)].push_back(i);
    }

    // Indices within radius of p, self included if present, ascending order.
    std::vector<int> within(const PixelPoint& p, double radius) const {
        std::vector<int> out;
        double r2 = radius * radius;
        int span = static_cast<int>(std::ceil(radius / cell_));
        int cx = static_cast<int>(std::floor(p.x / cell_));
        int cy = static_cast<int>(std::floor(p.y / cell_));
        for (int gy = cy - span; gy <= cy + span; ++gy)
            for (int gx = cx - span; gx <= cx + span; ++gx) {
                auto it = cells_.find((std::int64_t(gy) << 32) ^ std::uint32_t(gx));
                if (it == cells_.end()) continue;
                for (int i : it->second)
                    if (sqdist(pts_[i], p) <= r2) out.push_back(i);
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::int64_t key(int x, int y) const {
        int gx = static_cast<int>(std::floor(x / cell_));
        int gy = static_cast<int>(std::floor(y / cell_));
        return (std::int64_t(gy) << 32) ^ std::uint32_t(gx);
    }
    const std::vector<PixelPoint>& pts_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace

TailPointSet TailPointSet::from_mask(const BinaryMask& tail_mask) {
    TailPointSet out;
    out.source_mask = tail_mask;
    out.skeleton = thin_to_skeleton(tail_mask);
    out.points = out.skeleton.foreground_points();
    return out;
}

TailPointSet TailPointSet::from_points(std::vector<PixelPoint> pts, const BinaryMask& source,
                                       const BinaryMask& skeleton) {
    std::sort(pts.begin(), pts.end(), [](const PixelPoint& a, const PixelPoint& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return {std::move(pts), source, skeleton};
}

bool KnnGraph::adjacent(int i, int j) const {
    const auto& ni = neighbors[i];
    return std::binary_search(ni.begin(), ni.end(), j);
}

KnnGraph knn_adjacency(const TailPointSet& pts, const Con2DisConfig& cfg) {
    const int n = static_cast<int>(pts.points.size());
    if (n < 2) throw TooFewPointsError("knn_adjacency: need at least 2 points");
    const int k = std::min(cfg.knn_k, n - 1);

    KnnGraph g;
    g.neighbors.assign(n, {});
    std::vector<std::pair<double, int>> dist(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) dist[j] = {sqdist(pts.points[i], pts.points[j]), j};
        dist[i].first = std::numeric_limits<double>::infinity();  // no self edge
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        for (int m = 0; m < k; ++m) {
            int j = dist[m].second;
            g.neighbors[i].push_back(j);
            g.neighbors[j].push_back(i);  // symmetrize (OR rule)
        }
    }
    for (auto& ns : g.neighbors) {
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    }
    return g;
}

std::vector<int> filtered_components(const TailPointSet& pts, const Con2DisConfig& cfg) {
    const int n = static_cast<int>(pts.points.size());
    std::vector<int> comp(n, -1);
    if (n == 0) return comp;

    PointGrid grid(pts.points, cfg.dbscan_eps);
    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i)
        core[i] = static_cast<int>(grid.within(pts.points[i], cfg.dbscan_eps).size()) >=
                  cfg.dbscan_min_pts;

    int next = 0;
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        if (!core[i] || comp[i] >= 0) continue;
        int id = next++;
        comp[i] = id;
        stack.push_back(i);
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            for (int q : grid.within(pts.points[p], cfg.dbscan_eps)) {
                if (comp[q] >= 0) continue;
                comp[q] = id;
                if (core[q]) stack.push_back(q);
            }
        }
    }

    if (next == 0) {
        // No core points at all (tiny sets): fall back to eps-linkage components.
        for (int i = 0; i < n; ++i) {
            if (comp[i] >= 0) continue;
            int id = next++;
            comp[i] = id;
            stack.push_back(i);
            while (!stack.empty()) {
                int p = stack.back();
                stack.pop_back();
                for (int q : grid.within(pts.points[p], cfg.dbscan_eps)) {
                    if (comp[q] < 0) {
                        comp[q] = id;
                        stack.push_back(q);
                    }
                }
            }
        }
        return comp;
    }

    // Noise points inherit the nearest core point's component.
    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (int j = 0; j < n; ++j) {
            if (!core[j]) continue;
            double d = sqdist(pts.points[i], pts.points[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        comp[i] = comp[best_j];
    }
    return comp;
}

namespace {

constexpr double kVarFloor = 1e-6;

struct GaussianEval {
    // Log density of the PPCA covariance C = U diag(l1..) U^T + s2 (I - UU^T)
    // evaluated via its eigenstructure; 2-D data, d = 1.
    static double log_pdf(const Eigen::Vector2d& x, const MppcaAnalyzer& a) {
        Eigen::Vector2d diff = x - a.mean;
        double along = a.basis.col(0).dot(diff);
        double perp2 = diff.squaredNorm() - along * along;
        double l1 = a.principal_var, s2 = a.noise_var;
        double quad = along * along / l1 + perp2 / s2;
        double logdet = std::log(l1) + std::log(s2);
        return -0.5 * (2 * std::log(2 * M_PI) + logdet + quad);
    }
};

void analyzer_from_stats(MppcaAnalyzer& a, const Eigen::Vector2d& mean,
                         Eigen::Matrix2d cov) {
    cov(0, 0) += kVarFloor;
    cov(1, 1) += kVarFloor;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    // Eigen returns ascending eigenvalues.
    double l_minor = std::max(es.eigenvalues()(0), kVarFloor);
    double l_major = std::max(es.eigenvalues()(1), l_minor);
    a.mean = mean;
    a.basis.resize(2, 1);
    a.basis.col(0) = es.eigenvectors().col(1);
    if (a.basis(0, 0) < 0 || (a.basis(0, 0) == 0 && a.basis(1, 0) < 0))
        a.basis.col(0) = -a.basis.col(0);  // canonical sign
    a.principal_var = l_major;
    a.noise_var = l_minor;
}

}  // namespace

MppcaModel fit_mppca(const TailPointSet& pts, const Con2DisConfig& cfg) {
    const int n = static_cast<int>(pts.points.size());
    const int d = 1;  // 1-D tangents in a 2-D raster
    int M = cfg.mppca_num_analyzers > 0 ? cfg.mppca_num_analyzers
                                        : std::max(8, n / 30);
    M = std::min(M, n / (d + 1));
    if (M < 1) throw TooFewPointsError("fit_mppca: need at least 2 points");

    Eigen::MatrixXd X(n, 2);
    for (int i = 0; i < n; ++i) X.row(i) << pts.points[i].x, pts.points[i].y;

    // Initialize analyzers from a coordinate k-means partition.
    std::vector<int> init = detail::kmeans(X, M, cfg.seed, 10);
    MppcaModel model;
    model.analyzers.resize(M);
    for (int m = 0; m < M; ++m) {
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        int cnt = 0;
        for (int i = 0; i < n; ++i)
            if (init[i] == m) {
                mean += X.row(i).transpose();
                ++cnt;
            }
        if (cnt == 0) {
            mean = X.row(m % n).transpose();
            cnt = 1;
        } else {
            mean /= cnt;
        }
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (int i = 0; i < n; ++i)
            if (init[i] == m) {
                Eigen::Vector2d diff = X.row(i).transpose() - mean;
                cov += diff * diff.transpose();
            }
        cov /= cnt;
        analyzer_from_stats(model.analyzers[m], mean, cov);
        model.analyzers[m].weight = 1.0 / M;
    }

    model.responsibilities.resize(n, M);
    Eigen::VectorXd logw(M);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < cfg.em_max_iters; ++iter) {
        // E-step with the current parameters; also yields the log-likelihood.
        for (int m = 0; m < M; ++m)
            logw(m) = std::log(std::max(model.analyzers[m].weight, 1e-300));
        double ll = 0;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd lp(M);
            Eigen::Vector2d x = X.row(i).transpose();
            for (int m = 0; m < M; ++m)
                lp(m) = logw(m) + GaussianEval::log_pdf(x, model.analyzers[m]);
            double mx = lp.maxCoeff();
            double sum = (lp.array() - mx).exp().sum();
            ll += mx + std::log(sum);
            model.responsibilities.row(i) = ((lp.array() - mx).exp() / sum).transpose();
        }
        model.loglik_trace.push_back(ll);

        if (iter > 0 && ll - prev_ll < cfg.em_tol * std::abs(prev_ll)) break;
        prev_ll = ll;

        // Exact M-step: per analyzer, responsibility-weighted moments and
        // the eigendecomposition of the local covariance.
        for (int m = 0; m < M; ++m) {
            double nm = model.responsibilities.col(m).sum();
            if (nm < 1e-8 * n) {
                // Starved analyzer: re-seed at the worst-covered point.
                int worst = 0;
                double worst_r = 2.0;
                for (int i = 0; i < n; ++i) {
                    double r = model.responsibilities.row(i).maxCoeff();
                    if (r < worst_r) {
                        worst_r = r;
                        worst = i;
                    }
                }
                Eigen::Vector2d mean = X.row(worst).transpose();
                analyzer_from_stats(model.analyzers[m], mean, Eigen::Matrix2d::Identity());
                model.analyzers[m].weight = 1.0 / n;
                ++model.reseed_count;
                continue;
            }
            Eigen::Vector2d mean =
                (model.responsibilities.col(m).transpose() * X).transpose() / nm;
            Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
            for (int i = 0; i < n; ++i) {
                Eigen::Vector2d diff = X.row(i).transpose() - mean;
                cov += model.responsibilities(i, m) * (diff * diff.transpose());
            }
            cov /= nm;
            analyzer_from_stats(model.analyzers[m], mean, cov);
            model.analyzers[m].weight = nm / n;
        }
    }
    return model;
}

Eigen::MatrixXd tangent_at(const MppcaModel& model, int i) {
    int best = 0;
    double best_r = model.responsibilities(i, 0);
    for (int m = 1; m < model.responsibilities.cols(); ++m)
        if (model.responsibilities(i, m) > best_r) {
            best_r = model.responsibilities(i, m);
            best = m;
        }
    return model.analyzers[best].basis;
}

std::vector<double> principal_angles(const Eigen::MatrixXd& basis_i,
                                     const Eigen::MatrixXd& basis_j) {
    if (basis_i.cols() != basis_j.cols() || basis_i.rows() != basis_j.rows())
        throw BasisError("principal_angles: dimension mismatch");
    auto check_orthonormal = [](const Eigen::MatrixXd& b) {
        Eigen::MatrixXd g = b.transpose() * b;
        if ((g - Eigen::MatrixXd::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() > 1e-6)
            throw BasisError("principal_angles: basis not orthonormal");
    };
    check_orthonormal(basis_i);
    check_orthonormal(basis_j);
    Eigen::MatrixXd prod = basis_i.transpose() * basis_j;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
    std::vector<double> angles;
    for (int l = 0; l < prod.cols(); ++l) {
        double c = std::clamp(svd.singularValues()(l), 0.0, 1.0);
        angles.push_back(std::acos(c));
    }
    // Singular values come descending, so angles are already ascending.
    return angles;
}

double conformity(const Eigen::MatrixXd& basis_i, const Eigen::MatrixXd& basis_j,
                  int exponent) {
    double prod = 1.0;
    for (double th : principal_angles(basis_i, basis_j)) prod *= std::cos(th);
    return std::pow(std::max(prod, 0.0), exponent);
}

AffinityMatrix build_affinity(const TailPointSet& pts, const Con2DisConfig& cfg,
                              MppcaModel* model_out, std::vector<int>* components_out) {
    const int n = static_cast<int>(pts.points.size());
    KnnGraph knn = knn_adjacency(pts, cfg);
    std::vector<int> comp = filtered_components(pts, cfg);
    MppcaModel model = fit_mppca(pts, cfg);

    // Conformity only depends on the winning analyzer pair; cache it.
    const int M = static_cast<int>(model.analyzers.size());
    std::vector<int> owner(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int m = 1; m < M; ++m)
            if (model.responsibilities(i, m) > model.responsibilities(i, best)) best = m;
        owner[i] = best;
    }
    Eigen::MatrixXd q_cache = Eigen::MatrixXd::Constant(M, M, -1.0);

    AffinityMatrix aff;
    aff.n = n;
    aff.degree.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j : knn.neighbors[i]) {
            if (j <= i) continue;
            if (comp[i] != comp[j]) continue;  // r_ij = 0 blocks the edge
            double& q = q_cache(owner[i], owner[j]);
            if (q < 0)
                q = conformity(model.analyzers[owner[i]].basis,
                               model.analyzers[owner[j]].basis, cfg.conformity_exponent);
            if (q <= 0) continue;
            aff.entries.push_back({i, j, q});
            aff.degree[i] += q;
            aff.degree[j] += q;
        }

    if (model_out) *model_out = std::move(model);
    if (components_out) *components_out = std::move(comp);
    return aff;
}

SpectralEmbedding spectral_embed(const AffinityMatrix& affinity, int k) {
    const int n = affinity.n;
    if (k > n || k < 1) throw InvalidKError("spectral_embed: k out of range");
    bool any = false;
    for (double d : affinity.degree) {
        if (d > 0) any = true;
        if (d <= 0)
            throw DegenerateAffinityError(
                "spectral_embed: isolated point (zero degree)");
    }
    if (!any) throw DegenerateAffinityError("spectral_embed: all-zero affinity");

    // Symmetric reduction: A = I - D^{-1/2} W D^{-1/2}, then u = D^{-1/2} v.
    Eigen::VectorXd dinv_sqrt(n);
    for (int i = 0; i < n; ++i) dinv_sqrt(i) = 1.0 / std::sqrt(affinity.degree[i]);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (const auto& e : affinity.entries) {
        double v = e.w * dinv_sqrt(e.i) * dinv_sqrt(e.j);
        a(e.i, e.j) -= v;
        a(e.j, e.i) -= v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    SpectralEmbedding out;
    out.rows.resize(n, k);
    for (int c = 0; c < k; ++c) {
        out.eigenvalues.push_back(es.eigenvalues()(c));
        Eigen::VectorXd u = dinv_sqrt.asDiagonal() * es.eigenvectors().col(c);
        out.rows.col(c) = u / u.norm();
    }
    return out;
}

std::vector<int> cluster_rows(const Eigen::MatrixXd& rows, int k, unsigned seed) {
    if (k < 1 || k > rows.rows()) throw InvalidKError("cluster_rows: k out of range");
    return detail::kmeans(rows, k, seed);
}

ClusterAssignment restore(const std::vector<int>& skeleton_labels, const TailPointSet& pts,
                          const Con2DisConfig& cfg) {
    int k = 0;
    for (int l : skeleton_labels) k = std::max(k, l + 1);
    ClusterAssignment out;
    out.skeleton_labels = skeleton_labels;
    out.restored.assign(k, BinaryMask(pts.source_mask.width(), pts.source_mask.height()));

    PointGrid grid(pts.points, cfg.restore_gamma);
    const double g2 = cfg.restore_gamma * cfg.restore_gamma;
    for (int y = 0; y < pts.source_mask.height(); ++y)
        for (int x = 0; x < pts.source_mask.width(); ++x) {
            if (!pts.source_mask.at(x, y)) continue;
            for (int j : grid.within({x, y}, cfg.restore_gamma)) {
                if (sqdist({x, y}, pts.points[j]) < g2)  // strictly inside gamma
                    out.restored[skeleton_labels[j]].set(x, y, true);
            }
        }
    return out;
}

namespace {

int eigengap_k(const std::vector<double>& eigenvalues) {
    // Largest gap among the leading eigenvalues picks the cluster count.
    int k = 1;
    double best_gap = -1;
    for (size_t i = 0; i + 1 < eigenvalues.size(); ++i) {
        double gap = eigenvalues[i + 1] - eigenvalues[i];
        if (gap > best_gap) {
            best_gap = gap;
            k = static_cast<int>(i) + 1;
        }
    }
    return k;
}

}  // namespace

Con2DisResult con2dis(const BinaryMask& tail_image, const Con2DisConfig& cfg) {
    Con2DisResult res;
    res.points = TailPointSet::from_mask(tail_image);
    int n = static_cast<int>(res.points.points.size());
    if (n < 2) throw TooFewPointsError("con2dis: too few skeleton points");

    // Cap the eigensolve size; an even stride keeps coverage within gamma.
    if (cfg.max_points > 0 && n > cfg.max_points) {
        std::vector<PixelPoint> sampled;
        double stride = double(n) / cfg.max_points;
        for (int i = 0; i < cfg.max_points; ++i)
            sampled.push_back(res.points.points[static_cast<int>(i * stride)]);
        res.points = TailPointSet::from_points(std::move(sampled), res.points.source_mask,
                                               res.points.skeleton);
        n = static_cast<int>(res.points.points.size());
    }

    MppcaModel model;
    std::vector<int> comp;
    AffinityMatrix aff = build_affinity(res.points, cfg, &model, &comp);

    // Drop zero-degree points before the eigensolve; they get labels back
    // from their nearest labeled neighbor afterwards.
    std::vector<int> keep, orig_of;
    for (int i = 0; i < n; ++i)
        if (aff.degree[i] > 0) {
            keep.push_back(i);
            orig_of.push_back(i);
        }
    if (keep.empty()) throw DegenerateAffinityError("con2dis: affinity is all zero");
    AffinityMatrix reduced;
    if (static_cast<int>(keep.size()) == n) {
        reduced = std::move(aff);
    } else {
        std::vector<int> remap(n, -1);
        for (int r = 0; r < static_cast<int>(keep.size()); ++r) remap[keep[r]] = r;
        reduced.n = static_cast<int>(keep.size());
        reduced.degree.assign(reduced.n, 0.0);
        for (const auto& e : aff.entries) {
            reduced.entries.push_back({remap[e.i], remap[e.j], e.w});
            reduced.degree[remap[e.i]] += e.w;
            reduced.degree[remap[e.j]] += e.w;
        }
    }

    int k = cfg.num_clusters;
    SpectralEmbedding embed;
    if (k <= 0) {
        int kmax = std::min(10, reduced.n);
        embed = spectral_embed(reduced, kmax);
        k = eigengap_k(embed.eigenvalues);
        embed.rows = embed.rows.leftCols(k).eval();
        embed.eigenvalues.resize(k);
    } else {
        embed = spectral_embed(reduced, k);
    }

    std::vector<int> reduced_labels = cluster_rows(embed.rows, k, cfg.seed);

    std::vector<int> labels(n, -1);
    for (size_t r = 0; r < keep.size(); ++r) labels[keep[r]] = reduced_labels[r];
    for (int i = 0; i < n; ++i) {
        if (labels[i] >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (int j : keep) {
            double d = sqdist(res.points.points[i], res.points.points[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        labels[i] = labels[best_j];
    }

    res.assignment = restore(labels, res.points, cfg);
    res.cluster_masks = res.assignment.restored;

    res.diagnostics.num_points = n;
    res.diagnostics.num_isolated = n - static_cast<int>(keep.size());
    res.diagnostics.num_components =
        comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    res.diagnostics.affinity_nonzeros = reduced.entries.size();
    res.diagnostics.eigenvalues = embed.eigenvalues;
    res.diagnostics.em_loglik_trace = model.loglik_trace;
    res.diagnostics.em_reseeds = model.reseed_count;
    res.diagnostics.chosen_k = k;
    return res;
}

}  // namespace speheatal

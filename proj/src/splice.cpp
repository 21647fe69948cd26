#include "speheatal/splice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace speheatal {

namespace {

int skeleton_degree(const BinaryMask& s, int x, int y) {
    int deg = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (s.at_or(x + dx, y + dy)) ++deg;
        }
    return deg;
}

double normalize_angle_deg(double a) {
    a = std::fmod(a, 180.0);
    if (a < 0) a += 180.0;
    return a;
}

// Total-least-squares orientation of a short pixel run, degrees in [0,180).
double fit_angle(const std::vector<PixelPoint>& run) {
    if (run.size() < 2) return 0.0;
    double mx = 0, my = 0;
    for (const auto& p : run) {
        mx += p.x;
        my += p.y;
    }
    mx /= run.size();
    my /= run.size();
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& p : run) {
        double dx = p.x - mx, dy = p.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
    return normalize_angle_deg(theta * 180.0 / M_PI);
}

// Walk along the skeleton from a tip, collecting up to n pixels. Thinned
// skeletons contain staircase corners where a pixel sees two unvisited
// neighbors; the walk picks the straightest continuation (largest dot
// product with the recent direction) and stops only at dead ends.
std::vector<PixelPoint> tip_run(const BinaryMask& s, PixelPoint tip, int n) {
    std::vector<PixelPoint> run{tip};
    PixelPoint cur = tip;
    while (static_cast<int>(run.size()) < n) {
        PixelPoint best{-1, -1};
        double best_score = -2;
        // Recent direction: chord from a few pixels back to the current one.
        const PixelPoint& back = run[run.size() > 4 ? run.size() - 5 : 0];
        double dirx = cur.x - back.x, diry = cur.y - back.y;
        double dn = std::hypot(dirx, diry);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                PixelPoint q{cur.x + dx, cur.y + dy};
                if (!s.at_or(q.x, q.y)) continue;
                if (std::find(run.begin(), run.end(), q) != run.end()) continue;
                double score;
                if (dn < 1e-9) {
                    score = 0;  // first step: any neighbor
                } else {
                    double sn = std::hypot(double(dx), double(dy));
                    score = (dx * dirx + dy * diry) / (sn * dn);
                }
                if (score > best_score) {
                    best_score = score;
                    best = q;
                }
            }
        if (best.x < 0) break;  // dead end
        run.push_back(best);
        cur = best;
    }
    return run;
}

}  // namespace

std::vector<Endpoint> extract_endpoints(const std::vector<Ellipse>& heads,
                                        const std::vector<BinaryMask>& skeletons,
                                        const SpliceThresholds& th) {
    std::vector<Endpoint> out;
    for (int h = 0; h < static_cast<int>(heads.size()); ++h) {
        const Ellipse& e = heads[h];
        if (e.major_semiaxis <= 0) continue;  // degenerate head, no axis tips
        double c = std::cos(e.orientation), s = std::sin(e.orientation);
        double angle = normalize_angle_deg(e.orientation * 180.0 / M_PI);
        out.push_back({e.cx + e.major_semiaxis * c, e.cy + e.major_semiaxis * s, angle,
                       {EndpointOwner::Kind::HeadAxis, h, 0}});
        out.push_back({e.cx - e.major_semiaxis * c, e.cy - e.major_semiaxis * s, angle,
                       {EndpointOwner::Kind::HeadAxis, h, 1}});
    }
    for (int t = 0; t < static_cast<int>(skeletons.size()); ++t) {
        const BinaryMask& s = skeletons[t];
        int end = 0;
        for (const auto& p : s.foreground_points()) {
            if (skeleton_degree(s, p.x, p.y) != 1) continue;
            auto run = tip_run(s, p, th.n_slope);
            out.push_back({double(p.x), double(p.y), fit_angle(run),
                           {EndpointOwner::Kind::TailSkeleton, t, end++}});
        }
        // Closed loops have no degree-1 pixel and contribute nothing.
    }
    return out;
}

double angular_similarity(const Endpoint& a, const Endpoint& b) {
    if (a.owner.kind == b.owner.kind && a.owner.id == b.owner.id)
        throw SameOwnerError("angular_similarity: endpoints share an owner");
    double d = std::abs(a.terminal_angle - b.terminal_angle);
    return std::min(d, 180.0 - d);
}

std::vector<MatchedPair> match_endpoints(const std::vector<Endpoint>& endpoints,
                                         const SpliceThresholds& th) {
    struct Cand {
        int a, b;
        double dist, ang;
    };
    std::vector<Cand> cands;
    const int n = static_cast<int>(endpoints.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Endpoint &a = endpoints[i], &b = endpoints[j];
            if (a.owner.kind == b.owner.kind && a.owner.id == b.owner.id) continue;
            double dist = std::hypot(a.x - b.x, a.y - b.y);
            if (dist >= th.lambda1) continue;
            double ang = angular_similarity(a, b);
            if (ang >= th.lambda2) continue;
            cands.push_back({i, j, dist, ang});
        }
    // Preference order: closest angle first, then distance, then owner order.
    std::sort(cands.begin(), cands.end(), [&](const Cand& l, const Cand& r) {
        if (l.ang != r.ang) return l.ang < r.ang;
        if (l.dist != r.dist) return l.dist < r.dist;
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
    std::vector<bool> used(n, false);
    std::vector<MatchedPair> out;
    for (const auto& c : cands) {
        if (used[c.a] || used[c.b]) continue;
        used[c.a] = used[c.b] = true;
        out.push_back({c.a, c.b, c.dist, c.ang});
    }
    return out;
}

std::vector<PixelPoint> bresenham_line(PixelPoint a, PixelPoint b) {
    std::vector<PixelPoint> out;
    int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
    int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    PixelPoint p = a;
    while (true) {
        out.push_back(p);
        if (p == b) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<SpermInstance> assemble(const std::vector<BinaryMask>& heads,
                                    const std::vector<BinaryMask>& tail_masks,
                                    const std::vector<BinaryMask>& skeletons,
                                    const std::vector<Endpoint>& endpoints,
                                    const std::vector<MatchedPair>& matches) {
    const int nh = static_cast<int>(heads.size());
    const int nt = static_cast<int>(tail_masks.size());
    // Owner units: heads [0, nh), tails [nh, nh+nt).
    auto unit_of = [&](const EndpointOwner& o) {
        return o.kind == EndpointOwner::Kind::HeadAxis ? o.id : nh + o.id;
    };
    UnionFind uf(nh + nt);
    std::vector<bool> has_head(nh + nt, false);
    for (int h = 0; h < nh; ++h) has_head[h] = true;

    // Accept matches best (smallest angle gap) first; a match that would put
    // two heads into one group splits there, i.e. is dropped.
    std::vector<const MatchedPair*> order;
    for (const auto& m : matches) order.push_back(&m);
    std::sort(order.begin(), order.end(), [](const MatchedPair* l, const MatchedPair* r) {
        if (l->angle_diff != r->angle_diff) return l->angle_diff < r->angle_diff;
        return l->distance < r->distance;
    });
    std::vector<const MatchedPair*> accepted;
    for (const MatchedPair* m : order) {
        int ra = uf.find(unit_of(endpoints[m->a].owner));
        int rb = uf.find(unit_of(endpoints[m->b].owner));
        if (ra == rb) {
            accepted.push_back(m);
            continue;
        }
        if (has_head[ra] && has_head[rb]) continue;
        uf.unite(ra, rb);
        has_head[uf.find(ra)] = has_head[ra] || has_head[rb];
        accepted.push_back(m);
    }

    int w = 0, h = 0;
    if (nh > 0) {
        w = heads[0].width();
        h = heads[0].height();
    } else if (nt > 0) {
        w = tail_masks[0].width();
        h = tail_masks[0].height();
    }

    std::vector<SpermInstance> out;
    std::vector<int> inst_of_root(nh + nt, -1);
    for (int u = 0; u < nh + nt; ++u) {
        int r = uf.find(u);
        if (inst_of_root[r] < 0) {
            inst_of_root[r] = static_cast<int>(out.size());
            out.push_back({std::nullopt, {}, BinaryMask(w, h), {}});
        }
        SpermInstance& inst = out[inst_of_root[r]];
        if (u < nh) {
            inst.head_idx = u;
            inst.full_mask = inst.full_mask | heads[u];
        } else {
            int t = u - nh;
            inst.tail_clusters.push_back(t);
            inst.full_mask = inst.full_mask | tail_masks[t];
            for (const auto& p : skeletons[t].foreground_points())
                inst.skeleton_polyline.push_back(p);
        }
    }

    for (const MatchedPair* m : accepted) {
        int r = uf.find(unit_of(endpoints[m->a].owner));
        SpermInstance& inst = out[inst_of_root[r]];
        PixelPoint pa{static_cast<int>(std::lround(endpoints[m->a].x)),
                      static_cast<int>(std::lround(endpoints[m->a].y))};
        PixelPoint pb{static_cast<int>(std::lround(endpoints[m->b].x)),
                      static_cast<int>(std::lround(endpoints[m->b].y))};
        for (const auto& p : bresenham_line(pa, pb)) {
            if (inst.full_mask.in_bounds(p.x, p.y)) {
                inst.full_mask.set(p.x, p.y, true);
                inst.skeleton_polyline.push_back(p);
            }
        }
    }
    return out;
}

}  // namespace speheatal

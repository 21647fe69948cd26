#include "speheatal/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace speheatal {

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height),
      pixels_(static_cast<size_t>(width) * height, fill) {}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height),
      bits_(static_cast<size_t>(width) * height, fill ? 1 : 0) {}

std::size_t BinaryMask::area() const {
    return static_cast<std::size_t>(
        std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<PixelPoint> BinaryMask::foreground_points() const {
    std::vector<PixelPoint> pts;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (at(x, y)) pts.push_back({x, y});
    return pts;
}

BinaryMask BinaryMask::operator&(const BinaryMask& o) const {
    BinaryMask out(width_, height_);
    for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & o.bits_[i];
    return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& o) const {
    BinaryMask out(width_, height_);
    for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | o.bits_[i];
    return out;
}

BinaryMask BinaryMask::minus(const BinaryMask& o) const {
    BinaryMask out(width_, height_);
    for (size_t i = 0; i < bits_.size(); ++i)
        out.bits_[i] = bits_[i] & static_cast<std::uint8_t>(!o.bits_[i]);
    return out;
}

BinaryMask BinaryMask::dilate(int radius) const {
    BinaryMask out(width_, height_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
            if (!at(x, y)) continue;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    if (in_bounds(x + dx, y + dy)) out.set(x + dx, y + dy, true);
        }
    return out;
}

ComponentLabels label_components(const BinaryMask& mask, int connectivity) {
    const int w = mask.width(), h = mask.height();
    ComponentLabels out;
    out.labels.assign(static_cast<size_t>(w) * h, -1);
    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int nn = (connectivity == 4) ? 4 : 8;
    int next = 0;
    std::vector<PixelPoint> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || out.labels[static_cast<size_t>(y) * w + x] >= 0) continue;
            const int id = next++;
            stack.push_back({x, y});
            out.labels[static_cast<size_t>(y) * w + x] = id;
            while (!stack.empty()) {
                PixelPoint p = stack.back();
                stack.pop_back();
                for (int i = 0; i < nn; ++i) {
                    int qx = p.x + dx8[i], qy = p.y + dy8[i];
                    if (!mask.in_bounds(qx, qy) || !mask.at(qx, qy)) continue;
                    int& lbl = out.labels[static_cast<size_t>(qy) * w + qx];
                    if (lbl < 0) {
                        lbl = id;
                        stack.push_back({qx, qy});
                    }
                }
            }
        }
    out.count = next;
    return out;
}

std::vector<BinaryMask> connected_components(const BinaryMask& mask, int connectivity) {
    ComponentLabels lab = label_components(mask, connectivity);
    std::vector<BinaryMask> comps(lab.count, BinaryMask(mask.width(), mask.height()));
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            int id = lab.labels[static_cast<size_t>(y) * mask.width() + x];
            if (id >= 0) comps[id].set(x, y, true);
        }
    return comps;
}

namespace {

// Neighborhood in Zhang-Suen order: P2..P9 clockwise starting north.
inline void zs_neighbors(const BinaryMask& m, int x, int y, int p[8]) {
    p[0] = m.at_or(x, y - 1);
    p[1] = m.at_or(x + 1, y - 1);
    p[2] = m.at_or(x + 1, y);
    p[3] = m.at_or(x + 1, y + 1);
    p[4] = m.at_or(x, y + 1);
    p[5] = m.at_or(x - 1, y + 1);
    p[6] = m.at_or(x - 1, y);
    p[7] = m.at_or(x - 1, y - 1);
}

}  // namespace

BinaryMask thin_to_skeleton(const BinaryMask& mask) {
    BinaryMask img = mask;
    std::vector<PixelPoint> to_clear;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            to_clear.clear();
            for (int y = 0; y < img.height(); ++y)
                for (int x = 0; x < img.width(); ++x) {
                    if (!img.at(x, y)) continue;
                    int p[8];
                    zs_neighbors(img, x, y, p);
                    int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    for (int i = 0; i < 8; ++i)
                        if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
                    if (a != 1) continue;
                    if (pass == 0) {
                        if (p[0] * p[2] * p[4] != 0) continue;
                        if (p[2] * p[4] * p[6] != 0) continue;
                    } else {
                        if (p[0] * p[2] * p[6] != 0) continue;
                        if (p[0] * p[4] * p[6] != 0) continue;
                    }
                    to_clear.push_back({x, y});
                }
            for (const auto& q : to_clear) img.set(q.x, q.y, false);
            if (!to_clear.empty()) changed = true;
        }
    }
    return img;
}

namespace {

struct Pt {
    double x, y;
};

Circle circle_from(const Pt& a) { return {a.x, a.y, 0.0}; }

Circle circle_from(const Pt& a, const Pt& b) {
    return {(a.x + b.x) / 2, (a.y + b.y) / 2, std::hypot(a.x - b.x, a.y - b.y) / 2};
}

Circle circle_from(const Pt& a, const Pt& b, const Pt& c) {
    double ax = b.x - a.x, ay = b.y - a.y;
    double bx = c.x - a.x, by = c.y - a.y;
    double d = 2 * (ax * by - ay * bx);
    if (std::abs(d) < 1e-12) {
        // Collinear: fall back to the widest pair.
        Circle c1 = circle_from(a, b), c2 = circle_from(a, c), c3 = circle_from(b, c);
        Circle best = c1;
        if (c2.radius > best.radius) best = c2;
        if (c3.radius > best.radius) best = c3;
        return best;
    }
    double ux = (by * (ax * ax + ay * ay) - ay * (bx * bx + by * by)) / d;
    double uy = (ax * (bx * bx + by * by) - bx * (ax * ax + ay * ay)) / d;
    return {a.x + ux, a.y + uy, std::hypot(ux, uy)};
}

bool in_circle(const Circle& c, const Pt& p, double tol = 1e-9) {
    return std::hypot(p.x - c.cx, p.y - c.cy) <= c.radius + tol;
}

Circle welzl(std::vector<Pt>& pts) {
    // Iterative move-to-front variant.
    Circle c = {0, 0, -1};
    for (size_t i = 0; i < pts.size(); ++i) {
        if (c.radius >= 0 && in_circle(c, pts[i])) continue;
        c = circle_from(pts[i]);
        for (size_t j = 0; j < i; ++j) {
            if (in_circle(c, pts[j])) continue;
            c = circle_from(pts[i], pts[j]);
            for (size_t k = 0; k < j; ++k) {
                if (in_circle(c, pts[k])) continue;
                c = circle_from(pts[i], pts[j], pts[k]);
            }
        }
    }
    return c;
}

}  // namespace

Circle min_enclosing_circle(const std::vector<PixelPoint>& points) {
    if (points.empty()) throw EmptyMaskError("min_enclosing_circle: no points");
    std::vector<Pt> pts;
    pts.reserve(points.size());
    for (const auto& p : points) pts.push_back({double(p.x), double(p.y)});
    std::mt19937 rng(0x5eed);
    std::shuffle(pts.begin(), pts.end(), rng);
    Circle c = welzl(pts);
    if (c.radius < 0) c.radius = 0;
    return c;
}

Circle min_enclosing_circle(const BinaryMask& mask) {
    return min_enclosing_circle(mask.foreground_points());
}

Ellipse fit_ellipse_moments(const BinaryMask& mask) {
    auto pts = mask.foreground_points();
    if (pts.size() < 5) throw EmptyMaskError("fit_ellipse_moments: need area >= 5");
    double n = double(pts.size());
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double mu20 = 0, mu02 = 0, mu11 = 0;
    for (const auto& p : pts) {
        double dx = p.x - mx, dy = p.y - my;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
    }
    mu20 /= n;
    mu02 /= n;
    mu11 /= n;
    // Eigenvalues of the covariance; a filled ellipse with semiaxes (a,b)
    // has variances (a^2/4, b^2/4) along its axes.
    double tr = mu20 + mu02;
    double det = mu20 * mu02 - mu11 * mu11;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    double l1 = tr / 2 + disc;
    double l2 = tr / 2 - disc;
    if (l2 <= 1e-9) throw DegenerateMaskError("fit_ellipse_moments: zero minor variance");
    double theta = 0.5 * std::atan2(2 * mu11, mu20 - mu02);
    if (theta < 0) theta += M_PI;
    if (theta >= M_PI) theta -= M_PI;
    Ellipse e;
    e.cx = mx;
    e.cy = my;
    e.major_semiaxis = 2 * std::sqrt(l1);
    e.minor_semiaxis = 2 * std::sqrt(l2);
    e.orientation = theta;
    return e;
}

}  // namespace speheatal

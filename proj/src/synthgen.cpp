#include "speheatal/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace speheatal {

namespace {

struct Vec2 {
    double x, y;
};

Vec2 bezier(const Vec2 p[4], double t) {
    double u = 1 - t;
    double b0 = u * u * u, b1 = 3 * u * u * t, b2 = 3 * u * t * t, b3 = t * t * t;
    return {b0 * p[0].x + b1 * p[1].x + b2 * p[2].x + b3 * p[3].x,
            b0 * p[0].y + b1 * p[1].y + b2 * p[2].y + b3 * p[3].y};
}

void stamp_disk(BinaryMask& m, double cx, double cy, double r) {
    int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(cx + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(cy + r)));
    double r2 = r * r;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= r2) m.set(x, y, true);
        }
}

void fill_ellipse(BinaryMask& m, double cx, double cy, double a, double b, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    double r = std::max(a, b);
    int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(cx + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - cx, dy = y - cy;
            double u = dx * c + dy * s, v = -dx * s + dy * c;
            if (u * u / (a * a) + v * v / (b * b) <= 1.0) m.set(x, y, true);
        }
}

double uni(std::mt19937& rng, const Range& r) {
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

struct Curve {
    Vec2 ctrl[4];
    double length;
};

// Rasterize a tail along the curve: width tapers linearly from the head end
// (t=0) to the tip (t=1); an optional gap window is left unstamped.
BinaryMask render_tail(int w, int h, const Curve& c, double width_head, double width_tip,
                       double gap_t0, double gap_t1) {
    BinaryMask m(w, h);
    int steps = std::max(32, static_cast<int>(c.length * 3));
    for (int i = 0; i <= steps; ++i) {
        double t = double(i) / steps;
        if (t >= gap_t0 && t <= gap_t1) continue;
        Vec2 p = bezier(c.ctrl, t);
        double half = 0.5 * (width_head + (width_tip - width_head) * t);
        stamp_disk(m, p.x, p.y, half);
    }
    return m;
}

}  // namespace

std::pair<RgbImage, GroundTruth> generate(const SynthSpec& spec) {
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int w = spec.width, h = spec.height;
    const double margin = 12.0;

    GroundTruth gt;
    std::vector<Curve> curves;
    std::vector<double> dirs;
    std::vector<BinaryMask> painted_tails;

    for (int i = 0; i < spec.num_sperm; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            double len = uni(rng, spec.tail_length);
            double phi;
            Vec2 p0;
            if (spec.force_crossing && i == 1) {
                // Run through the middle of sperm 0 at a 60-90 degree angle.
                Vec2 mid = bezier(curves[0].ctrl, 0.5);
                double delta = uni(rng, {60.0, 90.0}) * M_PI / 180.0;
                if (u01(rng) < 0.5) delta = -delta;
                phi = dirs[0] + delta;
                p0 = {mid.x - 0.5 * len * std::cos(phi), mid.y - 0.5 * len * std::sin(phi)};
            } else {
                phi = u01(rng) * 2 * M_PI;
                p0 = {margin + u01(rng) * (w - 2 * margin),
                      margin + u01(rng) * (h - 2 * margin)};
            }
            double cx = std::cos(phi), cy = std::sin(phi);
            double curv = uni(rng, spec.curvature) * len;
            double side = u01(rng) < 0.5 ? 1.0 : -1.0;
            Curve c;
            c.length = len;
            c.ctrl[0] = p0;
            c.ctrl[1] = {p0.x + len / 3 * cx - side * curv * cy,
                         p0.y + len / 3 * cy + side * curv * cx};
            c.ctrl[2] = {p0.x + 2 * len / 3 * cx + side * 0.5 * curv * cy,
                         p0.y + 2 * len / 3 * cy - side * 0.5 * curv * cx};
            c.ctrl[3] = {p0.x + len * cx, p0.y + len * cy};

            bool inside = true;
            for (int s = 0; s <= 20; ++s) {
                Vec2 q = bezier(c.ctrl, s / 20.0);
                if (q.x < margin || q.x > w - margin || q.y < margin || q.y > h - margin)
                    inside = false;
            }
            if (!inside) continue;

            // Head sits just behind the t=0 end, aligned with the curve's
            // initial tangent (towards the first control point), so the neck
            // continues the tail direction.
            double a = uni(rng, spec.head_major), b = uni(rng, spec.head_minor);
            if (b > a) std::swap(a, b);
            double tx = c.ctrl[1].x - c.ctrl[0].x, ty = c.ctrl[1].y - c.ctrl[0].y;
            double tn = std::hypot(tx, ty);
            if (tn < 1e-9) { tx = cx; ty = cy; } else { tx /= tn; ty /= tn; }
            double hx = p0.x - 0.7 * a * tx, hy = p0.y - 0.7 * a * ty;
            BinaryMask head(w, h);
            fill_ellipse(head, hx, hy, a, b, std::atan2(ty, tx));
            if (head.area() < 20) continue;
            bool head_clash = false;
            for (const auto& other : gt.head_masks)
                if (!(head & other.dilate(2)).empty()) head_clash = true;
            if (head_clash) continue;

            double gap_t0 = 2, gap_t1 = 2;  // outside [0,1]: no gap
            if (u01(rng) < spec.breakpoint_prob) {
                double gap_px = uni(rng, spec.breakpoint_gap);
                double t_mid = 0.3 + 0.5 * u01(rng);
                double half_t = 0.5 * gap_px / len;
                gap_t0 = t_mid - half_t;
                gap_t1 = t_mid + half_t;
            }
            double wid_head = uni(rng, spec.tail_width);
            double wid_tip = std::max(spec.tail_width.lo, wid_head - 1.0);
            // Ground truth is the unbroken tail; the gap only affects what
            // gets painted, so bridging it is rewarded, not penalized.
            BinaryMask tail = render_tail(w, h, c, wid_head, wid_tip, 2, 2).minus(head);
            BinaryMask painted =
                render_tail(w, h, c, wid_head, wid_tip, gap_t0, gap_t1).minus(head);

            gt.head_masks.push_back(head);
            gt.tail_masks.push_back(tail);
            gt.full_masks.push_back(head | tail);
            painted_tails.push_back(painted);
            curves.push_back(c);
            dirs.push_back(phi);
            placed = true;
        }
        if (!placed) throw PlacementError("generate: could not place sperm instance");
    }

    for (int i = 0; i < spec.num_dye_blobs; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            double r0 = 8 + 8 * u01(rng);
            double cx = margin + r0 + u01(rng) * (w - 2 * (margin + r0));
            double cy = margin + r0 + u01(rng) * (h - 2 * (margin + r0));
            double phase = u01(rng) * 2 * M_PI;
            double wobble = 0.25 + 0.15 * u01(rng);
            BinaryMask blob(w, h);
            for (int y = static_cast<int>(cy - 2 * r0); y <= cy + 2 * r0; ++y)
                for (int x = static_cast<int>(cx - 2 * r0); x <= cx + 2 * r0; ++x) {
                    if (!blob.in_bounds(x, y)) continue;
                    double dx = x - cx, dy = y - cy;
                    double rr = std::hypot(dx, dy);
                    double th = std::atan2(dy, dx);
                    double rmax = r0 * (1 + wobble * std::sin(3 * th + phase));
                    if (rr <= rmax) blob.set(x, y, true);
                }
            bool clash = false;
            for (const auto& head : gt.head_masks)
                if (!(blob & head.dilate(2)).empty()) clash = true;
            // Dye and tails share the same stain hue; keep them separated so
            // only shape distinguishes them, not connectivity accidents.
            for (const auto& tail : gt.tail_masks)
                if (!clash && !(blob & tail.dilate(2)).empty()) clash = true;
            if (clash) continue;
            gt.dye_masks.push_back(blob);
            placed = true;
        }
        if (!placed) throw PlacementError("generate: could not place dye blob");
    }

    RgbImage img(w, h, spec.background);
    auto paint = [&](const BinaryMask& m, Rgb c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (m.at(x, y)) img.at(x, y) = c;
    };
    for (const auto& t : painted_tails) paint(t, spec.tail_color);
    for (const auto& d : gt.dye_masks) paint(d, spec.dye_color);
    for (const auto& hm : gt.head_masks) paint(hm, spec.head_color);

    if (spec.noise_prob > 0) {
        int speckles = static_cast<int>(spec.noise_prob * w * h / 1000.0);
        for (int i = 0; i < speckles; ++i) {
            int x = static_cast<int>(u01(rng) * w), y = static_cast<int>(u01(rng) * h);
            if (img.in_bounds(x, y) && img.at(x, y) == spec.background)
                img.at(x, y) = spec.tail_color;
        }
    }
    return {std::move(img), std::move(gt)};
}

CrossFixture make_cross_fixture(unsigned seed, int size) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double cx = size / 2.0 + (u01(rng) - 0.5) * 10;
    double cy = size / 2.0 + (u01(rng) - 0.5) * 10;
    double phi1 = u01(rng) * M_PI;
    double delta = (60.0 + 30.0 * u01(rng)) * M_PI / 180.0;
    double phi2 = phi1 + delta;

    CrossFixture fix;
    fix.tail_image = BinaryMask(size, size);
    bool first = true;
    for (double phi : {phi1, phi2}) {
        // Curves of unequal length crossing near their midpoints, as in
        // overlapping tails where one sperm is longer than the other.
        double total = size * (first ? 0.45 + 0.11 * u01(rng) : 0.32 + 0.06 * u01(rng));
        double split = 0.47 + 0.06 * u01(rng);
        double back = total * split;
        double front = total - back;
        double width = 3.0 + 2.0 * u01(rng);
        first = false;
        BinaryMask curve(size, size);
        int steps = static_cast<int>((back + front) * 3);
        for (int i = 0; i <= steps; ++i) {
            double t = -back + (back + front) * i / steps;
            stamp_disk(curve, cx + t * std::cos(phi), cy + t * std::sin(phi), width / 2);
        }
        fix.tail_image = fix.tail_image | curve;
        fix.curves.push_back(std::move(curve));
    }
    return fix;
}

double cross_label_accuracy(const CrossFixture& fix, const std::vector<PixelPoint>& points,
                            const std::vector<int>& labels, double junction_radius) {
    BinaryMask junction = (fix.curves[0] & fix.curves[1])
                              .dilate(static_cast<int>(std::ceil(junction_radius)));
    int correct_direct = 0, correct_swapped = 0, total = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        const PixelPoint& p = points[i];
        if (junction.at_or(p.x, p.y)) continue;
        bool in0 = fix.curves[0].at_or(p.x, p.y);
        bool in1 = fix.curves[1].at_or(p.x, p.y);
        if (in0 == in1) continue;  // outside both, or ambiguous
        int gt = in1 ? 1 : 0;
        int lbl = labels[i] == 0 ? 0 : 1;
        ++total;
        if (lbl == gt) ++correct_direct;
        if (lbl != gt) ++correct_swapped;
    }
    if (total == 0) return 0.0;
    return std::max(correct_direct, correct_swapped) / double(total);
}

}  // namespace speheatal

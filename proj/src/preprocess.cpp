#include "speheatal/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace speheatal {

Hsv rgb_to_hsv(Rgb c) {
    double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    double d = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx > 0 ? d / mx : 0;
    if (d <= 0) {
        out.h = 0;
    } else if (mx == r) {
        out.h = 60 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        out.h = 60 * ((b - r) / d + 2);
    } else {
        out.h = 60 * ((r - g) / d + 4);
    }
    if (out.h < 0) out.h += 360;
    return out;
}

Rgb hsv_to_rgb(const Hsv& c) {
    double h = std::fmod(c.h, 360.0);
    if (h < 0) h += 360;
    double cc = c.v * c.s;
    double x = cc * (1 - std::abs(std::fmod(h / 60.0, 2.0) - 1));
    double m = c.v - cc;
    double r = 0, g = 0, b = 0;
    if (h < 60) {
        r = cc; g = x;
    } else if (h < 120) {
        r = x; g = cc;
    } else if (h < 180) {
        g = cc; b = x;
    } else if (h < 240) {
        g = x; b = cc;
    } else if (h < 300) {
        r = x; b = cc;
    } else {
        r = cc; b = x;
    }
    auto q = [&](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround((v + m) * 255.0), 0L, 255L));
    };
    return {q(r), q(g), q(b)};
}

namespace {

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

bool hue_in_range(double h, double lo, double hi) {
    if (lo <= hi) return h >= lo && h <= hi;
    return h >= lo || h <= hi;  // wrapped range
}

bool is_purple(Rgb c, const PreprocessConfig& cfg) {
    Hsv hsv = rgb_to_hsv(c);
    return hue_in_range(hsv.h, cfg.purple_hue_lo, cfg.purple_hue_hi) &&
           hsv.s >= cfg.min_saturation && hsv.v >= cfg.min_value;
}

bool is_green(Rgb c, const PreprocessConfig& cfg) {
    Hsv hsv = rgb_to_hsv(c);
    return hue_in_range(hsv.h, cfg.green_hue_lo, cfg.green_hue_hi) &&
           hsv.s >= cfg.min_saturation && hsv.v >= cfg.min_value;
}

}  // namespace

RgbImage normalize(const RgbImage& img, const PreprocessConfig& cfg) {
    RgbImage out = img;
    bool linear = cfg.brightness_gain != 1.0 || cfg.contrast_gain != 1.0;
    if (linear) {
        for (Rgb& p : out.pixels()) {
            auto adj = [&](std::uint8_t v) {
                double x = v * cfg.brightness_gain;
                x = (x - 128.0) * cfg.contrast_gain + 128.0;
                return clamp_u8(x);
            };
            p = {adj(p.r), adj(p.g), adj(p.b)};
        }
    }
    if (cfg.saturation_gain != 1.0) {
        for (Rgb& p : out.pixels()) {
            Hsv hsv = rgb_to_hsv(p);
            hsv.s = std::clamp(hsv.s * cfg.saturation_gain, 0.0, 1.0);
            p = hsv_to_rgb(hsv);
        }
    }
    if (cfg.sharpen) {
        // 3x3 unsharp: out = 2*center - blur.
        RgbImage src = out;
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x) {
                double acc[3] = {0, 0, 0};
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!src.in_bounds(x + dx, y + dy)) continue;
                        const Rgb& q = src.at(x + dx, y + dy);
                        acc[0] += q.r;
                        acc[1] += q.g;
                        acc[2] += q.b;
                        ++n;
                    }
                const Rgb& c = src.at(x, y);
                out.at(x, y) = {clamp_u8(2.0 * c.r - acc[0] / n),
                                clamp_u8(2.0 * c.g - acc[1] / n),
                                clamp_u8(2.0 * c.b - acc[2] / n)};
            }
    }
    if (cfg.whiten_background) {
        for (Rgb& p : out.pixels())
            if (!is_purple(p, cfg) && !is_green(p, cfg)) p = {255, 255, 255};
    }
    return out;
}

BinaryMask classify_purple(const RgbImage& img, const PreprocessConfig& cfg) {
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            m.set(x, y, is_purple(img.at(x, y), cfg));
    return m;
}

BinaryMask classify_green(const RgbImage& img, const PreprocessConfig& cfg) {
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            m.set(x, y, is_green(img.at(x, y), cfg));
    return m;
}

BinaryMask foreground_mask(const RgbImage& img, const PreprocessConfig& cfg) {
    return classify_purple(img, cfg) | classify_green(img, cfg);
}

}  // namespace speheatal

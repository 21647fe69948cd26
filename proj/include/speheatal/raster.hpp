#ifndef SPEHEATAL_RASTER_HPP
#define SPEHEATAL_RASTER_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "speheatal/errors.hpp"

namespace speheatal {

struct PixelPoint {
    int x = 0;  // column
    int y = 0;  // row

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major RGB raster, values in [0,255].
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {255, 255, 255});

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    Rgb& at(int x, int y) { return pixels_[static_cast<size_t>(y) * width_ + x]; }
    const Rgb& at(int x, int y) const { return pixels_[static_cast<size_t>(y) * width_ + x]; }

    const std::vector<Rgb>& pixels() const { return pixels_; }
    std::vector<Rgb>& pixels() { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// Row-major boolean raster. Pixel coordinates refer to cell centers;
/// all distances are in pixel units.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    bool at(int x, int y) const { return bits_[static_cast<size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0; }

    /// Out-of-bounds reads as background.
    bool at_or(int x, int y) const { return in_bounds(x, y) && at(x, y); }

    std::size_t area() const;
    bool empty() const { return area() == 0; }

    std::vector<PixelPoint> foreground_points() const;

    bool same_size(const BinaryMask& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    BinaryMask operator&(const BinaryMask& o) const;
    BinaryMask operator|(const BinaryMask& o) const;
    /// Set difference: pixels of *this not in o.
    BinaryMask minus(const BinaryMask& o) const;

    /// Dilate by a square structuring element of the given radius (Chebyshev).
    BinaryMask dilate(int radius) const;

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Ellipse {
    double cx = 0, cy = 0;
    double major_semiaxis = 0;
    double minor_semiaxis = 0;
    double orientation = 0;  // radians in [0, pi)
};

struct Circle {
    double cx = 0, cy = 0;
    double radius = 0;
};

/// Connected components of the foreground under 4- or 8-adjacency.
/// Empty input yields an empty list. Each component is returned as a
/// full-size mask; together they partition the input foreground.
std::vector<BinaryMask> connected_components(const BinaryMask& mask, int connectivity = 8);

/// Component label per pixel (-1 for background), with component count.
struct ComponentLabels {
    std::vector<int> labels;  // row-major, -1 = background
    int count = 0;
};
ComponentLabels label_components(const BinaryMask& mask, int connectivity = 8);

/// Zhang-Suen iterative thinning to a single-pixel-wide 8-connected skeleton.
BinaryMask thin_to_skeleton(const BinaryMask& mask);

/// Smallest circle covering the centers of all foreground pixels.
/// Welzl's randomized algorithm; deterministic (fixed internal seed).
Circle min_enclosing_circle(const BinaryMask& mask);
Circle min_enclosing_circle(const std::vector<PixelPoint>& points);

/// Ellipse from second-order central image moments. The center is the
/// centroid and the orientation is the principal axis; a filled ellipse
/// maps back to (approximately) itself.
Ellipse fit_ellipse_moments(const BinaryMask& mask);

}  // namespace speheatal

#endif

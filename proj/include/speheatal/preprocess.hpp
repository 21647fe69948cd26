#ifndef SPEHEATAL_PREPROCESS_HPP
#define SPEHEATAL_PREPROCESS_HPP

#include "speheatal/raster.hpp"

namespace speheatal {

struct Hsv {
    double h = 0;  // degrees [0,360)
    double s = 0;  // [0,1]
    double v = 0;  // [0,1]
};

Hsv rgb_to_hsv(Rgb c);
Rgb hsv_to_rgb(const Hsv& c);

struct PreprocessConfig {
    double brightness_gain = 1.0;
    double contrast_gain = 1.0;   // pivots at 128
    double saturation_gain = 1.0; // applied in HSV
    bool sharpen = false;
    bool whiten_background = false;
    double purple_hue_lo = 250.0, purple_hue_hi = 330.0;
    double green_hue_lo = 70.0, green_hue_hi = 170.0;
    double min_saturation = 0.15;
    double min_value = 0.15;
};

/// Brightness/contrast/saturation adjustment, optional unsharp edge
/// sharpening and background whitening. Identity config is the identity map.
RgbImage normalize(const RgbImage& img, const PreprocessConfig& cfg);

/// Pixels whose hue falls in the configured purple range with saturation and
/// value above the floors.
BinaryMask classify_purple(const RgbImage& img, const PreprocessConfig& cfg);
BinaryMask classify_green(const RgbImage& img, const PreprocessConfig& cfg);

/// Union of purple- and green-classified pixels: the stained foreground.
BinaryMask foreground_mask(const RgbImage& img, const PreprocessConfig& cfg);

}  // namespace speheatal

#endif

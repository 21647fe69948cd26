#ifndef SPEHEATAL_IMAGE_IO_HPP
#define SPEHEATAL_IMAGE_IO_HPP

#include <string>

#include "speheatal/raster.hpp"

namespace speheatal {

/// PNG I/O. Masks use 8-bit grayscale, 0 = background, 255 = foreground;
/// on read any nonzero sample counts as foreground.
void write_png(const std::string& path, const RgbImage& img);
void write_png(const std::string& path, const BinaryMask& mask);
RgbImage read_png_rgb(const std::string& path);
BinaryMask read_png_mask(const std::string& path);

/// JSON run-length encoding {"w":..,"h":..,"rle":[...]} with alternating
/// background/foreground run lengths, starting with background.
std::string mask_to_rle_json(const BinaryMask& mask);
BinaryMask mask_from_rle_json(const std::string& json_text);

}  // namespace speheatal

#endif

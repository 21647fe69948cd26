#include "speheatal/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

namespace speheatal {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png_rows(const std::string& path, int w, int h, int color_type,
                    const std::vector<std::vector<png_byte>>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& row : rows)
        png_write_row(png, const_cast<png_bytep>(row.data()));
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const std::string& path, const RgbImage& img) {
    std::vector<std::vector<png_byte>> rows(img.height());
    for (int y = 0; y < img.height(); ++y) {
        rows[y].resize(static_cast<size_t>(img.width()) * 3);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb& p = img.at(x, y);
            rows[y][3 * x + 0] = p.r;
            rows[y][3 * x + 1] = p.g;
            rows[y][3 * x + 2] = p.b;
        }
    }
    write_png_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, rows);
}

void write_png(const std::string& path, const BinaryMask& mask) {
    std::vector<std::vector<png_byte>> rows(mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        rows[y].resize(static_cast<size_t>(mask.width()));
        for (int x = 0; x < mask.width(); ++x)
            rows[y][x] = mask.at(x, y) ? 255 : 0;
    }
    write_png_rows(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, rows);
}

namespace {

// Reads any PNG as 8-bit RGB.
std::vector<std::vector<png_byte>> read_png_rows(const std::string& path, int& w, int& h) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open for reading: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png read failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    w = png_get_image_width(png, info);
    h = png_get_image_height(png, info);
    png_byte color_type = png_get_color_type(png, info);
    png_byte bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    std::vector<std::vector<png_byte>> rows(h);
    size_t rowbytes = png_get_rowbytes(png, info);
    for (int y = 0; y < h; ++y) rows[y].resize(rowbytes);
    for (int y = 0; y < h; ++y) png_read_row(png, rows[y].data(), nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return rows;
}

}  // namespace

RgbImage read_png_rgb(const std::string& path) {
    int w = 0, h = 0;
    auto rows = read_png_rows(path, w, h);
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = {rows[y][3 * x], rows[y][3 * x + 1], rows[y][3 * x + 2]};
    return img;
}

BinaryMask read_png_mask(const std::string& path) {
    int w = 0, h = 0;
    auto rows = read_png_rows(path, w, h);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool fg = rows[y][3 * x] || rows[y][3 * x + 1] || rows[y][3 * x + 2];
            m.set(x, y, fg);
        }
    return m;
}

std::string mask_to_rle_json(const BinaryMask& mask) {
    nlohmann::json j;
    j["w"] = mask.width();
    j["h"] = mask.height();
    std::vector<std::int64_t> runs;
    bool cur = false;  // runs start with background
    std::int64_t len = 0;
    for (size_t i = 0; i < mask.bits().size(); ++i) {
        bool v = mask.bits()[i] != 0;
        if (v == cur) {
            ++len;
        } else {
            runs.push_back(len);
            cur = v;
            len = 1;
        }
    }
    runs.push_back(len);
    j["rle"] = runs;
    return j.dump();
}

BinaryMask mask_from_rle_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    int w = j.at("w").get<int>();
    int h = j.at("h").get<int>();
    BinaryMask m(w, h);
    std::int64_t pos = 0;
    bool cur = false;
    for (std::int64_t len : j.at("rle").get<std::vector<std::int64_t>>()) {
        if (cur)
            for (std::int64_t i = 0; i < len; ++i) {
                std::int64_t p = pos + i;
                m.set(static_cast<int>(p % w), static_cast<int>(p / w), true);
            }
        pos += len;
        cur = !cur;
    }
    if (pos != static_cast<std::int64_t>(w) * h)
        throw IoError("rle length does not match w*h");
    return m;
}

}  // namespace speheatal

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace deckfuse {

// Row-major 8-bit RGB, 3 bytes per pixel.
struct RasterImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    static RasterImage filled(std::size_t w, std::size_t h, std::uint8_t r,
                              std::uint8_t g, std::uint8_t b);

    std::uint8_t* at(std::size_t x, std::size_t y) { return pixels.data() + 3 * (y * width + x); }
    const std::uint8_t* at(std::size_t x, std::size_t y) const {
        return pixels.data() + 3 * (y * width + x);
    }
    void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

/// Decode an 8-bit PNG (grayscale, RGB, palette, or RGBA; alpha dropped).
/// Malformed data raises ParseError.
RasterImage decode_png(const std::vector<std::uint8_t>& data);
RasterImage read_png(const std::string& path);

/// Encode as 8-bit truecolor with a fixed filter and compression setting,
/// so identical pixels always produce identical bytes.
std::vector<std::uint8_t> encode_png(const RasterImage& img);
void write_png(const RasterImage& img, const std::string& path);

}  // namespace deckfuse

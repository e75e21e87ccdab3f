#include "deckfuse/png_io.hpp"

#include <cstring>
#include <zlib.h>

#include "deckfuse/errors.hpp"
#include "deckfuse/io.hpp"

namespace deckfuse {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    append_u32(out, std::uint32_t(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = ::crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start));
    append_u32(out, std::uint32_t(crc));
}

std::vector<std::uint8_t> zlib_inflate(const std::uint8_t* data, std::size_t size) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw ParseError("PNG inflate initialization failed");
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 15];
    zs.next_in = const_cast<std::uint8_t*>(data);
    zs.avail_in = uInt(size);
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError("PNG image data is corrupt (zlib error " + std::to_string(rc) + ")");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& data) {
    // Fixed level: the encoded stream must not depend on defaults that could
    // change between runs.
    z_stream zs{};
    if (deflateInit(&zs, 6) != Z_OK) throw IoError("PNG deflate initialization failed");
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 15];
    zs.next_in = const_cast<std::uint8_t*>(data.data());
    zs.avail_in = uInt(data.size());
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = deflate(&zs, Z_FINISH);
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc == Z_OK);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw IoError("PNG deflate failed");
    return out;
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

RasterImage RasterImage::filled(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g,
                                std::uint8_t b) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(3 * w * h);
    for (std::size_t i = 0; i < w * h; ++i) {
        img.pixels[3 * i] = r;
        img.pixels[3 * i + 1] = g;
        img.pixels[3 * i + 2] = b;
    }
    return img;
}

RasterImage decode_png(const std::vector<std::uint8_t>& data) {
    if (data.size() < 8 || std::memcmp(data.data(), kSignature, 8) != 0) {
        throw ParseError("not a PNG file (bad signature)");
    }
    std::size_t pos = 8;
    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    std::vector<std::uint8_t> palette;  // RGB triples
    std::vector<std::uint8_t> idat;
    bool saw_ihdr = false, saw_iend = false;

    while (pos + 8 <= data.size() && !saw_iend) {
        const std::uint32_t len = read_u32(data.data() + pos);
        if (pos + 12 + len > data.size()) throw ParseError("PNG chunk overruns file");
        const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
        const std::uint8_t* payload = data.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw ParseError("PNG IHDR length must be 13");
            width = read_u32(payload);
            height = read_u32(payload + 4);
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[12] != 0) throw ParseError("interlaced PNG is not supported");
            if (bit_depth != 8) {
                throw ParseError("unsupported PNG bit depth " + std::to_string(bit_depth));
            }
            if (color_type != 0 && color_type != 2 && color_type != 3 && color_type != 6) {
                throw ParseError("unsupported PNG color type " + std::to_string(color_type));
            }
            if (width == 0 || height == 0) throw ParseError("PNG has zero dimension");
            saw_ihdr = true;
        } else if (std::memcmp(type, "PLTE", 4) == 0) {
            if (len % 3 != 0) throw ParseError("PNG palette length must be a multiple of 3");
            palette.assign(payload, payload + len);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr) throw ParseError("PNG is missing IHDR");
    if (idat.empty()) throw ParseError("PNG has no image data");

    const std::size_t channels = color_type == 2 ? 3 : color_type == 6 ? 4 : 1;
    const std::size_t stride = std::size_t(width) * channels;
    std::vector<std::uint8_t> raw = zlib_inflate(idat.data(), idat.size());
    if (raw.size() != (stride + 1) * height) {
        throw ParseError("PNG image data has wrong size");
    }

    // Undo per-row filters in place over a copy without the filter bytes.
    std::vector<std::uint8_t> flat(stride * height);
    for (std::size_t y = 0; y < height; ++y) {
        const std::uint8_t filter = raw[(stride + 1) * y];
        const std::uint8_t* src = raw.data() + (stride + 1) * y + 1;
        std::uint8_t* dst = flat.data() + stride * y;
        const std::uint8_t* up = y > 0 ? flat.data() + stride * (y - 1) : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= channels ? dst[i - channels] : 0;
            const int b = up ? up[i] : 0;
            const int c = (up && i >= channels) ? up[i - channels] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw ParseError("unknown PNG filter " + std::to_string(filter));
            }
            dst[i] = std::uint8_t(v & 0xff);
        }
    }

    RasterImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(std::size_t(width) * height * 3);
    for (std::size_t i = 0; i < std::size_t(width) * height; ++i) {
        const std::uint8_t* s = flat.data() + i * channels;
        std::uint8_t* d = img.pixels.data() + i * 3;
        switch (color_type) {
            case 0: d[0] = d[1] = d[2] = s[0]; break;
            case 2:
            case 6: d[0] = s[0]; d[1] = s[1]; d[2] = s[2]; break;
            case 3: {
                const std::size_t idx = std::size_t(s[0]) * 3;
                if (idx + 2 >= palette.size()) {
                    throw ParseError("PNG palette index out of range");
                }
                d[0] = palette[idx];
                d[1] = palette[idx + 1];
                d[2] = palette[idx + 2];
                break;
            }
        }
    }
    return img;
}

RasterImage read_png(const std::string& path) {
    const std::string bytes = io::read_file(path);
    return decode_png(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height * 3) {
        throw ValidationError("raster image dimensions do not match pixel buffer");
    }
    std::vector<std::uint8_t> out(kSignature, kSignature + 8);

    std::vector<std::uint8_t> ihdr;
    append_u32(ihdr, std::uint32_t(img.width));
    append_u32(ihdr, std::uint32_t(img.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);   // deflate
    ihdr.push_back(0);   // adaptive filtering
    ihdr.push_back(0);   // no interlace
    append_chunk(out, "IHDR", ihdr);

    const std::size_t stride = img.width * 3;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), img.pixels.begin() + stride * y,
                   img.pixels.begin() + stride * (y + 1));
    }
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", {});
    return out;
}

void write_png(const RasterImage& img, const std::string& path) {
    const std::vector<std::uint8_t> bytes = encode_png(img);
    io::write_file(path, std::string(bytes.begin(), bytes.end()));
}

}  // namespace deckfuse

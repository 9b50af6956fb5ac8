#pragma once

#include <png.h>

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "bsm/errors.hpp"
#include "bsm/image.hpp"

namespace bsm {

namespace detail {

inline std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path);
    return data;
}

// Cursor over a PNM/PFM header. Tokens are separated by whitespace;
// '#' starts a comment running to end of line.
struct PnmCursor {
    const uint8_t* data;
    size_t size;
    size_t pos = 0;

    bool eof() const { return pos >= size; }

    void skip_space_and_comments() {
        while (pos < size) {
            const uint8_t c = data[pos];
            if (c == '#') {
                while (pos < size && data[pos] != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string token(const char* what) {
        skip_space_and_comments();
        size_t start = pos;
        while (pos < size && !std::isspace(data[pos]) && data[pos] != '#') ++pos;
        if (pos == start) throw FormatError(std::string("missing ") + what + " in PNM header");
        return std::string(reinterpret_cast<const char*>(data) + start, pos - start);
    }

    long int_token(const char* what) {
        const std::string t = token(what);
        size_t used = 0;
        long v = 0;
        try {
            v = std::stol(t, &used);
        } catch (const std::exception&) {
            throw FormatError(std::string("bad ") + what + " '" + t + "' in PNM header");
        }
        if (used != t.size()) throw FormatError(std::string("bad ") + what + " in PNM header");
        return v;
    }

    // Binary payloads start after exactly one whitespace byte.
    void expect_single_space() {
        if (pos >= size || !std::isspace(data[pos]))
            throw FormatError("missing separator before PNM payload");
        ++pos;
    }
};

struct PnmHeader {
    char magic;  // '2','3','5','6'
    int width, height;
    long maxval;
};

inline PnmHeader parse_pnm_header(PnmCursor& cur) {
    const std::string magic = cur.token("magic");
    if (magic.size() != 2 || magic[0] != 'P' ||
        (magic[1] != '2' && magic[1] != '3' && magic[1] != '5' && magic[1] != '6'))
        throw FormatError("unsupported PNM magic '" + magic + "'");
    PnmHeader h;
    h.magic = magic[1];
    const long w = cur.int_token("width");
    const long ht = cur.int_token("height");
    h.maxval = cur.int_token("maxval");
    if (w < 1 || ht < 1 || w > (1 << 20) || ht > (1 << 20))
        throw FormatError("bad PNM dimensions");
    if (h.maxval < 1 || h.maxval > 65535) throw FormatError("bad PNM maxval");
    h.width = int(w);
    h.height = int(ht);
    return h;
}

// Decodes samples of a P2/P3/P5/P6 body into raw integer values.
inline std::vector<uint16_t> read_pnm_samples(PnmCursor& cur, const PnmHeader& h,
                                              int channels) {
    const size_t count = size_t(h.width) * size_t(h.height) * size_t(channels);
    std::vector<uint16_t> out(count);
    const bool ascii = h.magic == '2' || h.magic == '3';
    if (ascii) {
        for (size_t i = 0; i < count; ++i) {
            const long v = cur.int_token("sample");
            if (v < 0 || v > h.maxval) throw FormatError("PNM sample out of range");
            out[i] = uint16_t(v);
        }
    } else {
        cur.expect_single_space();
        const int bytes = h.maxval > 255 ? 2 : 1;
        if (cur.size - cur.pos < count * size_t(bytes))
            throw FormatError("truncated PNM payload");
        const uint8_t* p = cur.data + cur.pos;
        if (bytes == 1) {
            for (size_t i = 0; i < count; ++i) out[i] = p[i];
        } else {
            for (size_t i = 0; i < count; ++i)
                out[i] = uint16_t((p[2 * i] << 8) | p[2 * i + 1]);  // big-endian
        }
        cur.pos += count * size_t(bytes);
    }
    return out;
}

inline uint8_t scale_to_8bit(uint16_t v, long maxval) {
    if (maxval == 255) return uint8_t(v);
    return uint8_t((long(v) * 255 + maxval / 2) / maxval);
}

inline bool has_png_signature(const std::vector<uint8_t>& data) {
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return data.size() >= 8 && std::memcmp(data.data(), sig, 8) == 0;
}

inline RgbImage decode_png_rgb(const std::vector<uint8_t>& data, const std::string& path) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&im, data.data(), data.size()))
        throw FormatError("bad PNG " + path + ": " + im.message);
    im.format = PNG_FORMAT_RGB;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(im));
    if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&im);
        throw FormatError("bad PNG " + path + ": " + im.message);
    }
    RgbImage out(int(im.width), int(im.height));
    for (size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = Rgb8{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
    return out;
}

inline std::vector<uint16_t> decode_png_gray(const std::vector<uint8_t>& data,
                                             const std::string& path, int& w, int& h) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&im, data.data(), data.size()))
        throw FormatError("bad PNG " + path + ": " + im.message);
    im.format = PNG_FORMAT_GRAY;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(im));
    if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&im);
        throw FormatError("bad PNG " + path + ": " + im.message);
    }
    w = int(im.width);
    h = int(im.height);
    return std::vector<uint16_t>(buf.begin(), buf.end());
}

struct PfmData {
    int width, height;
    int channels;        // 1 or 3
    std::vector<float> values;  // top-down row order after loading
};

inline PfmData parse_pfm(const std::vector<uint8_t>& data, const std::string& path) {
    PnmCursor cur{data.data(), data.size()};
    const std::string magic = cur.token("magic");
    if (magic != "Pf" && magic != "PF") throw FormatError("bad PFM magic in " + path);
    const int channels = magic == "PF" ? 3 : 1;
    const long w = cur.int_token("width");
    const long h = cur.int_token("height");
    if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20))
        throw FormatError("bad PFM dimensions in " + path);
    const std::string scale_tok = cur.token("scale");
    double scale = 0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw FormatError("bad PFM scale in " + path);
    }
    if (scale == 0) throw FormatError("bad PFM scale in " + path);
    const bool file_big_endian = scale > 0;
    cur.expect_single_space();

    const size_t count = size_t(w) * size_t(h) * size_t(channels);
    if (data.size() - cur.pos < count * 4) throw FormatError("truncated PFM payload in " + path);

    PfmData out;
    out.width = int(w);
    out.height = int(h);
    out.channels = channels;
    out.values.resize(count);
    const bool host_big_endian = std::endian::native == std::endian::big;
    const uint8_t* p = data.data() + cur.pos;
    // PFM rows are stored bottom-to-top.
    for (long fy = 0; fy < h; ++fy) {
        const long y = h - 1 - fy;
        for (long x = 0; x < w * channels; ++x) {
            uint32_t raw;
            std::memcpy(&raw, p + (size_t(fy) * size_t(w) * channels + size_t(x)) * 4, 4);
            if (file_big_endian != host_big_endian) raw = __builtin_bswap32(raw);
            float f;
            std::memcpy(&f, &raw, 4);
            out.values[size_t(y) * size_t(w) * channels + size_t(x)] = f;
        }
    }
    return out;
}

inline bool is_pfm_magic(const std::vector<uint8_t>& data) {
    return data.size() >= 2 && data[0] == 'P' && (data[1] == 'f' || data[1] == 'F');
}

}  // namespace detail

// Decodes a PGM (P2/P5), PPM (P3/P6), or PNG file. Grayscale sources expand
// to r=g=b; 16-bit PNM samples rescale to 8 bits.
inline RgbImage load_image(const std::string& path) {
    const std::vector<uint8_t> data = detail::read_file(path);
    if (data.empty()) throw FormatError("empty file " + path);
    if (detail::has_png_signature(data)) return detail::decode_png_rgb(data, path);

    detail::PnmCursor cur{data.data(), data.size()};
    const detail::PnmHeader h = detail::parse_pnm_header(cur);
    const bool color = h.magic == '3' || h.magic == '6';
    const int channels = color ? 3 : 1;
    const std::vector<uint16_t> samples = detail::read_pnm_samples(cur, h, channels);

    RgbImage out(h.width, h.height);
    for (size_t i = 0; i < out.pixels.size(); ++i) {
        if (color) {
            out.pixels[i] = Rgb8{detail::scale_to_8bit(samples[3 * i], h.maxval),
                                 detail::scale_to_8bit(samples[3 * i + 1], h.maxval),
                                 detail::scale_to_8bit(samples[3 * i + 2], h.maxval)};
        } else {
            const uint8_t g = detail::scale_to_8bit(samples[i], h.maxval);
            out.pixels[i] = Rgb8{g, g, g};
        }
    }
    return out;
}

// Reads a ground-truth/stored disparity map: stored value divided by `scale`.
// PGM value 0 and PFM non-finite values mark unknown pixels. 8-bit grayscale
// PNG is accepted with the PGM convention.
inline DisparityMap load_gt_disparity(const std::string& path, double scale) {
    if (scale <= 0) throw InvalidArgument("disparity scale must be > 0");
    const std::vector<uint8_t> data = detail::read_file(path);
    if (data.empty()) throw FormatError("empty file " + path);

    if (detail::is_pfm_magic(data)) {
        const detail::PfmData pfm = detail::parse_pfm(data, path);
        if (pfm.channels != 1) throw FormatError("disparity PFM must be grayscale: " + path);
        DisparityMap out(pfm.width, pfm.height);
        for (size_t i = 0; i < pfm.values.size(); ++i) {
            const float v = pfm.values[i];
            if (std::isfinite(v)) {
                out.disparity[i] = float(v / scale);
                out.valid[i] = 1;
            } else {
                out.disparity[i] = 0.0f;
                out.valid[i] = 0;
            }
        }
        return out;
    }

    std::vector<uint16_t> stored;
    int w = 0, h = 0;
    if (detail::has_png_signature(data)) {
        stored = detail::decode_png_gray(data, path, w, h);
    } else {
        detail::PnmCursor cur{data.data(), data.size()};
        const detail::PnmHeader hd = detail::parse_pnm_header(cur);
        if (hd.magic == '3' || hd.magic == '6')
            throw FormatError("disparity PGM must be grayscale: " + path);
        stored = detail::read_pnm_samples(cur, hd, 1);
        w = hd.width;
        h = hd.height;
    }
    DisparityMap out(w, h);
    for (size_t i = 0; i < stored.size(); ++i) {
        if (stored[i] == 0) {
            out.disparity[i] = 0.0f;
            out.valid[i] = 0;
        } else {
            out.disparity[i] = float(stored[i] / scale);
            out.valid[i] = 1;
        }
    }
    return out;
}

// Writes a 16-bit PGM storing round(disparity * scale); invalid pixels store 0.
inline void save_disparity(const DisparityMap& map, const std::string& path, double scale) {
    if (scale <= 0) throw InvalidArgument("disparity scale must be > 0");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << map.width << " " << map.height << "\n65535\n";
    std::vector<uint8_t> row(size_t(map.width) * 2);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            long v = 0;
            if (map.is_valid(x, y)) {
                v = std::lround(double(map.d(x, y)) * scale);
                if (v < 0) v = 0;
                if (v > 65535) v = 65535;
            }
            row[size_t(x) * 2] = uint8_t(v >> 8);
            row[size_t(x) * 2 + 1] = uint8_t(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw IoError("write failed on " + path);
}

// Grayscale PFM, raw disparity values, +inf for invalid pixels.
inline void save_disparity_pfm(const DisparityMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const bool host_big_endian = std::endian::native == std::endian::big;
    out << "Pf\n" << map.width << " " << map.height << "\n"
        << (host_big_endian ? "1.0" : "-1.0") << "\n";
    const float inf = std::numeric_limits<float>::infinity();
    for (int fy = 0; fy < map.height; ++fy) {
        const int y = map.height - 1 - fy;  // bottom-up
        for (int x = 0; x < map.width; ++x) {
            const float v = map.is_valid(x, y) ? map.d(x, y) : inf;
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    if (!out) throw IoError("write failed on " + path);
}

// 8-bit PGM helper for stage visualizations and test fixtures.
inline void save_gray_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> row(size_t(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const float v = std::round(img.at(x, y));
            row[size_t(x)] = uint8_t(v < 0 ? 0 : (v > 255 ? 255 : v));
        }
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw IoError("write failed on " + path);
}

inline void save_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (const Rgb8& p : img.pixels) {
        const uint8_t rgb[3] = {p.r, p.g, p.b};
        out.write(reinterpret_cast<const char*>(rgb), 3);
    }
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace bsm

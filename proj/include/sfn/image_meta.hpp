#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace sfn {

struct ImageSize {
    int width = 0;
    int height = 0;
};

namespace detail {

inline uint32_t be32(const unsigned char* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

inline uint16_t be16(const unsigned char* p) {
    return static_cast<uint16_t>((uint16_t(p[0]) << 8) | uint16_t(p[1]));
}

} // namespace detail

// Original on-disk dimensions read from the PNG IHDR chunk or the first
// JPEG SOF marker. Never decodes pixel data; this is what feeds the image
// size cue, recorded before any resize.
inline ImageSize read_image_size(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open image: " + path.string());
    struct Closer {
        std::FILE* f;
        ~Closer() { std::fclose(f); }
    } closer{f};

    unsigned char head[26] = {0};
    size_t got = std::fread(head, 1, sizeof(head), f);

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (got >= 24 && std::equal(png_sig, png_sig + 8, head)) {
        // 8-byte signature, 4-byte length, "IHDR", then width/height
        ImageSize s;
        s.width = static_cast<int>(detail::be32(head + 16));
        s.height = static_cast<int>(detail::be32(head + 20));
        if (s.width <= 0 || s.height <= 0)
            throw std::runtime_error("bad PNG dimensions in " + path.string());
        return s;
    }

    if (got >= 4 && head[0] == 0xff && head[1] == 0xd8) {
        // JPEG: walk segments until a start-of-frame marker
        std::fseek(f, 2, SEEK_SET);
        for (;;) {
            int c = std::fgetc(f);
            if (c == EOF) break;
            if (c != 0xff) continue;
            int marker = std::fgetc(f);
            while (marker == 0xff) marker = std::fgetc(f);
            if (marker == EOF) break;
            if (marker == 0xd8 || (marker >= 0xd0 && marker <= 0xd9) || marker == 0x01)
                continue; // standalone markers, no payload
            unsigned char lenb[2];
            if (std::fread(lenb, 1, 2, f) != 2) break;
            const uint16_t seg_len = detail::be16(lenb);
            if (seg_len < 2) break;
            const bool is_sof = (marker >= 0xc0 && marker <= 0xcf) && marker != 0xc4 &&
                                marker != 0xc8 && marker != 0xcc;
            if (is_sof) {
                unsigned char sof[5];
                if (std::fread(sof, 1, 5, f) != 5) break;
                ImageSize s;
                s.height = detail::be16(sof + 1);
                s.width = detail::be16(sof + 3);
                if (s.width <= 0 || s.height <= 0)
                    throw std::runtime_error("bad JPEG dimensions in " + path.string());
                return s;
            }
            std::fseek(f, seg_len - 2, SEEK_CUR);
        }
        throw std::runtime_error("no JPEG frame header found in " + path.string());
    }

    throw std::runtime_error("unsupported image format (expected PNG or JPEG): " + path.string());
}

} // namespace sfn

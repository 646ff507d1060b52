#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace perfsum {

// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    static GrayImage filled(int width, int height, std::uint8_t value);
};

// Reads a portable graymap, textual (P2) or binary (P5) variant, with a
// maximum gray value of at most 255. Throws ParseError on malformed input
// and Error when the file cannot be opened.
GrayImage read_pgm(const std::filesystem::path& path);

// Writes the binary (P5) variant by default, textual (P2) otherwise.
void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool binary = true);

} // namespace perfsum

#include "perfsum/pgm.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "perfsum/errors.hpp"

namespace perfsum {

GrayImage GrayImage::filled(int width, int height, std::uint8_t value) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(width) * height, value);
    return img;
}

namespace {

// Cursor over the raw file bytes; understands netpbm whitespace and comments.
class PnmScanner {
public:
    explicit PnmScanner(std::string data) : data_(std::move(data)) {}

    // Next whitespace-delimited token, skipping '#' comments.
    std::string token() {
        skip_separators();
        if (pos_ >= data_.size()) throw ParseError(0, "unexpected end of graymap header");
        std::string out;
        while (pos_ < data_.size() &&
               !std::isspace(static_cast<unsigned char>(data_[pos_])) && data_[pos_] != '#')
            out.push_back(data_[pos_++]);
        return out;
    }

    int header_number(const char* what, int min, int max) {
        const std::string tok = token();
        int value = 0;
        try {
            std::size_t used = 0;
            value = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError(0, std::string("graymap ") + what + " is not a number: '" + tok + "'");
        }
        if (value < min || value > max)
            throw ParseError(0, std::string("graymap ") + what + " out of range: " + tok);
        return value;
    }

    // Consumes the single whitespace byte that separates the header from the
    // raster of a binary graymap.
    void consume_raster_separator() {
        if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
            throw ParseError(0, "missing separator before binary raster");
        ++pos_;
    }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    const char* raster() const noexcept { return data_.data() + pos_; }

private:
    void skip_separators() {
        while (pos_ < data_.size()) {
            const char c = data_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string data_;
    std::size_t pos_ = 0;
};

} // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open graymap '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    PnmScanner scanner(std::move(buffer).str());

    const std::string magic = scanner.token();
    if (magic != "P2" && magic != "P5")
        throw ParseError(0, "unsupported graymap magic '" + magic + "' in '" + path.string() +
                                "' (expected P2 or P5)");
    const bool binary = magic == "P5";
    const int width = scanner.header_number("width", 1, std::numeric_limits<int>::max());
    const int height = scanner.header_number("height", 1, std::numeric_limits<int>::max());
    const int maxval = scanner.header_number("maximum gray value", 1, 65535);
    if (maxval > 255)
        throw ParseError(0, "graymap '" + path.string() + "' has a 16-bit range (maxval " +
                                std::to_string(maxval) + "); only 8-bit maps are supported");

    GrayImage img;
    img.width = width;
    img.height = height;
    const std::size_t count = static_cast<std::size_t>(width) * height;
    img.pixels.reserve(count);

    if (binary) {
        scanner.consume_raster_separator();
        if (scanner.remaining() < count)
            throw ParseError(0, "graymap '" + path.string() + "' is truncated: expected " +
                                    std::to_string(count) + " raster bytes, found " +
                                    std::to_string(scanner.remaining()));
        const unsigned char* raster = reinterpret_cast<const unsigned char*>(scanner.raster());
        for (std::size_t i = 0; i < count; ++i) {
            if (raster[i] > maxval)
                throw ParseError(0, "graymap sample " + std::to_string(raster[i]) +
                                        " exceeds the declared maximum " +
                                        std::to_string(maxval));
            img.pixels.push_back(raster[i]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const int value = scanner.header_number("sample", 0, maxval);
            img.pixels.push_back(static_cast<std::uint8_t>(value));
        }
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool binary) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw std::invalid_argument("inconsistent image dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write graymap '" + path.string() + "'");
    out << (binary ? "P5" : "P2") << '\n'
        << image.width << ' ' << image.height << '\n'
        << 255 << '\n';
    if (binary) {
        out.write(reinterpret_cast<const char*>(image.pixels.data()),
                  static_cast<std::streamsize>(image.pixels.size()));
    } else {
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (x) out << ' ';
                out << static_cast<int>(image.at(x, y));
            }
            out << '\n';
        }
    }
    if (!out) throw Error("failed writing graymap '" + path.string() + "'");
}

} // namespace perfsum

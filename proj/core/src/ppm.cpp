#include "adl/ppm.hpp"

#include <fstream>

#include "adl/errors.hpp"

namespace adl {

namespace {

int read_token(std::istream& in, const std::string& file) {
    // Skips whitespace and '#' comments per the PNM spec.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw ParseError(file + ": truncated PPM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

}  // namespace

KeyFrameImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open " + path.string());

    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') {
        throw ParseError(path.string() + ": not a P6 PPM file");
    }

    KeyFrameImage img;
    img.width = read_token(in, path.string());
    img.height = read_token(in, path.string());
    const int maxval = read_token(in, path.string());
    if (img.width <= 0 || img.height <= 0 || maxval != 255) {
        throw ParseError(path.string() + ": unsupported PPM geometry/maxval");
    }

    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) {
        throw ParseError(path.string() + ": truncated PPM pixel data");
    }
    return img;
}

void write_ppm(const std::filesystem::path& path, const KeyFrameImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.rgb.data()),
              static_cast<std::streamsize>(image.rgb.size()));
}

}  // namespace adl

#include "shardq/pgm.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shardq {

namespace {

struct Cursor {
    const std::string& data;
    std::size_t pos = 0;
    std::vector<std::string>* comments;

    void skip_space_and_comments() {
        while (pos < data.size()) {
            char c = data[pos];
            if (c == '#') {
                std::size_t end = data.find('\n', pos);
                if (end == std::string::npos) end = data.size();
                if (comments) comments->push_back(data.substr(pos + 1, end - pos - 1));
                pos = end;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    int next_int() {
        skip_space_and_comments();
        if (pos >= data.size()) throw std::invalid_argument("truncated PGM header");
        std::size_t start = pos;
        while (pos < data.size() &&
               std::isdigit(static_cast<unsigned char>(data[pos])))
            ++pos;
        if (pos == start) throw std::invalid_argument("malformed PGM integer");
        return std::stoi(data.substr(start, pos - start));
    }
};

}  // namespace

PgmImage parse_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw std::invalid_argument("bad PGM magic");
    const bool binary = bytes[1] == '5';
    PgmImage img;
    Cursor cur{bytes, 2, &img.comments};
    img.width = cur.next_int();
    img.height = cur.next_int();
    img.maxval = cur.next_int();
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("bad PGM dimensions");
    if (img.maxval <= 0 || img.maxval > 65535)
        throw std::invalid_argument("PGM maxval out of range");

    const int n = img.size();
    img.pixels.reserve(static_cast<std::size_t>(n));
    if (binary) {
        // exactly one whitespace byte after maxval
        if (cur.pos >= bytes.size()) throw std::invalid_argument("truncated PGM");
        ++cur.pos;
        const int bytes_per = img.maxval > 255 ? 2 : 1;
        if (bytes.size() - cur.pos <
            static_cast<std::size_t>(n) * static_cast<std::size_t>(bytes_per))
            throw std::invalid_argument("truncated PGM payload");
        for (int i = 0; i < n; ++i) {
            if (bytes_per == 1) {
                img.pixels.push_back(
                    static_cast<unsigned char>(bytes[cur.pos + static_cast<std::size_t>(i)]));
            } else {
                unsigned hi = static_cast<unsigned char>(
                    bytes[cur.pos + 2 * static_cast<std::size_t>(i)]);
                unsigned lo = static_cast<unsigned char>(
                    bytes[cur.pos + 2 * static_cast<std::size_t>(i) + 1]);
                img.pixels.push_back(static_cast<int>(hi << 8 | lo));
            }
        }
    } else {
        for (int i = 0; i < n; ++i) img.pixels.push_back(cur.next_int());
    }
    for (int v : img.pixels)
        if (v < 0 || v > img.maxval)
            throw std::invalid_argument("PGM sample exceeds maxval");
    return img;
}

std::string write_pgm(const PgmImage& image, bool binary, bool keep_comments) {
    if (image.size() != static_cast<int>(image.pixels.size()))
        throw std::invalid_argument("pixel count mismatch");
    std::ostringstream out;
    out << (binary ? "P5" : "P2") << "\n";
    if (keep_comments)
        for (const auto& c : image.comments) out << '#' << c << "\n";
    out << image.width << ' ' << image.height << "\n" << image.maxval << "\n";
    if (binary) {
        const int bytes_per = image.maxval > 255 ? 2 : 1;
        for (int v : image.pixels) {
            if (bytes_per == 2) out.put(static_cast<char>(v >> 8 & 0xff));
            out.put(static_cast<char>(v & 0xff));
        }
    } else {
        for (int i = 0; i < image.size(); ++i) {
            out << image.pixels[static_cast<std::size_t>(i)];
            out << ((i % image.width == image.width - 1) ? '\n' : ' ');
        }
    }
    return out.str();
}

PgmImage read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pgm(buf.str());
}

void write_pgm_file(const std::string& path, const PgmImage& image, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << write_pgm(image, binary);
}

}  // namespace shardq

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shardq {

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<int> pixels;  // row-major
    std::vector<std::string> comments;

    int size() const { return width * height; }
};

// P2 (ASCII) and P5 (binary) graymaps, maxval up to 65535 with two-byte
// big-endian samples. P5 output round-trips byte for byte.
PgmImage parse_pgm(const std::string& bytes);
std::string write_pgm(const PgmImage& image, bool binary = true,
                      bool keep_comments = true);

PgmImage read_pgm_file(const std::string& path);
void write_pgm_file(const std::string& path, const PgmImage& image,
                    bool binary = true);

}  // namespace shardq

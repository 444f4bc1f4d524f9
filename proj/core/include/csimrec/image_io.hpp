#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "csimrec/solver2d.hpp"

namespace csimrec {

// Grayscale image with real intensities, nominally in [0, 255].
// pixels is height x width (row = y).
struct GrayImage {
  Eigen::MatrixXd pixels;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
};

enum class PgmEncoding { kBinary, kAscii };  // P5, P2

// Reads P5 or P2 with maxval <= 255. Sample values are kept as stored.
GrayImage parse_pgm(const std::string& bytes);
GrayImage read_pgm(const std::filesystem::path& path);

// Clamps to [0, maxval=255] and rounds half away from zero.
std::string format_pgm(const GrayImage& image,
                       PgmEncoding encoding = PgmEncoding::kBinary);
void write_pgm(const GrayImage& image, const std::filesystem::path& path,
               PgmEncoding encoding = PgmEncoding::kBinary);

// Mask files are PGMs holding only 0 (missing) and 255 (observed).
Mask2D read_mask(const std::filesystem::path& path);
void write_mask(const Mask2D& mask, const std::filesystem::path& path);

}  // namespace csimrec

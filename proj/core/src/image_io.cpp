#include "csimrec/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "csimrec/errors.hpp"

namespace csimrec {

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  // Start of the most recently read number.
  std::size_t last() const { return last_; }

  bool at_separator() const {
    return pos_ < bytes_.size() &&
           (std::isspace(static_cast<unsigned char>(bytes_[pos_])) || bytes_[pos_] == '#');
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t begin = pos_;
    last_ = begin;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1L << 30) throw FormatError(std::string("PGM: ") + what + " too large", begin);
      ++pos_;
    }
    if (pos_ == begin) {
      throw FormatError(std::string("PGM: expected ") + what, begin);
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from binary raster data.
  void expect_single_space() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PGM: expected whitespace after header", pos_);
    }
    ++pos_;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_;
  std::size_t last_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading " + path.string());
  return bytes;
}

void dump(const std::string& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace

namespace {

// Parses a PGM; when offsets is non-null it receives the byte offset of every
// sample in raster order.
GrayImage parse_pgm_impl(const std::string& bytes, std::vector<std::size_t>* offsets) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw FormatError("PGM: missing P5/P2 magic", 0);
  }
  const bool binary = bytes[1] == '5';
  HeaderReader fields(bytes, 2);
  if (!fields.at_separator()) throw FormatError("PGM: malformed magic number", 2);
  const long width = fields.read_uint("width");
  if (width < 1) throw FormatError("PGM: width must be positive", fields.last());
  const long height = fields.read_uint("height");
  if (height < 1) throw FormatError("PGM: height must be positive", fields.last());
  const long maxval = fields.read_uint("maxval");
  if (maxval < 1 || maxval > 255) {
    throw FormatError("PGM: unsupported maxval " + std::to_string(maxval), fields.last());
  }

  GrayImage image;
  image.pixels.resize(height, width);
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (offsets) offsets->resize(count);
  auto store = [&](std::size_t i, long v, std::size_t at) {
    if (v > maxval) throw FormatError("PGM: sample exceeds maxval", at);
    image.pixels(static_cast<Eigen::Index>(i / static_cast<std::size_t>(width)),
                 static_cast<Eigen::Index>(i % static_cast<std::size_t>(width))) =
        static_cast<double>(v);
    if (offsets) (*offsets)[i] = at;
  };
  if (binary) {
    fields.expect_single_space();
    const std::size_t start = fields.pos();
    if (bytes.size() < start + count) {
      throw FormatError("PGM: truncated raster, expected " + std::to_string(count) +
                            " bytes",
                        bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      store(i, static_cast<unsigned char>(bytes[start + i]), start + i);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      fields.skip_space_and_comments();
      if (fields.pos() >= bytes.size()) {
        throw FormatError("PGM: truncated ASCII raster", bytes.size());
      }
      const std::size_t at = fields.pos();
      store(i, fields.read_uint("sample"), at);
    }
  }
  return image;
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes) { return parse_pgm_impl(bytes, nullptr); }

GrayImage read_pgm(const std::filesystem::path& path) {
  try {
    return parse_pgm(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

std::string format_pgm(const GrayImage& image, PgmEncoding encoding) {
  if (image.pixels.size() == 0) throw ParameterError("format_pgm: empty image");
  std::ostringstream os;
  os << (encoding == PgmEncoding::kBinary ? "P5" : "P2") << '\n'
     << image.width() << ' ' << image.height() << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + static_cast<std::size_t>(image.pixels.size()) * 4);
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      const double v = image.pixels(r, c);
      if (!std::isfinite(v)) throw ParameterError("format_pgm: non-finite pixel");
      const long q = std::lround(std::clamp(v, 0.0, 255.0));
      if (encoding == PgmEncoding::kBinary) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
      } else {
        out += std::to_string(q);
        out.push_back(c + 1 == image.width() ? '\n' : ' ');
      }
    }
  }
  return out;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path,
               PgmEncoding encoding) {
  dump(format_pgm(image, encoding), path);
}

Mask2D read_mask(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  std::vector<std::size_t> offsets;
  GrayImage image;
  try {
    image = parse_pgm_impl(bytes, &offsets);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
  Eigen::MatrixXd grid(image.height(), image.width());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      const double v = image.pixels(r, c);
      if (v != 0.0 && v != 255.0) {
        const auto i = static_cast<std::size_t>(r) * static_cast<std::size_t>(image.width()) +
                       static_cast<std::size_t>(c);
        throw FormatError(path.string() + ": mask values must be 0 or 255, found " +
                              std::to_string(static_cast<int>(v)),
                          offsets[i]);
      }
      grid(r, c) = v == 255.0 ? 1.0 : 0.0;
    }
  }
  return Mask2D(std::move(grid));
}

void write_mask(const Mask2D& mask, const std::filesystem::path& path) {
  GrayImage image;
  image.pixels = mask.grid() * 255.0;
  write_pgm(image, path);
}

}  // namespace csimrec

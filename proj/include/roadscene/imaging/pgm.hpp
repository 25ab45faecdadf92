#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <string>

#include "roadscene/error.hpp"
#include "roadscene/imaging/image.hpp"
#include "roadscene/io.hpp"

namespace roadscene::imaging {

namespace detail {

class PnmReader {
 public:
  explicit PnmReader(const std::string& data) : data_(data) {}

  std::size_t header_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    bool any = false;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(data_[pos_++] - '0');
      require(value < (1u << 20), ErrorCode::invalid_argument, "PGM header value too large");
      any = true;
    }
    require(any, ErrorCode::invalid_argument, "malformed PGM header");
    return value;
  }

  std::string magic() {
    require(data_.size() >= 2, ErrorCode::invalid_argument, "not a PGM file");
    pos_ = 2;
    return data_.substr(0, 2);
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    require(pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_])), ErrorCode::invalid_argument,
            "malformed PGM header");
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes binary (P5) or ASCII (P2) PGM with maxval <= 255.
inline GrayImage decode_pgm(const std::string& data) {
  detail::PnmReader reader(data);
  const std::string magic = reader.magic();
  require(magic == "P5" || magic == "P2", ErrorCode::invalid_argument, "unsupported image format '" + magic + "'");
  const std::size_t w = reader.header_number();
  const std::size_t h = reader.header_number();
  const std::size_t maxval = reader.header_number();
  require(w > 0 && h > 0, ErrorCode::invalid_argument, "PGM dimensions must be positive");
  require(maxval > 0 && maxval <= 255, ErrorCode::invalid_argument, "only 8-bit PGM is supported");
  GrayImage img(w, h);
  if (magic == "P5") {
    reader.skip_single_space();
    const std::size_t start = reader.position();
    require(data.size() - start >= w * h, ErrorCode::invalid_argument, "truncated PGM pixel data");
    for (std::size_t i = 0; i < w * h; ++i) img.pixels[i] = static_cast<std::uint8_t>(data[start + i]);
  } else {
    for (std::size_t i = 0; i < w * h; ++i) {
      const std::size_t v = reader.header_number();
      require(v <= maxval, ErrorCode::invalid_argument, "PGM sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

inline GrayImage load_pgm(const std::filesystem::path& path) { return decode_pgm(io::read_file(path)); }

inline void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
  io::write_file_atomic(path, encode_pgm(img));
}

/// Debug rendering of a mask as a binary PPM (road white, background black).
inline void save_mask_ppm(const std::filesystem::path& path, const BinaryMask& mask) {
  std::string out = "P6\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  for (auto b : mask.bits) out.append(3, b ? '\xff' : '\0');
  io::write_file_atomic(path, out);
}

}  // namespace roadscene::imaging

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "rainsim/raster.hpp"
#include "rainsim/rng.hpp"

namespace testutil {

// Unique scratch directory, removed (recursively) when the test block ends.
class ScopedTempDir {
 public:
  ScopedTempDir() {
    auto pattern =
        (std::filesystem::temp_directory_path() / "rainsim_test_XXXXXX").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = buf.data();
  }
  ~ScopedTempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScopedTempDir(const ScopedTempDir&) = delete;
  ScopedTempDir& operator=(const ScopedTempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline rainsim::ClearImage random_image(int width, int height, std::uint64_t seed) {
  rainsim::ClearImage img = rainsim::ClearImage::filled(width, height, 0.0f);
  rainsim::Rng rng(seed);
  for (auto& v : img.data) v = static_cast<float>(rng.next_double());
  return img;
}

inline rainsim::DepthMap random_depth(int width, int height, double lo, double hi,
                                      std::uint64_t seed) {
  std::vector<float> d(static_cast<std::size_t>(width) * height);
  rainsim::Rng rng(seed);
  for (auto& v : d) v = static_cast<float>(rng.uniform(lo, hi));
  return rainsim::DepthMap::from_values(width, height, std::move(d));
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline bool files_equal(const std::string& a, const std::string& b) {
  return read_file_bytes(a) == read_file_bytes(b);
}

// Rows are given top-to-bottom; the file stores them bottom-to-top as the
// format requires. A negative scale marks little-endian payloads.
inline void write_pfm(const std::string& path, int width, int height,
                      const std::vector<float>& rows_top_down,
                      bool little_endian = true) {
  if (rows_top_down.size() != static_cast<std::size_t>(width) * height) {
    throw std::runtime_error("write_pfm: size mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  out << "Pf\n" << width << " " << height << "\n"
      << (little_endian ? "-1.0" : "1.0") << "\n";
  for (int r = height - 1; r >= 0; --r) {
    for (int c = 0; c < width; ++c) {
      float v = rows_top_down[static_cast<std::size_t>(r) * width + c];
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      std::uint8_t bytes[4];
      if (little_endian) {
        bytes[0] = static_cast<std::uint8_t>(bits);
        bytes[1] = static_cast<std::uint8_t>(bits >> 8);
        bytes[2] = static_cast<std::uint8_t>(bits >> 16);
        bytes[3] = static_cast<std::uint8_t>(bits >> 24);
      } else {
        bytes[0] = static_cast<std::uint8_t>(bits >> 24);
        bytes[1] = static_cast<std::uint8_t>(bits >> 16);
        bytes[2] = static_cast<std::uint8_t>(bits >> 8);
        bytes[3] = static_cast<std::uint8_t>(bits);
      }
      out.write(reinterpret_cast<const char*>(bytes), 4);
    }
  }
  if (!out) throw std::runtime_error("write_pfm: write failed");
}

namespace detail {

inline void write_png(const std::string& path, int width, int height, int channels,
                      int bit_depth, const std::vector<std::uint16_t>& samples) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw std::runtime_error("cannot open " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("png write failed: " + path);
  }
  png_init_io(png, fp);
  int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, width, height, bit_depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  std::vector<std::uint8_t> row(stride * (bit_depth == 16 ? 2 : 1));
  for (int r = 0; r < height; ++r) {
    const std::uint16_t* src = samples.data() + static_cast<std::size_t>(r) * stride;
    if (bit_depth == 16) {
      for (std::size_t i = 0; i < stride; ++i) {
        row[2 * i] = static_cast<std::uint8_t>(src[i] >> 8);
        row[2 * i + 1] = static_cast<std::uint8_t>(src[i]);
      }
    } else {
      for (std::size_t i = 0; i < stride; ++i) {
        row[i] = static_cast<std::uint8_t>(src[i]);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace detail

inline void write_png16_gray(const std::string& path, int width, int height,
                             const std::vector<std::uint16_t>& samples) {
  detail::write_png(path, width, height, 1, 16, samples);
}

inline void write_png8_gray(const std::string& path, int width, int height,
                            const std::vector<std::uint16_t>& samples) {
  detail::write_png(path, width, height, 1, 8, samples);
}

inline void write_png16_rgb(const std::string& path, int width, int height,
                            const std::vector<std::uint16_t>& samples) {
  detail::write_png(path, width, height, 3, 16, samples);
}

}  // namespace testutil

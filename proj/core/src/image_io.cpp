#include "rainsim/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rainsim {

namespace {

std::runtime_error io_error(const std::filesystem::path& path, const std::string& what) {
  return std::runtime_error(path.string() + ": " + what);
}

struct FileHandle {
  FILE* fp = nullptr;
  explicit FileHandle(const std::filesystem::path& path, const char* mode)
      : fp(std::fopen(path.string().c_str(), mode)) {}
  ~FileHandle() {
    if (fp) std::fclose(fp);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

// Reads the whole PNG into 16-bit-per-sample host values (8-bit codes are
// returned as-is, not rescaled). Fills dims, channel count and bit depth.
struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;  // row-major, channel-interleaved
};

RawPng read_png(const std::filesystem::path& path) {
  FileHandle file(path, "rb");
  if (!file.fp) throw io_error(path, "cannot open file");

  png_byte header[8];
  if (std::fread(header, 1, 8, file.fp) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw io_error(path, "not a PNG file");
  }

  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw io_error(path, "png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw io_error(path, "png_create_info_struct failed");

  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(r.png))) {
    throw io_error(path, "PNG decode error");
  }

  png_init_io(r.png, file.fp);
  png_set_sig_bytes(r.png, 8);
  png_read_info(r.png, r.info);

  const png_uint_32 width = png_get_image_width(r.png, r.info);
  const png_uint_32 height = png_get_image_height(r.png, r.info);
  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int color_type = png_get_color_type(r.png, r.info);

  if (width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20) {
    throw io_error(path, "unreasonable PNG dimensions");
  }
  if (bit_depth != 8 && bit_depth != 16) {
    throw io_error(path, "unsupported bit depth " + std::to_string(bit_depth) +
                             " (want 8 or 16)");
  }
  if (color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_GRAY) {
    throw io_error(path, "unsupported channel layout (want plain RGB or grayscale)");
  }

  png_read_update_info(r.png, r.info);
  const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);

  RawPng out;
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  out.bit_depth = bit_depth;
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);

  const std::size_t per_row = static_cast<std::size_t>(out.width) * out.channels;
  for (int y = 0; y < out.height; ++y) {
    const png_bytep src = rows[static_cast<std::size_t>(y)];
    std::uint16_t* dst = out.samples.data() + static_cast<std::size_t>(y) * per_row;
    if (bit_depth == 8) {
      for (std::size_t i = 0; i < per_row; ++i) dst[i] = src[i];
    } else {
      // PNG 16-bit samples are big-endian in the file.
      for (std::size_t i = 0; i < per_row; ++i) {
        dst[i] = static_cast<std::uint16_t>((src[2 * i] << 8) | src[2 * i + 1]);
      }
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, int width, int height,
               int channels, const std::vector<png_byte>& bytes) {
  FileHandle file(path, "wb");
  if (!file.fp) throw io_error(path, "cannot open file for writing");

  PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!w.png) throw io_error(path, "png_create_write_struct failed");
  w.info = png_create_info_struct(w.png);
  if (!w.info) throw io_error(path, "png_create_info_struct failed");

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * rowbytes);
  }

  if (setjmp(png_jmpbuf(w.png))) {
    throw io_error(path, "PNG encode error");
  }

  png_init_io(w.png, file.fp);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

// Clamp to [0,1] and quantize to an 8-bit code, rounding half away from
// zero so results do not depend on the platform's rounding mode.
png_byte quantize8(float v) {
  double x = static_cast<double>(v);
  if (!(x > 0.0)) x = 0.0;
  if (x > 1.0) x = 1.0;
  return static_cast<png_byte>(std::lround(x * 255.0));
}

struct PfmHeader {
  int width = 0;
  int height = 0;
  double scale = 0.0;  // sign encodes endianness
};

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  for (;;) {
    int c = in.get();
    if (c == EOF) return tok;
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      c = ' ';
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
}

DepthMap load_depth_pfm(const std::filesystem::path& path, double scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open file");

  const std::string magic = next_token(in);
  if (magic == "PF") {
    throw io_error(path, "color PFM not supported for depth (want grayscale 'Pf')");
  }
  if (magic != "Pf") throw io_error(path, "not a PFM file");

  PfmHeader h;
  try {
    h.width = std::stoi(next_token(in));
    h.height = std::stoi(next_token(in));
    h.scale = std::stod(next_token(in));
  } catch (const std::exception&) {
    throw io_error(path, "malformed PFM header");
  }
  if (h.width <= 0 || h.height <= 0 || h.scale == 0.0) {
    throw io_error(path, "malformed PFM header");
  }

  const bool file_little = h.scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;

  const std::size_t count = static_cast<std::size_t>(h.width) * h.height;
  std::vector<float> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw io_error(path, "truncated PFM pixel data");
  }

  if (file_little != host_little) {
    for (float& f : raw) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8) |
          ((u & 0x0000ff00u) << 8) | ((u & 0x000000ffu) << 24);
      std::memcpy(&f, &u, 4);
    }
  }

  // PFM stores rows bottom to top.
  std::vector<float> depth(count);
  for (int y = 0; y < h.height; ++y) {
    const float* src = raw.data() + static_cast<std::size_t>(h.height - 1 - y) * h.width;
    float* dst = depth.data() + static_cast<std::size_t>(y) * h.width;
    for (int x = 0; x < h.width; ++x) {
      const double v = static_cast<double>(src[x]) * scale;
      if (!std::isfinite(v) || v < 0.0) {
        throw io_error(path, "invalid depth sample at row " + std::to_string(y) +
                                 ", col " + std::to_string(x));
      }
      dst[x] = static_cast<float>(v);
    }
  }
  return DepthMap::from_values(h.width, h.height, std::move(depth));
}

bool looks_like_pfm(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pfm") return true;
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  return in && magic[0] == 'P' && (magic[1] == 'f' || magic[1] == 'F');
}

}  // namespace

ClearImage load_image(const std::filesystem::path& path) {
  const RawPng raw = read_png(path);
  if (raw.channels != 3) {
    throw io_error(path, "image must be RGB (got grayscale)");
  }
  const double full_scale = raw.bit_depth == 8 ? 255.0 : 65535.0;
  ClearImage img;
  img.width = raw.width;
  img.height = raw.height;
  img.data.resize(raw.samples.size());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    img.data[i] = static_cast<float>(raw.samples[i] / full_scale);
  }
  return img;
}

DepthMap load_depth(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("load_depth: scale must be positive and finite");
  }
  if (looks_like_pfm(path)) return load_depth_pfm(path, scale);

  const RawPng raw = read_png(path);
  if (raw.channels != 1 || raw.bit_depth != 16) {
    throw io_error(path, "depth PNG must be 16-bit grayscale");
  }
  std::vector<float> depth(raw.samples.size());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    depth[i] = static_cast<float>(raw.samples[i] * scale);
  }
  return DepthMap::from_values(raw.width, raw.height, std::move(depth));
}

void save_image(const ClearImage& image, const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.data.size() != image.pixel_count() * 3) {
    throw std::invalid_argument("save_image: malformed image");
  }
  std::vector<png_byte> bytes(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    if (!std::isfinite(image.data[i])) {
      throw std::invalid_argument("save_image: non-finite intensity at sample " +
                                  std::to_string(i));
    }
    bytes[i] = quantize8(image.data[i]);
  }
  write_png(path, image.width, image.height, 3, bytes);
}

void save_gray(const GrayRaster& raster, const std::filesystem::path& path) {
  if (raster.width <= 0 || raster.height <= 0 ||
      raster.data.size() != static_cast<std::size_t>(raster.width) * raster.height) {
    throw std::invalid_argument("save_gray: malformed raster");
  }
  std::vector<png_byte> bytes(raster.data.size());
  for (std::size_t i = 0; i < raster.data.size(); ++i) {
    if (!std::isfinite(raster.data[i])) {
      throw std::invalid_argument("save_gray: non-finite value at sample " +
                                  std::to_string(i));
    }
    bytes[i] = quantize8(raster.data[i]);
  }
  write_png(path, raster.width, raster.height, 1, bytes);
}

}  // namespace rainsim

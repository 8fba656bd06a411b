#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aertk/collapse.hpp"

namespace aertk {

enum class ImageFileFormat { BmpGray8, BmpRgb24, PgmRaw };

// Expected on-disk size for a given format and extent. The BMP_GRAY8 layout
// is 14 (file header) + 40 (info header) + 1024 (palette) + height rows of
// width padded up to a multiple of 4.
struct ImageFileSpec {
  ImageFileFormat format = ImageFileFormat::BmpGray8;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  static std::size_t bmp_rowstride(std::uint32_t width, std::uint32_t bytes_per_pixel) {
    return (static_cast<std::size_t>(width) * bytes_per_pixel + 3) / 4 * 4;
  }
  std::size_t expected_size_bytes() const;
};

// Serializes a 1-channel grid as an 8-bit paletted grayscale BMP:
//
//   file header   "BM", u32 file size, 4 reserved zero bytes,
//                 u32 pixel-data offset 1078
//   info header   u32 size 40, i32 width, i32 height (positive: rows are
//                 stored bottom-up), u16 planes 1, u16 bpp 8,
//                 u32 compression 0, u32 image size = height * rowstride,
//                 i32 2835 x/y pixels-per-meter, u32 256 palette colors,
//                 u32 0 important colors
//   palette       256 entries (i, i, i, 0), BGRA order
//   pixel data    rows bottom-up, each padded to a 4-byte multiple with zeros
//
// All integers little-endian.
std::vector<std::uint8_t> write_bmp_gray8(const PixelGrid8& grid);

// Reads 8-bit paletted BMPs with a grayscale palette (entry value is the
// mapped gray level) and uncompressed 24-bit BMPs (returned as planar RGB).
// Anything else - bad magic, compression, other bit depths, color palettes -
// is a DataError naming the reason. Top-down (negative height) files are
// accepted.
PixelGrid8 read_bmp(std::span<const std::uint8_t> bytes);

// Binary PGM: "P5\n<w> <h>\n255\n" followed by row-major top-down bytes.
std::vector<std::uint8_t> write_pgm(const PixelGrid8& grid);

// Reads binary (P5) PGM with maxval 255. Header comments are tolerated;
// anything else is a DataError naming the reason.
PixelGrid8 read_pgm(std::span<const std::uint8_t> bytes);

// Whole-file helpers; failures raise DataError with the path.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace aertk

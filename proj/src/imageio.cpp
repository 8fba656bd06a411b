#include "aertk/imageio.hpp"

#include <fstream>
#include <string>

#include "aertk/error.hpp"

namespace aertk {

namespace {

constexpr std::size_t kFileHeaderBytes = 14;
constexpr std::size_t kInfoHeaderBytes = 40;
constexpr std::size_t kPaletteBytes = 256 * 4;
constexpr std::uint32_t kGray8PixelOffset =
    kFileHeaderBytes + kInfoHeaderBytes + kPaletteBytes; // 1078
constexpr std::int32_t kPixelsPerMeter = 2835; // 72 dpi

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value & 0xFF));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((value >> shift) & 0xFF));
  }
}

void put_i32(std::vector<std::uint8_t>& out, std::int32_t value) {
  put_u32(out, static_cast<std::uint32_t>(value));
}

class ByteReader {
public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8(std::size_t offset) const {
    require(offset, 1);
    return bytes_[offset];
  }
  std::uint16_t u16(std::size_t offset) const {
    require(offset, 2);
    return static_cast<std::uint16_t>(bytes_[offset] | (bytes_[offset + 1] << 8));
  }
  std::uint32_t u32(std::size_t offset) const {
    require(offset, 4);
    return static_cast<std::uint32_t>(bytes_[offset]) |
           (static_cast<std::uint32_t>(bytes_[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes_[offset + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes_[offset + 3]) << 24);
  }
  std::int32_t i32(std::size_t offset) const {
    return static_cast<std::int32_t>(u32(offset));
  }
  std::size_t size() const { return bytes_.size(); }

  void require(std::size_t offset, std::size_t count) const {
    if (offset + count > bytes_.size()) {
      throw DataError("unsupported BMP: file truncated at offset " +
                      std::to_string(offset));
    }
  }

private:
  std::span<const std::uint8_t> bytes_;
};

void require_single_channel(const PixelGrid8& grid, const char* op) {
  if (grid.channels != 1) {
    throw ArgumentError(std::string(op) + " expects a 1-channel grid");
  }
  if (grid.width == 0 || grid.height == 0) {
    throw ArgumentError(std::string(op) + " expects a non-empty grid");
  }
}

} // namespace

std::size_t ImageFileSpec::expected_size_bytes() const {
  switch (format) {
    case ImageFileFormat::BmpGray8:
      return kFileHeaderBytes + kInfoHeaderBytes + kPaletteBytes +
             static_cast<std::size_t>(height) * bmp_rowstride(width, 1);
    case ImageFileFormat::BmpRgb24:
      return kFileHeaderBytes + kInfoHeaderBytes +
             static_cast<std::size_t>(height) * bmp_rowstride(width, 3);
    case ImageFileFormat::PgmRaw: {
      const std::string header = "P5\n" + std::to_string(width) + " " +
                                 std::to_string(height) + "\n255\n";
      return header.size() + static_cast<std::size_t>(width) * height;
    }
  }
  return 0;
}

std::vector<std::uint8_t> write_bmp_gray8(const PixelGrid8& grid) {
  require_single_channel(grid, "write_bmp_gray8");

  const std::size_t rowstride = ImageFileSpec::bmp_rowstride(grid.width, 1);
  const std::size_t file_size =
      kGray8PixelOffset + static_cast<std::size_t>(grid.height) * rowstride;

  std::vector<std::uint8_t> out;
  out.reserve(file_size);

  out.push_back('B');
  out.push_back('M');
  put_u32(out, static_cast<std::uint32_t>(file_size));
  put_u16(out, 0);
  put_u16(out, 0);
  put_u32(out, kGray8PixelOffset);

  put_u32(out, kInfoHeaderBytes);
  put_i32(out, static_cast<std::int32_t>(grid.width));
  put_i32(out, static_cast<std::int32_t>(grid.height)); // bottom-up
  put_u16(out, 1);
  put_u16(out, 8);
  put_u32(out, 0); // BI_RGB
  put_u32(out, static_cast<std::uint32_t>(grid.height * rowstride));
  put_i32(out, kPixelsPerMeter);
  put_i32(out, kPixelsPerMeter);
  put_u32(out, 256);
  put_u32(out, 0);

  for (std::uint32_t i = 0; i < 256; ++i) {
    out.push_back(static_cast<std::uint8_t>(i)); // blue
    out.push_back(static_cast<std::uint8_t>(i)); // green
    out.push_back(static_cast<std::uint8_t>(i)); // red
    out.push_back(0);
  }

  const std::size_t padding = rowstride - grid.width;
  for (std::uint32_t row = 0; row < grid.height; ++row) {
    const std::uint32_t y = grid.height - 1 - row;
    const std::uint8_t* src =
        grid.values.data() + static_cast<std::size_t>(y) * grid.width;
    out.insert(out.end(), src, src + grid.width);
    out.insert(out.end(), padding, 0);
  }
  return out;
}

PixelGrid8 read_bmp(std::span<const std::uint8_t> bytes) {
  const ByteReader reader(bytes);
  if (reader.size() < kFileHeaderBytes + kInfoHeaderBytes ||
      reader.u8(0) != 'B' || reader.u8(1) != 'M') {
    throw DataError("unsupported BMP: bad magic");
  }
  const std::uint32_t pixel_offset = reader.u32(10);
  const std::uint32_t info_size = reader.u32(14);
  if (info_size < kInfoHeaderBytes) {
    throw DataError("unsupported BMP: info header smaller than 40 bytes");
  }
  const std::int32_t raw_width = reader.i32(18);
  const std::int32_t raw_height = reader.i32(22);
  const std::uint16_t bpp = reader.u16(28);
  const std::uint32_t compression = reader.u32(30);

  if (raw_width <= 0 || raw_height == 0) {
    throw DataError("unsupported BMP: non-positive extent");
  }
  if (compression != 0) {
    throw DataError("unsupported BMP: compression " + std::to_string(compression));
  }
  if (bpp != 8 && bpp != 24) {
    throw DataError("unsupported BMP: " + std::to_string(bpp) + " bits per pixel");
  }

  const bool top_down = raw_height < 0;
  const std::uint32_t width = static_cast<std::uint32_t>(raw_width);
  const std::uint32_t height =
      static_cast<std::uint32_t>(top_down ? -raw_height : raw_height);

  PixelGrid8 grid;
  grid.width = width;
  grid.height = height;

  if (bpp == 8) {
    std::uint32_t palette_count = reader.u32(46);
    if (palette_count == 0) palette_count = 256;
    const std::size_t palette_offset = kFileHeaderBytes + info_size;
    std::vector<std::uint8_t> gray_of_index(palette_count);
    for (std::uint32_t i = 0; i < palette_count; ++i) {
      const std::uint8_t b = reader.u8(palette_offset + 4 * i);
      const std::uint8_t g = reader.u8(palette_offset + 4 * i + 1);
      const std::uint8_t r = reader.u8(palette_offset + 4 * i + 2);
      if (r != g || g != b) {
        throw DataError("unsupported BMP: non-grayscale palette entry " +
                        std::to_string(i));
      }
      gray_of_index[i] = r;
    }

    const std::size_t rowstride = ImageFileSpec::bmp_rowstride(width, 1);
    grid.channels = 1;
    grid.values.resize(grid.plane_size());
    for (std::uint32_t row = 0; row < height; ++row) {
      const std::uint32_t y = top_down ? row : height - 1 - row;
      const std::size_t row_offset = pixel_offset + row * rowstride;
      reader.require(row_offset, width);
      for (std::uint32_t x = 0; x < width; ++x) {
        const std::uint8_t index = reader.u8(row_offset + x);
        if (index >= palette_count) {
          throw DataError("unsupported BMP: pixel index " + std::to_string(index) +
                          " outside the palette");
        }
        grid.values[static_cast<std::size_t>(y) * width + x] = gray_of_index[index];
      }
    }
    return grid;
  }

  // 24-bit: BGR triplets, returned as planar RGB.
  const std::size_t rowstride = ImageFileSpec::bmp_rowstride(width, 3);
  grid.channels = 3;
  grid.values.resize(grid.plane_size() * 3);
  const std::size_t plane = grid.plane_size();
  for (std::uint32_t row = 0; row < height; ++row) {
    const std::uint32_t y = top_down ? row : height - 1 - row;
    const std::size_t row_offset = pixel_offset + row * rowstride;
    reader.require(row_offset, static_cast<std::size_t>(width) * 3);
    for (std::uint32_t x = 0; x < width; ++x) {
      const std::size_t pixel = static_cast<std::size_t>(y) * width + x;
      grid.values[pixel] = reader.u8(row_offset + 3 * x + 2);             // R
      grid.values[plane + pixel] = reader.u8(row_offset + 3 * x + 1);     // G
      grid.values[2 * plane + pixel] = reader.u8(row_offset + 3 * x);     // B
    }
  }
  return grid;
}

std::vector<std::uint8_t> write_pgm(const PixelGrid8& grid) {
  require_single_channel(grid, "write_pgm");
  const std::string header = "P5\n" + std::to_string(grid.width) + " " +
                             std::to_string(grid.height) + "\n255\n";
  std::vector<std::uint8_t> out;
  out.reserve(header.size() + grid.values.size());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), grid.values.begin(), grid.values.end());
  return out;
}

PixelGrid8 read_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto at_end = [&] { return pos >= bytes.size(); };
  const auto skip_space = [&] {
    while (!at_end()) {
      const std::uint8_t c = bytes[pos];
      if (c == '#') {
        while (!at_end() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto read_number = [&]() -> std::uint64_t {
    skip_space();
    if (at_end() || bytes[pos] < '0' || bytes[pos] > '9') {
      throw DataError("unsupported PGM: missing header number");
    }
    std::uint64_t value = 0;
    while (!at_end() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1u << 24) {
        throw DataError("unsupported PGM: header number out of range");
      }
      ++pos;
    }
    return value;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw DataError("unsupported PGM: bad magic");
  }
  pos = 2;
  const std::uint64_t width = read_number();
  const std::uint64_t height = read_number();
  const std::uint64_t maxval = read_number();
  if (width == 0 || height == 0) {
    throw DataError("unsupported PGM: empty extent");
  }
  if (maxval != 255) {
    throw DataError("unsupported PGM: maxval " + std::to_string(maxval));
  }
  if (at_end()) {
    throw DataError("unsupported PGM: missing pixel data");
  }
  ++pos; // the single whitespace byte after maxval

  const std::size_t pixel_count = static_cast<std::size_t>(width * height);
  if (bytes.size() - pos < pixel_count) {
    throw DataError("unsupported PGM: pixel data truncated");
  }

  PixelGrid8 grid;
  grid.width = static_cast<std::uint32_t>(width);
  grid.height = static_cast<std::uint32_t>(height);
  grid.channels = 1;
  grid.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + pixel_count));
  return grid;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw DataError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (file.bad()) {
    throw DataError("read failed for " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw DataError("cannot create " + path.string());
  }
  file.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!file) {
    throw DataError("write failed for " + path.string());
  }
}

} // namespace aertk

#pragma once

#include <cstdint>
#include <vector>

#include "aertk/events.hpp"

namespace aertk {

// COUNT tallies spikes per pixel; TIME_SUM adds up their timestamps.
enum class AccumulateMode { Count, TimeSum };

// Per-pixel totals for one pattern, row-major (index = y * width + x).
// Values are exact integers in both modes.
struct SpikeCountFrame {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  AccumulateMode mode = AccumulateMode::Count;
  std::vector<std::uint64_t> values;

  std::uint64_t at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// Per-pattern normalized intensities in [0, 1], row-major. Unless all_zero
// is set, the maximum intensity is exactly 1.
struct CollapsedImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> intensities;
  bool all_zero = false;

  double at(std::uint32_t x, std::uint32_t y) const {
    return intensities[static_cast<std::size_t>(y) * width + x];
  }
};

// 8-bit image with 1 or 3 planes. Storage is planar: plane c starts at
// c * width * height, rows top-down, row-major within a plane.
struct PixelGrid8 {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 1;
  std::vector<std::uint8_t> values;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * height;
  }
  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return values[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const PixelGrid8&) const = default;
};

enum class ResizeMethod { Nearest, Bilinear };

// Collapses a stream along time. COUNT: value = number of events at the
// pixel. TIME_SUM: value = sum of their timestamps. Dims come from the
// stream; an event outside them is an ArgumentError.
SpikeCountFrame accumulate(const EventStream& stream, AccumulateMode mode);

// Divides by the frame maximum, per pattern. An all-zero frame yields an
// all-zero image with the flag set instead of an error.
CollapsedImage normalize(const SpikeCountFrame& frame);

// 8-bit quantization: round(255 * intensity), ties away from zero.
PixelGrid8 quantize(const CollapsedImage& image);

// Samples at output pixel centers. NEAREST takes the source pixel at
// floor((i + 0.5) * src / dst); BILINEAR interpolates edge-clamped samples
// at the same centers and rounds half away from zero. Per channel.
PixelGrid8 resize(const PixelGrid8& grid, std::uint32_t out_w,
                  std::uint32_t out_h, ResizeMethod method);

// Real-valued variant used when resizing before quantization. Output is not
// re-normalized, so its maximum may fall below 1 under BILINEAR.
CollapsedImage resize(const CollapsedImage& image, std::uint32_t out_w,
                      std::uint32_t out_h, ResizeMethod method);

// 1-channel -> 3 identical planes.
PixelGrid8 replicate_channels(const PixelGrid8& grid);

// 3-channel -> 1: round(0.21 R + 0.72 G + 0.07 B), ties away from zero.
PixelGrid8 rgb_to_gray(const PixelGrid8& grid);

} // namespace aertk

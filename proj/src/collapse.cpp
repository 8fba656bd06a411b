#include "aertk/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aertk/error.hpp"

namespace aertk {

namespace {

std::uint8_t round_to_u8(double value) {
  const double rounded = std::round(value); // ties away from zero
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

// Source index of output pixel i under nearest sampling, in exact integer
// arithmetic: floor((i + 0.5) * src / dst).
std::uint32_t nearest_index(std::uint32_t i, std::uint32_t src, std::uint32_t dst) {
  const std::uint64_t numerator = (2ull * i + 1ull) * src;
  return static_cast<std::uint32_t>(numerator / (2ull * dst));
}

struct BilinearTap {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  double frac = 0.0;
};

BilinearTap bilinear_tap(std::uint32_t i, std::uint32_t src, std::uint32_t dst) {
  double pos = (static_cast<double>(i) + 0.5) * static_cast<double>(src) /
                   static_cast<double>(dst) -
               0.5;
  pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
  BilinearTap tap;
  tap.lo = static_cast<std::uint32_t>(pos);
  tap.hi = std::min(tap.lo + 1, src - 1);
  tap.frac = pos - static_cast<double>(tap.lo);
  return tap;
}

void check_output_dims(std::uint32_t out_w, std::uint32_t out_h) {
  if (out_w == 0 || out_h == 0) {
    throw ArgumentError("resize target must be at least 1x1");
  }
}

} // namespace

SpikeCountFrame accumulate(const EventStream& stream, AccumulateMode mode) {
  SpikeCountFrame frame;
  frame.width = stream.width;
  frame.height = stream.height;
  frame.mode = mode;
  frame.values.assign(static_cast<std::size_t>(stream.width) * stream.height, 0);
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& event = stream.events[i];
    if (event.x >= stream.width || event.y >= stream.height) {
      throw ArgumentError("event " + std::to_string(i) + " at (" +
                          std::to_string(event.x) + "," + std::to_string(event.y) +
                          ") lies outside the stream extent");
    }
    std::uint64_t& cell =
        frame.values[static_cast<std::size_t>(event.y) * stream.width + event.x];
    cell += (mode == AccumulateMode::Count) ? 1 : event.timestamp_us;
  }
  return frame;
}

CollapsedImage normalize(const SpikeCountFrame& frame) {
  CollapsedImage image;
  image.width = frame.width;
  image.height = frame.height;
  image.intensities.resize(frame.values.size());

  std::uint64_t max_value = 0;
  for (const std::uint64_t value : frame.values) {
    max_value = std::max(max_value, value);
  }
  if (max_value == 0) {
    std::fill(image.intensities.begin(), image.intensities.end(), 0.0);
    image.all_zero = true;
    return image;
  }
  for (std::size_t i = 0; i < frame.values.size(); ++i) {
    image.intensities[i] =
        static_cast<double>(frame.values[i]) / static_cast<double>(max_value);
  }
  return image;
}

PixelGrid8 quantize(const CollapsedImage& image) {
  PixelGrid8 grid;
  grid.width = image.width;
  grid.height = image.height;
  grid.channels = 1;
  grid.values.resize(image.intensities.size());
  for (std::size_t i = 0; i < image.intensities.size(); ++i) {
    grid.values[i] = round_to_u8(255.0 * image.intensities[i]);
  }
  return grid;
}

PixelGrid8 resize(const PixelGrid8& grid, std::uint32_t out_w,
                  std::uint32_t out_h, ResizeMethod method) {
  check_output_dims(out_w, out_h);
  PixelGrid8 out;
  out.width = out_w;
  out.height = out_h;
  out.channels = grid.channels;
  out.values.resize(static_cast<std::size_t>(out_w) * out_h * grid.channels);

  for (std::uint32_t c = 0; c < grid.channels; ++c) {
    const std::uint8_t* src = grid.values.data() + c * grid.plane_size();
    std::uint8_t* dst =
        out.values.data() + static_cast<std::size_t>(c) * out_w * out_h;
    for (std::uint32_t oy = 0; oy < out_h; ++oy) {
      for (std::uint32_t ox = 0; ox < out_w; ++ox) {
        std::uint8_t value;
        if (method == ResizeMethod::Nearest) {
          const std::uint32_t sx = nearest_index(ox, grid.width, out_w);
          const std::uint32_t sy = nearest_index(oy, grid.height, out_h);
          value = src[static_cast<std::size_t>(sy) * grid.width + sx];
        } else {
          const BilinearTap tx = bilinear_tap(ox, grid.width, out_w);
          const BilinearTap ty = bilinear_tap(oy, grid.height, out_h);
          const auto sample = [&](std::uint32_t x, std::uint32_t y) {
            return static_cast<double>(
                src[static_cast<std::size_t>(y) * grid.width + x]);
          };
          const double top = sample(tx.lo, ty.lo) * (1.0 - tx.frac) +
                             sample(tx.hi, ty.lo) * tx.frac;
          const double bottom = sample(tx.lo, ty.hi) * (1.0 - tx.frac) +
                                sample(tx.hi, ty.hi) * tx.frac;
          value = round_to_u8(top * (1.0 - ty.frac) + bottom * ty.frac);
        }
        dst[static_cast<std::size_t>(oy) * out_w + ox] = value;
      }
    }
  }
  return out;
}

CollapsedImage resize(const CollapsedImage& image, std::uint32_t out_w,
                      std::uint32_t out_h, ResizeMethod method) {
  check_output_dims(out_w, out_h);
  CollapsedImage out;
  out.width = out_w;
  out.height = out_h;
  out.intensities.resize(static_cast<std::size_t>(out_w) * out_h);

  for (std::uint32_t oy = 0; oy < out_h; ++oy) {
    for (std::uint32_t ox = 0; ox < out_w; ++ox) {
      double value;
      if (method == ResizeMethod::Nearest) {
        const std::uint32_t sx = nearest_index(ox, image.width, out_w);
        const std::uint32_t sy = nearest_index(oy, image.height, out_h);
        value = image.at(sx, sy);
      } else {
        const BilinearTap tx = bilinear_tap(ox, image.width, out_w);
        const BilinearTap ty = bilinear_tap(oy, image.height, out_h);
        const double top = image.at(tx.lo, ty.lo) * (1.0 - tx.frac) +
                           image.at(tx.hi, ty.lo) * tx.frac;
        const double bottom = image.at(tx.lo, ty.hi) * (1.0 - tx.frac) +
                              image.at(tx.hi, ty.hi) * tx.frac;
        value = top * (1.0 - ty.frac) + bottom * ty.frac;
      }
      out.intensities[static_cast<std::size_t>(oy) * out_w + ox] = value;
    }
  }
  out.all_zero = std::all_of(out.intensities.begin(), out.intensities.end(),
                             [](double v) { return v == 0.0; });
  return out;
}

PixelGrid8 replicate_channels(const PixelGrid8& grid) {
  if (grid.channels != 1) {
    throw ArgumentError("replicate_channels expects a 1-channel grid");
  }
  PixelGrid8 out;
  out.width = grid.width;
  out.height = grid.height;
  out.channels = 3;
  out.values.reserve(grid.values.size() * 3);
  for (int plane = 0; plane < 3; ++plane) {
    out.values.insert(out.values.end(), grid.values.begin(), grid.values.end());
  }
  return out;
}

PixelGrid8 rgb_to_gray(const PixelGrid8& grid) {
  if (grid.channels != 3) {
    throw ArgumentError("rgb_to_gray expects a 3-channel grid");
  }
  PixelGrid8 out;
  out.width = grid.width;
  out.height = grid.height;
  out.channels = 1;
  const std::size_t plane = grid.plane_size();
  out.values.resize(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    const double r = grid.values[i];
    const double g = grid.values[plane + i];
    const double b = grid.values[2 * plane + i];
    out.values[i] = round_to_u8(0.21 * r + 0.72 * g + 0.07 * b);
  }
  return out;
}

} // namespace aertk

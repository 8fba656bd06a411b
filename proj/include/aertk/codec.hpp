#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aertk/events.hpp"

namespace aertk {

// Binary layout of one event record, 5 bytes, big-endian interpretation:
//
//   byte 0              x coordinate (8 bits)
//   byte 1              y coordinate (8 bits)
//   byte 2, bit 7       polarity (1 = ON, 0 = OFF)
//   byte 2, bits 6..0   timestamp bits 22..16
//   byte 3              timestamp bits 15..8
//   byte 4              timestamp bits 7..0
//
// Files are bare concatenations of records, no header or footer. This is
// the container used by the public N-MNIST / N-CALTECH distributions.
inline constexpr std::size_t kEventRecordBytes = 5;
inline constexpr std::uint32_t kMaxTimestampUs = (1u << 23) - 1;
inline constexpr std::uint16_t kMaxEncodableCoord = 255;

struct StreamDims {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// Decodes one 5-byte record. Throws DataError unless record is exactly
// kEventRecordBytes long.
Event decode_event(std::span<const std::uint8_t> record);

// Decodes a whole stream. The byte count must be a multiple of 5 (DataError
// otherwise, "truncated"). Events keep file order. When dims is absent the
// extent is inferred as max coordinate + 1 per axis (1x1 for an empty
// stream); when present, any event outside it is a DataError.
EventStream decode_stream(std::span<const std::uint8_t> bytes,
                          std::optional<StreamDims> dims = std::nullopt);

// Exact inverse of decode_stream. Throws ArgumentError naming the first
// event whose x, y, or timestamp overflows the record fields.
std::vector<std::uint8_t> encode_stream(const EventStream& stream);

// Report-only stream statistics; never throws.
struct ValidationReport {
  std::size_t event_count = 0;
  // t_last - t_first over the whole event set; 0 with fewer than 2 events.
  std::uint32_t duration_us = 0;
  // Adjacent pairs whose timestamps decrease.
  std::size_t timestamp_inversions = 0;
  std::size_t on_count = 0;
  std::size_t off_count = 0;
  // Events with x >= width or y >= height.
  std::size_t bounds_violations = 0;
};

ValidationReport validate_stream(const EventStream& stream);

} // namespace aertk

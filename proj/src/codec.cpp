#include "aertk/codec.hpp"

#include <string>

#include "aertk/error.hpp"

namespace aertk {

Event decode_event(std::span<const std::uint8_t> record) {
  if (record.size() != kEventRecordBytes) {
    throw DataError("malformed record: expected 5 bytes, got " +
                    std::to_string(record.size()));
  }
  Event event;
  event.x = record[0];
  event.y = record[1];
  event.polarity = (record[2] & 0x80u) ? Polarity::On : Polarity::Off;
  event.timestamp_us = (static_cast<std::uint32_t>(record[2] & 0x7Fu) << 16) |
                       (static_cast<std::uint32_t>(record[3]) << 8) |
                       static_cast<std::uint32_t>(record[4]);
  return event;
}

EventStream decode_stream(std::span<const std::uint8_t> bytes,
                          std::optional<StreamDims> dims) {
  if (bytes.size() % kEventRecordBytes != 0) {
    throw DataError("truncated stream: " + std::to_string(bytes.size()) +
                    " bytes is not a multiple of 5");
  }
  EventStream stream;
  const std::size_t count = bytes.size() / kEventRecordBytes;
  stream.events.reserve(count);

  std::uint32_t max_x = 0;
  std::uint32_t max_y = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Event event = decode_event(bytes.subspan(i * kEventRecordBytes, kEventRecordBytes));
    if (dims && (event.x >= dims->width || event.y >= dims->height)) {
      throw DataError("event " + std::to_string(i) + " at (" +
                      std::to_string(event.x) + "," + std::to_string(event.y) +
                      ") is outside the declared " + std::to_string(dims->width) +
                      "x" + std::to_string(dims->height) + " extent");
    }
    max_x = std::max<std::uint32_t>(max_x, event.x);
    max_y = std::max<std::uint32_t>(max_y, event.y);
    stream.events.push_back(event);
  }

  if (dims) {
    stream.width = dims->width;
    stream.height = dims->height;
  } else {
    stream.width = stream.events.empty() ? 1 : max_x + 1;
    stream.height = stream.events.empty() ? 1 : max_y + 1;
  }
  return stream;
}

std::vector<std::uint8_t> encode_stream(const EventStream& stream) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(stream.events.size() * kEventRecordBytes);
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& event = stream.events[i];
    if (event.x > kMaxEncodableCoord || event.y > kMaxEncodableCoord) {
      throw ArgumentError("encode overflow at event " + std::to_string(i) +
                          ": coordinate (" + std::to_string(event.x) + "," +
                          std::to_string(event.y) + ") exceeds 255");
    }
    if (event.timestamp_us > kMaxTimestampUs) {
      throw ArgumentError("encode overflow at event " + std::to_string(i) +
                          ": timestamp " + std::to_string(event.timestamp_us) +
                          " exceeds 2^23-1");
    }
    bytes.push_back(static_cast<std::uint8_t>(event.x));
    bytes.push_back(static_cast<std::uint8_t>(event.y));
    std::uint8_t b2 = static_cast<std::uint8_t>((event.timestamp_us >> 16) & 0x7Fu);
    if (event.polarity == Polarity::On) {
      b2 |= 0x80u;
    }
    bytes.push_back(b2);
    bytes.push_back(static_cast<std::uint8_t>((event.timestamp_us >> 8) & 0xFFu));
    bytes.push_back(static_cast<std::uint8_t>(event.timestamp_us & 0xFFu));
  }
  return bytes;
}

ValidationReport validate_stream(const EventStream& stream) {
  ValidationReport report;
  report.event_count = stream.events.size();
  if (stream.events.size() >= 2) {
    report.duration_us = stream.t_last() - stream.t_first();
  }
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& event = stream.events[i];
    if (event.polarity == Polarity::On) {
      ++report.on_count;
    } else {
      ++report.off_count;
    }
    if (event.x >= stream.width || event.y >= stream.height) {
      ++report.bounds_violations;
    }
    if (i > 0 && event.timestamp_us < stream.events[i - 1].timestamp_us) {
      ++report.timestamp_inversions;
    }
  }
  return report;
}

} // namespace aertk

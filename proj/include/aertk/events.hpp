#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace aertk {

// ON marks a brightness increase at a pixel, OFF a decrease.
enum class Polarity : std::uint8_t { Off = 0, On = 1 };

// One address-event: a spike at pixel (x, y) at a microsecond timestamp.
// Coordinates are stored wider than the 8-bit on-disk fields so synthetic
// streams can exceed sensor extents; the codec rejects them on encode.
struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity polarity = Polarity::Off;
  std::uint32_t timestamp_us = 0;

  bool operator==(const Event&) const = default;
};

// An ordered sequence of events from one recorded pattern.
// Every event is expected to satisfy x < width and y < height; violations
// are reported by validate_stream rather than enforced here. Timestamps may
// be non-monotonic (real recordings contain jitter).
struct EventStream {
  std::vector<Event> events;
  std::uint32_t width = 1;
  std::uint32_t height = 1;
  std::string source_id;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  // Earliest timestamp in the stream, 0 if empty.
  std::uint32_t t_first() const {
    if (events.empty()) return 0;
    auto it = std::min_element(events.begin(), events.end(),
                               [](const Event& a, const Event& b) {
                                 return a.timestamp_us < b.timestamp_us;
                               });
    return it->timestamp_us;
  }

  // Latest timestamp in the stream, 0 if empty. Defined over the whole
  // event set (not the final record) so it is stable under jitter.
  std::uint32_t t_last() const {
    if (events.empty()) return 0;
    auto it = std::max_element(events.begin(), events.end(),
                               [](const Event& a, const Event& b) {
                                 return a.timestamp_us < b.timestamp_us;
                               });
    return it->timestamp_us;
  }
};

} // namespace aertk

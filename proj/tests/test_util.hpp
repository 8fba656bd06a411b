#pragma once

// Shared helpers for the test binaries.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "aertk/events.hpp"
#include "aertk/rng.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.  The tag only makes the
// directory name recognizable when debugging leftovers; uniqueness comes from
// the random nonce and counter.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "scratch") {
    static std::atomic<std::uint64_t> counter{0};
    std::random_device device;
    const std::uint64_t nonce =
        (static_cast<std::uint64_t>(device()) << 20) ^ counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("aertk-test-" + tag + "-" + std::to_string(nonce));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random in-range stream: coordinates within dims (encodable), timestamps
// within the 23-bit field, mixed polarity.
inline aertk::EventStream random_stream(aertk::Rng& rng, std::size_t max_events = 64) {
  aertk::EventStream stream;
  stream.width = 1 + static_cast<std::uint32_t>(rng.bounded(64));
  stream.height = 1 + static_cast<std::uint32_t>(rng.bounded(64));
  const std::size_t count = rng.bounded(max_events + 1);
  stream.events.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    aertk::Event event;
    event.x = static_cast<std::uint16_t>(rng.bounded(stream.width));
    event.y = static_cast<std::uint16_t>(rng.bounded(stream.height));
    event.polarity = rng.bounded(2) ? aertk::Polarity::On : aertk::Polarity::Off;
    event.timestamp_us = static_cast<std::uint32_t>(rng.bounded(1u << 23));
    stream.events.push_back(event);
  }
  return stream;
}

} // namespace testutil

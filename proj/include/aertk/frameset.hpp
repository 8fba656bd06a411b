#pragma once

// Bridges collapsed image files and the probe: loads every frame named by a
// manifest into flat feature rows and maps categories to class indices.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "aertk/dataset.hpp"
#include "aertk/matrix.hpp"

namespace aertk {

struct FrameDataset {
  Matrix x_train;             // one row per frame, pixels scaled to [0, 1]
  std::vector<int> y_train;
  Matrix x_val;
  std::vector<int> y_val;
  std::vector<std::string> class_names; // sorted; position == label index
  std::uint32_t frame_width = 0;
  std::uint32_t frame_height = 0;
};

// Loads each manifest entry from frames_root / entry.path. Extensions .bmp
// and .pgm select the reader; 3-channel images are converted to grayscale
// first. Every frame must share one extent - a mismatch is a DataError
// naming the offending file.
FrameDataset load_frames(const DatasetManifest& manifest,
                         const std::filesystem::path& frames_root);

} // namespace aertk

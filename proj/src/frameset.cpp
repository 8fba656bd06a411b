#include "aertk/frameset.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "aertk/collapse.hpp"
#include "aertk/error.hpp"
#include "aertk/imageio.hpp"

namespace aertk {

namespace {

std::string lower_extension(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

PixelGrid8 read_frame(const std::filesystem::path& path,
                      const std::string& extension) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  PixelGrid8 grid;
  if (extension == ".bmp") {
    grid = read_bmp(bytes);
  } else if (extension == ".pgm") {
    grid = read_pgm(bytes);
  } else {
    throw DataError("unsupported frame extension '" + extension + "' for " +
                    path.string());
  }
  if (grid.channels == 3) {
    grid = rgb_to_gray(grid);
  }
  return grid;
}

} // namespace

FrameDataset load_frames(const DatasetManifest& manifest,
                         const std::filesystem::path& frames_root) {
  if (manifest.entries.empty()) {
    throw DataError("manifest has no entries");
  }

  FrameDataset dataset;
  for (const ManifestEntry& entry : manifest.entries) {
    dataset.class_names.push_back(entry.category);
  }
  std::sort(dataset.class_names.begin(), dataset.class_names.end());
  dataset.class_names.erase(
      std::unique(dataset.class_names.begin(), dataset.class_names.end()),
      dataset.class_names.end());

  std::size_t train_count = 0;
  std::size_t val_count = 0;
  for (const ManifestEntry& entry : manifest.entries) {
    (entry.split == Split::Train ? train_count : val_count) += 1;
  }

  std::size_t train_row = 0;
  std::size_t val_row = 0;
  dataset.y_train.resize(train_count);
  dataset.y_val.resize(val_count);

  for (const ManifestEntry& entry : manifest.entries) {
    const std::filesystem::path path = frames_root / entry.path;
    const PixelGrid8 grid = read_frame(path, lower_extension(entry.path));

    if (dataset.frame_width == 0) {
      dataset.frame_width = grid.width;
      dataset.frame_height = grid.height;
      const std::size_t dim =
          static_cast<std::size_t>(grid.width) * grid.height;
      dataset.x_train = Matrix(train_count, dim);
      dataset.x_val = Matrix(val_count, dim);
    } else if (grid.width != dataset.frame_width ||
               grid.height != dataset.frame_height) {
      throw DataError("frame extent " + std::to_string(grid.width) + "x" +
                      std::to_string(grid.height) + " for " + path.string() +
                      " does not match " + std::to_string(dataset.frame_width) +
                      "x" + std::to_string(dataset.frame_height));
    }

    const int label = static_cast<int>(
        std::lower_bound(dataset.class_names.begin(), dataset.class_names.end(),
                         entry.category) -
        dataset.class_names.begin());

    double* row = nullptr;
    if (entry.split == Split::Train) {
      row = dataset.x_train.row(train_row);
      dataset.y_train[train_row] = label;
      ++train_row;
    } else {
      row = dataset.x_val.row(val_row);
      dataset.y_val[val_row] = label;
      ++val_row;
    }
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      row[i] = static_cast<double>(grid.values[i]) / 255.0;
    }
  }
  return dataset;
}

} // namespace aertk

#include "aertk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include "aertk/error.hpp"
#include "aertk/rng.hpp"

namespace aertk {

namespace {

// In-place Fisher-Yates with our fixed bounded-draw derivation, so the
// permutation is identical on every platform for a given seed.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

} // namespace

std::vector<CorpusFile> scan_corpus(const std::filesystem::path& root,
                                    const std::set<std::string>& extensions) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw DataError("corpus root not found: " + root.string());
  }

  std::vector<CorpusFile> files;
  for (const fs::directory_entry& category_entry : fs::directory_iterator(root)) {
    if (!category_entry.is_directory()) continue;
    const std::string category = category_entry.path().filename().string();
    for (const fs::directory_entry& file_entry :
         fs::directory_iterator(category_entry.path())) {
      if (!file_entry.is_regular_file()) continue;
      const std::string extension = file_entry.path().extension().string();
      if (!extensions.contains(extension)) continue;
      files.push_back(
          {category, category + "/" + file_entry.path().filename().string()});
    }
  }

  if (files.empty()) {
    throw DataError("empty corpus: no matching files under " + root.string());
  }
  std::sort(files.begin(), files.end(),
            [](const CorpusFile& a, const CorpusFile& b) { return a.path < b.path; });
  return files;
}

DatasetManifest split_corpus(const std::vector<CorpusFile>& entries,
                             const SplitConfig& config) {
  if (!(config.val_fraction > 0.0 && config.val_fraction < 1.0)) {
    throw ArgumentError("val_fraction must lie in (0, 1)");
  }

  std::map<std::string, std::vector<std::string>> by_category;
  std::unordered_set<std::string> seen_paths;
  for (const CorpusFile& entry : entries) {
    if (entry.category.empty()) {
      throw ArgumentError("corpus entry with empty category: " + entry.path);
    }
    if (!seen_paths.insert(entry.path).second) {
      throw ArgumentError("duplicate corpus path: " + entry.path);
    }
    by_category[entry.category].push_back(entry.path);
  }

  // Validation membership per path. The per-category shuffle is seeded from
  // the global seed and the category name, so assignments do not depend on
  // the order categories are visited in.
  std::unordered_set<std::string> val_paths;
  for (auto& [category, paths] : by_category) {
    if (paths.size() < 2) {
      throw ArgumentError("split infeasible: category '" + category +
                          "' has fewer than 2 entries");
    }
    std::sort(paths.begin(), paths.end());
    const double exact = config.val_fraction * static_cast<double>(paths.size());
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(exact)));

    std::vector<std::string> shuffled = paths;
    Rng rng(mix_seed(config.seed, fnv1a64(category)));
    deterministic_shuffle(shuffled, rng);
    for (std::size_t i = 0; i < n_val && i < shuffled.size(); ++i) {
      val_paths.insert(shuffled[i]);
    }
  }

  DatasetManifest manifest;
  manifest.entries.reserve(entries.size());
  for (const CorpusFile& entry : entries) {
    manifest.entries.push_back({entry.path, entry.category,
                                val_paths.contains(entry.path) ? Split::Val
                                                               : Split::Train});
  }
  return manifest;
}

std::string write_manifest(const DatasetManifest& manifest) {
  std::string text = "path,category,split\n";
  for (const ManifestEntry& entry : manifest.entries) {
    text += entry.path;
    text += ',';
    text += entry.category;
    text += ',';
    text += entry.split == Split::Val ? "val" : "train";
    text += '\n';
  }
  return text;
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
  const std::string text = write_manifest(manifest);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw DataError("cannot create " + path.string());
  }
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) {
    throw DataError("write failed for " + path.string());
  }
}

DatasetManifest read_manifest(std::string_view text) {
  DatasetManifest manifest;
  std::size_t line_number = 0;
  std::size_t position = 0;
  while (position < text.size()) {
    std::size_t end = text.find('\n', position);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(position, end - position);
    position = end + 1;
    ++line_number;

    if (line.empty()) continue;
    if (line_number == 1) {
      if (line != "path,category,split") {
        throw DataError("manifest parse error at line 1: bad header");
      }
      continue;
    }

    const std::size_t first = line.find(',');
    const std::size_t second =
        first == std::string_view::npos ? std::string_view::npos
                                        : line.find(',', first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos ||
        line.find(',', second + 1) != std::string_view::npos) {
      throw DataError("manifest parse error at line " + std::to_string(line_number) +
                      ": expected 3 comma-separated fields");
    }
    ManifestEntry entry;
    entry.path = std::string(line.substr(0, first));
    entry.category = std::string(line.substr(first + 1, second - first - 1));
    const std::string_view split = line.substr(second + 1);
    if (split == "train") {
      entry.split = Split::Train;
    } else if (split == "val") {
      entry.split = Split::Val;
    } else {
      throw DataError("manifest parse error at line " + std::to_string(line_number) +
                      ": unknown split '" + std::string(split) + "'");
    }
    if (entry.path.empty() || entry.category.empty()) {
      throw DataError("manifest parse error at line " + std::to_string(line_number) +
                      ": empty field");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (line_number == 0) {
    throw DataError("manifest parse error at line 1: missing header");
  }
  return manifest;
}

DatasetManifest read_manifest_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw DataError("cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  if (file.bad()) {
    throw DataError("read failed for " + path.string());
  }
  return read_manifest(text);
}

} // namespace aertk

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aertk {

enum class Split { Train, Val };

struct ManifestEntry {
  std::string path; // relative to the corpus root, unique within a manifest
  std::string category;
  Split split = Split::Train;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  bool operator==(const DatasetManifest&) const = default;
};

struct SplitConfig {
  double val_fraction = 0.15; // must lie in (0, 1)
  std::uint64_t seed = 0;
};

struct CorpusFile {
  std::string category;
  std::string path; // relative to the corpus root

  bool operator==(const CorpusFile&) const = default;
};

// Lists corpus files under root following the one-directory-per-category
// convention: root/<category>/<file>. Files nested deeper are ignored. Only
// extensions in the given set (with leading dot, e.g. ".bin") match. The
// result is sorted lexicographically by relative path. Missing root or an
// empty result is a DataError.
std::vector<CorpusFile> scan_corpus(const std::filesystem::path& root,
                                    const std::set<std::string>& extensions);

// Stratified split. Per category, n_val = max(1, round(val_fraction * n))
// with ties away from zero; members are chosen by a seeded deterministic
// shuffle of the category's sorted file list, so the same seed reproduces
// the manifest bit-for-bit. A category with fewer than 2 entries is an
// ArgumentError naming it.
DatasetManifest split_corpus(const std::vector<CorpusFile>& entries,
                             const SplitConfig& config);

// Text form: header "path,category,split", one row per entry, values
// train/val, "\n" line endings. Round-trips exactly.
std::string write_manifest(const DatasetManifest& manifest);

// Writes the text form to a file; failures raise DataError with the path.
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);

// Parses the text form; malformed rows raise DataError with the 1-based
// line number.
DatasetManifest read_manifest(std::string_view text);

// Reads and parses a manifest file.
DatasetManifest read_manifest_file(const std::filesystem::path& path);

} // namespace aertk

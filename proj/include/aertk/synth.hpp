#pragma once

// Deterministic synthetic event-stream generator. Serves two purposes:
// an exact, constructive oracle for the collapse pipeline (plant a spike
// count grid, regenerate it through accumulate) and a corpus factory for
// training tests (seeded blob templates plus per-sample noise).

#include <cstdint>
#include <filesystem>
#include <vector>

#include "aertk/dataset.hpp"
#include "aertk/events.hpp"

namespace aertk {

enum class PatternTiming {
  // Every pixel's spikes spread evenly over [0, duration): the i-th of c
  // spikes lands at floor(i * duration / c).
  UniformSpacing,
  // Timestamps 0,1,2,... assigned while scanning pixels row-major and
  // repeating the scan until every pixel has emitted its full count.
  RasterOrder,
};

// A target spike-count grid to plant into an event stream.
struct PlantedPattern {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<std::uint64_t> counts; // row-major, counts[y * width + x]
  int class_id = 0;
  PatternTiming timing = PatternTiming::RasterOrder;

  std::uint64_t total_count() const;
};

// Emits exactly counts[x, y] ON events per pixel, fully deterministically.
// duration_us must be at least the total spike count so that timestamps can
// stay distinct; violations raise an invalid-argument error.
EventStream generate_events(const PlantedPattern& pattern,
                            std::uint32_t duration_us);

struct CorpusConfig {
  std::size_t n_classes = 3; // at least 2
  std::size_t samples_per_class = 100;
  std::uint16_t width = 32;
  std::uint16_t height = 32;
  std::uint64_t seed = 0;
  // Amplitude of the per-sample uniform intensity perturbation, in [0, 1]
  // intensity units. 0 plants every sample exactly on its class template.
  double noise = 0.25;
  // Spike count planted at the brightest template pixel.
  std::uint64_t peak_count = 15;
  PatternTiming timing = PatternTiming::RasterOrder;
  std::uint32_t duration_us = 300000;
};

// Builds one base intensity template per class (seeded blobs; templates are
// regenerated with a derived seed until every pair differs in at least 10%
// of pixels), perturbs it per sample, and writes one headerless event file
// per sample under out_dir/<category>/<sample>.bin. A ground-truth manifest
// (every row marked train) is written to out_dir/truth.csv and returned.
DatasetManifest generate_corpus(const CorpusConfig& config,
                                const std::filesystem::path& out_dir);

} // namespace aertk

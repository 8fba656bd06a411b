#include "aertk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "aertk/codec.hpp"
#include "aertk/error.hpp"
#include "aertk/rng.hpp"

namespace aertk {

namespace {

void check_pattern(const PlantedPattern& pattern) {
  if (pattern.width == 0 || pattern.height == 0) {
    throw ArgumentError("pattern grid must be non-empty");
  }
  const std::size_t cells =
      static_cast<std::size_t>(pattern.width) * pattern.height;
  if (pattern.counts.size() != cells) {
    throw ArgumentError("pattern counts size " +
                        std::to_string(pattern.counts.size()) +
                        " does not match grid " + std::to_string(cells));
  }
}

struct ClassTemplate {
  std::vector<double> intensity;      // row-major, values in [0, 1]
  std::vector<std::uint64_t> counts;  // quantized at peak_count
};

ClassTemplate make_template(std::uint16_t width, std::uint16_t height,
                            std::uint64_t peak_count, std::uint64_t seed) {
  Rng rng(seed);
  ClassTemplate result;
  result.intensity.assign(static_cast<std::size_t>(width) * height, 0.0);

  // A few soft blobs; centers, radii and amplitudes all come from the seed.
  constexpr int kBlobs = 3;
  const double extent = static_cast<double>(std::min(width, height));
  for (int b = 0; b < kBlobs; ++b) {
    const double cx = rng.uniform() * width;
    const double cy = rng.uniform() * height;
    const double radius = (0.10 + 0.18 * rng.uniform()) * extent;
    const double amp = 0.6 + 0.4 * rng.uniform();
    const double denom = 2.0 * radius * radius;
    for (std::uint16_t y = 0; y < height; ++y) {
      for (std::uint16_t x = 0; x < width; ++x) {
        const double dx = (x + 0.5) - cx;
        const double dy = (y + 0.5) - cy;
        result.intensity[static_cast<std::size_t>(y) * width + x] +=
            amp * std::exp(-(dx * dx + dy * dy) / denom);
      }
    }
  }

  const double top =
      *std::max_element(result.intensity.begin(), result.intensity.end());
  result.counts.resize(result.intensity.size());
  for (std::size_t i = 0; i < result.intensity.size(); ++i) {
    double value = result.intensity[i] / top;
    if (value < 0.04) value = 0.0; // keep the background clean
    result.intensity[i] = value;
    result.counts[i] = static_cast<std::uint64_t>(
        std::llround(value * static_cast<double>(peak_count)));
  }
  return result;
}

// Fraction of grid cells whose quantized counts differ between two templates.
double differing_fraction(const ClassTemplate& a, const ClassTemplate& b) {
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    if (a.counts[i] != b.counts[i]) ++differing;
  }
  return static_cast<double>(differing) / static_cast<double>(a.counts.size());
}

std::string category_name(std::size_t class_index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "class_%03zu", class_index);
  return buffer;
}

std::string sample_name(std::size_t sample_index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "sample_%04zu.bin", sample_index);
  return buffer;
}

} // namespace

std::uint64_t PlantedPattern::total_count() const {
  std::uint64_t total = 0;
  for (const std::uint64_t c : counts) total += c;
  return total;
}

EventStream generate_events(const PlantedPattern& pattern,
                            std::uint32_t duration_us) {
  check_pattern(pattern);
  const std::uint64_t total = pattern.total_count();
  if (duration_us < total) {
    throw ArgumentError("duration " + std::to_string(duration_us) +
                        "us too small for " + std::to_string(total) +
                        " distinct timestamps");
  }

  EventStream stream;
  stream.width = pattern.width;
  stream.height = pattern.height;
  stream.source_id = "synth";
  stream.events.reserve(total);

  if (pattern.timing == PatternTiming::RasterOrder) {
    std::vector<std::uint64_t> remaining = pattern.counts;
    std::uint32_t t = 0;
    std::uint64_t emitted = 0;
    while (emitted < total) {
      for (std::uint16_t y = 0; y < pattern.height; ++y) {
        for (std::uint16_t x = 0; x < pattern.width; ++x) {
          std::uint64_t& left =
              remaining[static_cast<std::size_t>(y) * pattern.width + x];
          if (left == 0) continue;
          --left;
          ++emitted;
          stream.events.push_back({x, y, Polarity::On, t});
          ++t;
        }
      }
    }
  } else {
    for (std::uint16_t y = 0; y < pattern.height; ++y) {
      for (std::uint16_t x = 0; x < pattern.width; ++x) {
        const std::uint64_t count =
            pattern.counts[static_cast<std::size_t>(y) * pattern.width + x];
        for (std::uint64_t i = 0; i < count; ++i) {
          const std::uint32_t t = static_cast<std::uint32_t>(
              i * static_cast<std::uint64_t>(duration_us) / count);
          stream.events.push_back({x, y, Polarity::On, t});
        }
      }
    }
  }
  return stream;
}

DatasetManifest generate_corpus(const CorpusConfig& config,
                                const std::filesystem::path& out_dir) {
  if (config.n_classes < 2) {
    throw ArgumentError("corpus needs at least 2 classes");
  }
  if (config.samples_per_class == 0) {
    throw ArgumentError("samples_per_class must be at least 1");
  }
  if (config.width == 0 || config.height == 0) {
    throw ArgumentError("corpus grid must be non-empty");
  }
  if (config.peak_count == 0) {
    throw ArgumentError("peak_count must be at least 1");
  }
  if (config.noise < 0.0 || config.noise > 1.0) {
    throw ArgumentError("noise must lie in [0, 1]");
  }

  // Class templates, retried with a derived seed until pairwise distinct
  // in at least 10% of cells.
  const std::uint64_t template_root = mix_seed(config.seed, fnv1a64("template"));
  std::vector<ClassTemplate> templates;
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    constexpr int kMaxAttempts = 64;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      ClassTemplate candidate = make_template(
          config.width, config.height, config.peak_count,
          mix_seed(template_root, (static_cast<std::uint64_t>(c) << 16) |
                                      static_cast<std::uint64_t>(attempt)));
      const bool distinct =
          std::all_of(templates.begin(), templates.end(),
                      [&](const ClassTemplate& existing) {
                        return differing_fraction(existing, candidate) >= 0.10;
                      });
      if (distinct) {
        templates.push_back(std::move(candidate));
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw DataError("could not derive a distinct template for class " +
                      std::to_string(c));
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  const std::uint64_t sample_root = mix_seed(config.seed, fnv1a64("sample"));
  DatasetManifest manifest;
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    const std::string category = category_name(c);
    const std::filesystem::path class_dir = out_dir / category;
    std::filesystem::create_directories(class_dir, ec);
    if (ec) {
      throw DataError("cannot create " + class_dir.string() + ": " +
                      ec.message());
    }

    for (std::size_t s = 0; s < config.samples_per_class; ++s) {
      Rng rng(mix_seed(sample_root, (static_cast<std::uint64_t>(c) << 32) |
                                        static_cast<std::uint64_t>(s)));
      PlantedPattern pattern;
      pattern.width = config.width;
      pattern.height = config.height;
      pattern.class_id = static_cast<int>(c);
      pattern.timing = config.timing;
      pattern.counts.resize(templates[c].intensity.size());
      for (std::size_t i = 0; i < pattern.counts.size(); ++i) {
        double value = templates[c].intensity[i] +
                       config.noise * (2.0 * rng.uniform() - 1.0);
        value = std::clamp(value, 0.0, 1.0);
        pattern.counts[i] = static_cast<std::uint64_t>(
            std::llround(value * static_cast<double>(config.peak_count)));
      }

      const EventStream stream = generate_events(pattern, config.duration_us);
      const std::vector<std::uint8_t> bytes = encode_stream(stream);
      const std::filesystem::path path = class_dir / sample_name(s);
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        throw DataError("cannot write " + path.string());
      }
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      if (!out) {
        throw DataError("short write to " + path.string());
      }

      manifest.entries.push_back(
          {category + "/" + sample_name(s), category, Split::Train});
    }
  }

  write_manifest(manifest, out_dir / "truth.csv");
  return manifest;
}

} // namespace aertk

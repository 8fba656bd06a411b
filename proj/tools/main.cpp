// aertk: event-stream collapse toolkit.
//
// Subcommands: inspect, collapse, split, train, eval, synth. Output is
// line-oriented `key: value`. Exit codes: 0 success, 1 input/I-O error,
// 2 validation or configuration error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aertk/codec.hpp"
#include "aertk/collapse.hpp"
#include "aertk/dataset.hpp"
#include "aertk/error.hpp"
#include "aertk/event_ops.hpp"
#include "aertk/events.hpp"
#include "aertk/frameset.hpp"
#include "aertk/imageio.hpp"
#include "aertk/probe.hpp"
#include "aertk/synth.hpp"

namespace fs = std::filesystem;

namespace {

using namespace aertk;

struct Extent {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// "WxH", e.g. "32x32".
Extent parse_extent(const std::string& text) {
  const std::size_t cross = text.find_first_of("xX");
  if (cross == std::string::npos || cross == 0 || cross + 1 >= text.size()) {
    throw ArgumentError("expected WxH, got '" + text + "'");
  }
  Extent extent;
  try {
    extent.width = static_cast<std::uint32_t>(std::stoul(text.substr(0, cross)));
    extent.height = static_cast<std::uint32_t>(std::stoul(text.substr(cross + 1)));
  } catch (const std::exception&) {
    throw ArgumentError("expected WxH, got '" + text + "'");
  }
  if (extent.width == 0 || extent.height == 0) {
    throw ArgumentError("extent must be positive, got '" + text + "'");
  }
  return extent;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> indices;
  std::size_t position = 0;
  while (position <= text.size()) {
    std::size_t comma = text.find(',', position);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(position, comma - position);
    position = comma + 1;
    if (token.empty()) {
      throw ArgumentError("empty entry in index list '" + text + "'");
    }
    try {
      indices.push_back(std::stoul(token));
    } catch (const std::exception&) {
      throw ArgumentError("bad index '" + token + "'");
    }
    if (comma == text.size()) break;
  }
  return indices;
}

std::vector<std::size_t> parse_dim_list(const std::string& text) {
  if (text.empty() || text == "none") return {};
  std::vector<std::size_t> dims = parse_index_list(text);
  for (const std::size_t dim : dims) {
    if (dim == 0) throw ArgumentError("layer sizes must be positive");
  }
  return dims;
}

std::string format_double(double value, const char* spec) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, value);
  return buffer;
}

// ---------------------------------------------------------------- inspect

struct InspectOptions {
  std::string input;
  std::string dims;
};

int cmd_inspect(const InspectOptions& opt) {
  std::optional<StreamDims> dims;
  if (!opt.dims.empty()) {
    const Extent extent = parse_extent(opt.dims);
    dims = StreamDims{extent.width, extent.height};
  }
  const std::vector<std::uint8_t> bytes = read_file(opt.input);
  const EventStream stream = decode_stream(bytes, dims);
  const ValidationReport report = validate_stream(stream);

  std::cout << "events: " << report.event_count << '\n'
            << "width: " << stream.width << '\n'
            << "height: " << stream.height << '\n'
            << "duration_us: " << report.duration_us << '\n'
            << "on_events: " << report.on_count << '\n'
            << "off_events: " << report.off_count << '\n'
            << "timestamp_inversions: " << report.timestamp_inversions << '\n'
            << "bounds_violations: " << report.bounds_violations << '\n';
  return 0;
}

// --------------------------------------------------------------- collapse

struct CollapseOptions {
  std::string input;
  std::string output;
  std::string polarity = "on"; // on / off / both
  std::size_t windows = 3;
  std::size_t saccades = 0; // 0 = all windows; N = first N
  std::string select;       // explicit comma-separated window indices
  std::string mode = "count";
  std::string resize_spec; // WxH, empty = no resize
  std::string resize_method = "nearest";
  std::string order = "quantize-first"; // or resize-first
  std::string format = "bmp";
  std::string dims; // input extent override, WxH
  bool keep_going = false;
  std::size_t jobs = 0; // 0 = hardware concurrency
};

struct CollapsePlanned {
  std::optional<StreamDims> in_dims;
  Polarity polarity = Polarity::On;
  bool filter = true;
  std::vector<std::size_t> window_indices;
  AccumulateMode mode = AccumulateMode::Count;
  std::optional<Extent> resize_to;
  ResizeMethod method = ResizeMethod::Nearest;
  bool resize_first = false;
  bool pgm = false;
};

// All flag validation happens here, before any file is touched.
CollapsePlanned plan_collapse(const CollapseOptions& opt) {
  CollapsePlanned plan;
  if (opt.polarity == "on") {
    plan.polarity = Polarity::On;
  } else if (opt.polarity == "off") {
    plan.polarity = Polarity::Off;
  } else if (opt.polarity == "both") {
    plan.filter = false;
  } else {
    throw ArgumentError("polarity must be on, off or both");
  }

  if (opt.windows == 0) {
    throw ArgumentError("windows must be at least 1");
  }
  if (opt.saccades != 0 && !opt.select.empty()) {
    throw ArgumentError("--saccades and --select are mutually exclusive");
  }
  if (!opt.select.empty()) {
    plan.window_indices = parse_index_list(opt.select);
  } else {
    const std::size_t take = opt.saccades == 0 ? opt.windows : opt.saccades;
    for (std::size_t i = 0; i < take; ++i) plan.window_indices.push_back(i);
  }
  for (const std::size_t index : plan.window_indices) {
    if (index >= opt.windows) {
      throw ArgumentError("window index " + std::to_string(index) +
                          " outside 0.." + std::to_string(opt.windows - 1));
    }
  }

  if (opt.mode == "count") {
    plan.mode = AccumulateMode::Count;
  } else if (opt.mode == "time-sum") {
    plan.mode = AccumulateMode::TimeSum;
  } else {
    throw ArgumentError("mode must be count or time-sum");
  }

  if (!opt.resize_spec.empty()) {
    plan.resize_to = parse_extent(opt.resize_spec);
  }
  if (opt.resize_method == "nearest") {
    plan.method = ResizeMethod::Nearest;
  } else if (opt.resize_method == "bilinear") {
    plan.method = ResizeMethod::Bilinear;
  } else {
    throw ArgumentError("resize-method must be nearest or bilinear");
  }
  if (opt.order == "resize-first") {
    plan.resize_first = true;
  } else if (opt.order != "quantize-first") {
    throw ArgumentError("order must be quantize-first or resize-first");
  }

  if (opt.format == "pgm") {
    plan.pgm = true;
  } else if (opt.format != "bmp") {
    throw ArgumentError("format must be bmp or pgm");
  }

  if (!opt.dims.empty()) {
    const Extent extent = parse_extent(opt.dims);
    plan.in_dims = StreamDims{extent.width, extent.height};
  }
  return plan;
}

struct CollapseOutcome {
  bool all_zero = false;
  std::vector<std::uint8_t> bytes;
};

CollapseOutcome collapse_one(const std::vector<std::uint8_t>& raw,
                             const CollapsePlanned& plan,
                             std::size_t window_count) {
  EventStream stream = decode_stream(raw, plan.in_dims);
  if (plan.filter) {
    stream = filter_polarity(stream, plan.polarity);
  }
  const SaccadePlan saccades = plan_saccades(stream, window_count);
  stream = select_saccades(stream, saccades, plan.window_indices);

  CollapsedImage image = normalize(accumulate(stream, plan.mode));
  PixelGrid8 grid;
  if (plan.resize_to && plan.resize_first) {
    image = resize(image, plan.resize_to->width, plan.resize_to->height,
                   plan.method);
    grid = quantize(image);
  } else {
    grid = quantize(image);
    if (plan.resize_to) {
      grid = resize(grid, plan.resize_to->width, plan.resize_to->height,
                    plan.method);
    }
  }

  CollapseOutcome outcome;
  outcome.all_zero = image.all_zero;
  outcome.bytes = plan.pgm ? write_pgm(grid) : write_bmp_gray8(grid);
  return outcome;
}

struct CollapseJob {
  fs::path input;
  fs::path output;
  std::string rel_out; // printed in the summary
};

struct CollapseResult {
  bool ok = false;
  bool all_zero = false;
  std::string message;
};

int cmd_collapse(const CollapseOptions& opt) {
  const CollapsePlanned plan = plan_collapse(opt);

  const fs::path input(opt.input);
  const fs::path output(opt.output);
  const std::string extension = plan.pgm ? ".pgm" : ".bmp";

  std::vector<CollapseJob> jobs;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const fs::directory_entry& entry :
         fs::recursive_directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw DataError("no .bin files under " + input.string());
    }
    for (const fs::path& file : files) {
      const fs::path rel = fs::relative(file, input);
      fs::path out_rel = rel;
      out_rel.replace_extension(extension);
      jobs.push_back({file, output / out_rel, out_rel.generic_string()});
    }
  } else {
    if (!fs::exists(input)) {
      throw DataError("cannot open " + input.string());
    }
    fs::path name = input.filename();
    name.replace_extension(extension);
    jobs.push_back({input, output / name, name.generic_string()});
  }

  // Create every output directory up front so workers never race on mkdir.
  std::set<fs::path> out_dirs;
  for (const CollapseJob& job : jobs) {
    out_dirs.insert(job.output.parent_path());
  }
  for (const fs::path& dir : out_dirs) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      throw DataError("cannot create " + dir.string() + ": " + ec.message());
    }
  }

  std::size_t worker_count = opt.jobs;
  if (worker_count == 0) {
    worker_count = std::max(1u, std::thread::hardware_concurrency());
  }
  worker_count = std::min(worker_count, jobs.size());

  std::vector<CollapseResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  const bool keep_going = opt.keep_going;

  const auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= jobs.size() || abort.load()) return;
      CollapseResult& result = results[index];
      try {
        const std::vector<std::uint8_t> raw = read_file(jobs[index].input);
        const CollapseOutcome outcome = collapse_one(raw, plan, opt.windows);
        write_file(jobs[index].output, outcome.bytes);
        result.ok = true;
        result.all_zero = outcome.all_zero;
      } catch (const std::exception& error) {
        result.message = error.what();
        if (!keep_going) abort.store(true);
      }
    }
  };

  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < worker_count; ++i) {
      threads.emplace_back(worker);
    }
    for (std::thread& thread : threads) {
      thread.join();
    }
  }

  std::size_t collapsed = 0;
  std::size_t zeroed = 0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CollapseResult& result = results[i];
    if (result.ok) {
      ++collapsed;
      if (result.all_zero) ++zeroed;
      std::cout << jobs[i].rel_out << ": "
                << (result.all_zero ? "all-zero" : "ok") << '\n';
    } else if (!result.message.empty()) {
      ++failed;
      if (!keep_going) {
        throw DataError(result.message);
      }
      std::cout << jobs[i].rel_out << ": failed (" << result.message << ")\n";
    }
    // Untouched jobs (abandoned after an abort) print nothing.
  }
  std::cout << "collapsed: " << collapsed << '\n'
            << "all_zero: " << zeroed << '\n'
            << "failed: " << failed << '\n';
  return failed == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ split

struct SplitOptions {
  std::string corpus;
  double fraction = 0.15;
  std::uint64_t seed = 0;
  std::string output;
  std::string extensions = ".bmp,.pgm,.bin";
};

int cmd_split(const SplitOptions& opt) {
  std::set<std::string> extensions;
  std::size_t position = 0;
  while (position <= opt.extensions.size()) {
    std::size_t comma = opt.extensions.find(',', position);
    if (comma == std::string::npos) comma = opt.extensions.size();
    const std::string token = opt.extensions.substr(position, comma - position);
    if (!token.empty()) extensions.insert(token);
    position = comma + 1;
    if (comma == opt.extensions.size()) break;
  }
  if (extensions.empty()) {
    throw ArgumentError("no extensions given");
  }

  const std::vector<CorpusFile> files = scan_corpus(opt.corpus, extensions);
  const DatasetManifest manifest = split_corpus(files, {opt.fraction, opt.seed});

  const fs::path out = opt.output.empty()
                           ? fs::path(opt.corpus) / "manifest.csv"
                           : fs::path(opt.output);
  write_manifest(manifest, out);

  std::set<std::string> categories;
  std::size_t train = 0;
  std::size_t val = 0;
  for (const ManifestEntry& entry : manifest.entries) {
    categories.insert(entry.category);
    (entry.split == Split::Train ? train : val) += 1;
  }
  std::cout << "categories: " << categories.size() << '\n'
            << "train: " << train << '\n'
            << "val: " << val << '\n'
            << "manifest: " << out.generic_string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainOptions {
  std::string manifest;
  std::string frames;
  std::string hidden = "64";
  std::size_t epochs = 50;
  std::size_t batch = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double dropout_rate = 0.5;
  bool no_dropout = false;
  bool no_batchnorm = false;
  bool no_shuffle = false;
  std::string checkpoint = "model.ckpt";
  std::string history = "history.csv";
};

int cmd_train(const TrainOptions& opt) {
  const DatasetManifest manifest = read_manifest_file(opt.manifest);
  const FrameDataset data = load_frames(manifest, opt.frames);
  if (data.x_val.rows == 0) {
    throw ArgumentError("manifest has no val entries; run split first");
  }
  if (data.class_names.size() < 2) {
    throw ArgumentError("training needs at least 2 categories");
  }

  std::vector<std::size_t> dims;
  dims.push_back(data.x_train.cols);
  for (const std::size_t hidden : parse_dim_list(opt.hidden)) {
    dims.push_back(hidden);
  }
  dims.push_back(data.class_names.size());

  TrainConfig config;
  config.epochs = opt.epochs;
  config.batch_size = opt.batch;
  config.seed = opt.seed;
  config.shuffle = !opt.no_shuffle;
  config.batchnorm = !opt.no_batchnorm;
  config.dropout = !opt.no_dropout;
  config.adam.learning_rate = opt.learning_rate;

  MlpModel model = he_init(dims, opt.seed, config.batchnorm, opt.dropout_rate);
  const std::vector<EpochStats> history =
      train(model, data.x_train, data.y_train, data.x_val, data.y_val, config);

  std::string history_text = "epoch,train_loss,train_accuracy,val_accuracy\n";
  for (const EpochStats& row : history) {
    history_text += std::to_string(row.epoch);
    history_text += ',';
    history_text += format_double(row.train_loss, "%.10g");
    history_text += ',';
    history_text += format_double(row.train_accuracy, "%.6f");
    history_text += ',';
    history_text += format_double(row.val_accuracy, "%.6f");
    history_text += '\n';
  }
  write_file(opt.history,
             {reinterpret_cast<const std::uint8_t*>(history_text.data()),
              history_text.size()});
  write_file(opt.checkpoint, save_checkpoint(model));

  const EpochStats& last = history.back();
  std::cout << "classes: " << data.class_names.size() << '\n'
            << "train_frames: " << data.x_train.rows << '\n'
            << "val_frames: " << data.x_val.rows << '\n'
            << "input_dim: " << data.x_train.cols << '\n'
            << "epochs: " << history.size() << '\n'
            << "final_train_loss: " << format_double(last.train_loss, "%.6f") << '\n'
            << "final_train_accuracy: " << format_double(last.train_accuracy, "%.6f") << '\n'
            << "final_val_accuracy: " << format_double(last.val_accuracy, "%.6f") << '\n'
            << "checkpoint: " << opt.checkpoint << '\n'
            << "history: " << opt.history << '\n';
  return 0;
}

// ------------------------------------------------------------------- eval

struct EvalOptions {
  std::string manifest;
  std::string frames;
  std::string checkpoint;
  std::string split = "val";
};

int cmd_eval(const EvalOptions& opt) {
  if (opt.split != "val" && opt.split != "train") {
    throw ArgumentError("split must be train or val");
  }
  const Checkpoint checkpoint = load_checkpoint(read_file(opt.checkpoint));
  const DatasetManifest manifest = read_manifest_file(opt.manifest);
  const FrameDataset data = load_frames(manifest, opt.frames);

  const Matrix& x = opt.split == "val" ? data.x_val : data.x_train;
  const std::vector<int>& y = opt.split == "val" ? data.y_val : data.y_train;
  if (x.rows == 0) {
    throw ArgumentError("manifest has no " + opt.split + " entries");
  }
  if (x.cols != checkpoint.model.input_dim()) {
    throw ArgumentError("checkpoint expects input dim " +
                        std::to_string(checkpoint.model.input_dim()) +
                        ", frames have " + std::to_string(x.cols));
  }
  if (checkpoint.model.num_classes() < data.class_names.size()) {
    throw ArgumentError("checkpoint has " +
                        std::to_string(checkpoint.model.num_classes()) +
                        " classes, manifest has " +
                        std::to_string(data.class_names.size()));
  }

  const double accuracy = evaluate(checkpoint.model, x, y);
  std::cout << "samples: " << x.rows << '\n'
            << "accuracy: " << format_double(accuracy, "%.6f") << '\n';
  return 0;
}

// ------------------------------------------------------------------ synth

struct SynthOptions {
  std::string output;
  std::size_t classes = 3;
  std::size_t samples = 100;
  std::size_t width = 32;
  std::size_t height = 32;
  std::uint64_t seed = 0;
  double noise = 0.25;
  std::uint64_t peak = 15;
  std::string timing = "raster";
  std::uint32_t duration = 300000;
};

int cmd_synth(const SynthOptions& opt) {
  if (opt.width == 0 || opt.width > 256 || opt.height == 0 || opt.height > 256) {
    throw ArgumentError("grid extent must lie in 1..256 per axis");
  }
  CorpusConfig config;
  config.n_classes = opt.classes;
  config.samples_per_class = opt.samples;
  config.width = static_cast<std::uint16_t>(opt.width);
  config.height = static_cast<std::uint16_t>(opt.height);
  config.seed = opt.seed;
  config.noise = opt.noise;
  config.peak_count = opt.peak;
  config.duration_us = opt.duration;
  if (opt.timing == "raster") {
    config.timing = PatternTiming::RasterOrder;
  } else if (opt.timing == "uniform") {
    config.timing = PatternTiming::UniformSpacing;
  } else {
    throw ArgumentError("timing must be raster or uniform");
  }

  const DatasetManifest manifest = generate_corpus(config, opt.output);
  std::cout << "classes: " << config.n_classes << '\n'
            << "samples_per_class: " << config.samples_per_class << '\n'
            << "files: " << manifest.entries.size() << '\n'
            << "truth: " << (fs::path(opt.output) / "truth.csv").generic_string()
            << '\n';
  return 0;
}

// ------------------------------------------------------------------- main

// Replaces `--args-file <path>` (or --args-file=<path>) with the
// whitespace-separated tokens stored in the file, verbatim, one level deep.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string token = argv[i];
    std::string path;
    if (token == "--args-file") {
      if (i + 1 >= argc) {
        throw ArgumentError("--args-file needs a path");
      }
      path = argv[++i];
    } else if (token.rfind("--args-file=", 0) == 0) {
      path = token.substr(std::string("--args-file=").size());
    } else {
      args.push_back(std::move(token));
      continue;
    }

    const std::vector<std::uint8_t> bytes = read_file(path);
    std::string word;
    for (const std::uint8_t byte : bytes) {
      const char c = static_cast<char>(byte);
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        if (!word.empty()) {
          args.push_back(std::move(word));
          word.clear();
        }
      } else {
        word.push_back(c);
      }
    }
    if (!word.empty()) args.push_back(std::move(word));
  }
  return args;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-stream collapse toolkit"};
  app.require_subcommand(1);

  InspectOptions inspect_opt;
  CLI::App* inspect = app.add_subcommand(
      "inspect", "Validate an event file and print its statistics");
  inspect->add_option("input", inspect_opt.input, "event .bin file")->required();
  inspect->add_option("--dims", inspect_opt.dims,
                      "sensor extent WxH (default: inferred from events)");

  CollapseOptions collapse_opt;
  CLI::App* collapse = app.add_subcommand(
      "collapse", "Collapse event files into normalized static images");
  collapse->add_option("--input,-i", collapse_opt.input,
                       ".bin file or directory tree")->required();
  collapse->add_option("--output,-o", collapse_opt.output, "output directory")
      ->required();
  collapse->add_option("--polarity", collapse_opt.polarity,
                       "events to keep: on, off or both (default on)");
  collapse->add_option("--windows", collapse_opt.windows,
                       "saccade windows per recording (default 3)");
  collapse->add_option("--saccades", collapse_opt.saccades,
                       "use only the first N windows (default: all)");
  collapse->add_option("--select", collapse_opt.select,
                       "explicit window indices, e.g. 0,2");
  collapse->add_option("--mode", collapse_opt.mode,
                       "count or time-sum (default count)");
  collapse->add_option("--resize", collapse_opt.resize_spec,
                       "output extent WxH (default: native)");
  collapse->add_option("--resize-method", collapse_opt.resize_method,
                       "nearest or bilinear (default nearest)");
  collapse->add_option("--order", collapse_opt.order,
                       "quantize-first or resize-first (default quantize-first)");
  collapse->add_option("--format", collapse_opt.format,
                       "bmp or pgm (default bmp)");
  collapse->add_option("--dims", collapse_opt.dims,
                       "input extent WxH (default: inferred per file)");
  collapse->add_flag("--keep-going", collapse_opt.keep_going,
                     "report per-file failures instead of stopping");
  collapse->add_option("--jobs", collapse_opt.jobs,
                       "parallel workers (default: all cores)");

  SplitOptions split_opt;
  CLI::App* split = app.add_subcommand(
      "split", "Write a deterministic stratified train/val manifest");
  split->add_option("--corpus", split_opt.corpus,
                    "corpus root (category directories)")->required();
  split->add_option("--fraction", split_opt.fraction,
                    "validation fraction (default 0.15)");
  split->add_option("--seed", split_opt.seed, "split seed (default 0)");
  split->add_option("--output", split_opt.output,
                    "manifest path (default <corpus>/manifest.csv)");
  split->add_option("--extensions", split_opt.extensions,
                    "comma-separated extensions (default .bmp,.pgm,.bin)");

  TrainOptions train_opt;
  CLI::App* train = app.add_subcommand(
      "train", "Train the classifier probe on collapsed frames");
  train->add_option("--manifest", train_opt.manifest, "split manifest")->required();
  train->add_option("--frames", train_opt.frames,
                    "frames root the manifest paths are relative to")->required();
  train->add_option("--hidden", train_opt.hidden,
                    "hidden layer sizes, e.g. 64 or 128,64; none for linear "
                    "(default 64)");
  train->add_option("--epochs", train_opt.epochs, "training epochs (default 50)");
  train->add_option("--batch", train_opt.batch, "batch size (default 32)");
  train->add_option("--lr", train_opt.learning_rate,
                    "Adam learning rate (default 0.001)");
  train->add_option("--seed", train_opt.seed,
                    "init/shuffle/dropout seed (default 0)");
  train->add_option("--dropout-rate", train_opt.dropout_rate,
                    "dropout rate in [0, 1) (default 0.5)");
  train->add_flag("--no-dropout", train_opt.no_dropout, "disable dropout");
  train->add_flag("--no-batchnorm", train_opt.no_batchnorm,
                  "disable batch normalization");
  train->add_flag("--no-shuffle", train_opt.no_shuffle,
                  "keep manifest order within epochs");
  train->add_option("--checkpoint", train_opt.checkpoint,
                    "checkpoint output (default model.ckpt)");
  train->add_option("--history", train_opt.history,
                    "per-epoch CSV output (default history.csv)");

  EvalOptions eval_opt;
  CLI::App* evaluate = app.add_subcommand(
      "eval", "Evaluate a checkpoint on one split of a manifest");
  evaluate->add_option("--manifest", eval_opt.manifest, "split manifest")->required();
  evaluate->add_option("--frames", eval_opt.frames, "frames root")->required();
  evaluate->add_option("--checkpoint", eval_opt.checkpoint, "model checkpoint")
      ->required();
  evaluate->add_option("--split", eval_opt.split, "train or val (default val)");

  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a deterministic synthetic event corpus");
  synth->add_option("--output", synth_opt.output, "corpus directory")->required();
  synth->add_option("--classes", synth_opt.classes, "class count (default 3)");
  synth->add_option("--samples", synth_opt.samples,
                    "samples per class (default 100)");
  synth->add_option("--width", synth_opt.width, "grid width (default 32)");
  synth->add_option("--height", synth_opt.height, "grid height (default 32)");
  synth->add_option("--seed", synth_opt.seed, "corpus seed (default 0)");
  synth->add_option("--noise", synth_opt.noise,
                    "per-sample noise amplitude in [0, 1] (default 0.25)");
  synth->add_option("--peak", synth_opt.peak,
                    "spike count at the brightest pixel (default 15)");
  synth->add_option("--timing", synth_opt.timing,
                    "raster or uniform (default raster)");
  synth->add_option("--duration", synth_opt.duration,
                    "recording duration in us (default 300000)");

  try {
    std::vector<std::string> args = expand_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  } catch (const ArgumentError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  } catch (const DataError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(inspect_opt);
    if (collapse->parsed()) return cmd_collapse(collapse_opt);
    if (split->parsed()) return cmd_split(split_opt);
    if (train->parsed()) return cmd_train(train_opt);
    if (evaluate->parsed()) return cmd_eval(eval_opt);
    if (synth->parsed()) return cmd_synth(synth_opt);
  } catch (const ArgumentError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  } catch (const DataError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aertk/collapse.hpp"
#include "aertk/error.hpp"
#include "aertk/rng.hpp"
#include "test_util.hpp"

using namespace aertk;

namespace {

EventStream two_by_two_stream() {
  EventStream stream;
  stream.width = 2;
  stream.height = 2;
  stream.events = {{0, 0, Polarity::On, 1},
                   {1, 0, Polarity::On, 2},
                   {0, 0, Polarity::On, 3},
                   {1, 1, Polarity::On, 4},
                   {1, 1, Polarity::On, 5},
                   {1, 1, Polarity::On, 6},
                   {1, 1, Polarity::On, 7}};
  return stream;
}

PixelGrid8 gray_grid(std::uint32_t w, std::uint32_t h,
                     std::vector<std::uint8_t> values) {
  PixelGrid8 grid;
  grid.width = w;
  grid.height = h;
  grid.channels = 1;
  grid.values = std::move(values);
  return grid;
}

} // namespace

TEST_CASE("accumulate tallies spikes per pixel") {
  const SpikeCountFrame frame = accumulate(two_by_two_stream(), AccumulateMode::Count);
  CHECK(frame.width == 2);
  CHECK(frame.height == 2);
  CHECK(frame.values == std::vector<std::uint64_t>{2, 1, 0, 4});
}

TEST_CASE("accumulate TIME_SUM adds timestamps") {
  const SpikeCountFrame frame = accumulate(two_by_two_stream(), AccumulateMode::TimeSum);
  CHECK(frame.at(0, 0) == 1 + 3);
  CHECK(frame.at(1, 0) == 2);
  CHECK(frame.at(0, 1) == 0);
  CHECK(frame.at(1, 1) == 4 + 5 + 6 + 7);
}

TEST_CASE("accumulate of an empty stream is an all-zero frame") {
  EventStream stream;
  stream.width = 3;
  stream.height = 2;
  const SpikeCountFrame frame = accumulate(stream, AccumulateMode::Count);
  CHECK(frame.values == std::vector<std::uint64_t>(6, 0));
}

TEST_CASE("accumulate rejects events outside the extent") {
  EventStream stream;
  stream.width = 2;
  stream.height = 2;
  stream.events = {{0, 0, Polarity::On, 1}, {2, 0, Polarity::On, 2}};
  CHECK_THROWS_WITH_AS(accumulate(stream, AccumulateMode::Count),
                       doctest::Contains("event 1"), ArgumentError);
}

TEST_CASE("normalize divides by the per-pattern maximum") {
  const CollapsedImage image =
      normalize(accumulate(two_by_two_stream(), AccumulateMode::Count));
  CHECK(image.intensities == std::vector<double>{0.5, 0.25, 0.0, 1.0});
  CHECK_FALSE(image.all_zero);
}

TEST_CASE("normalize maps time sums the same way") {
  SpikeCountFrame frame;
  frame.width = 2;
  frame.height = 1;
  frame.mode = AccumulateMode::TimeSum;
  frame.values = {4, 2};
  const CollapsedImage image = normalize(frame);
  CHECK(image.intensities == std::vector<double>{1.0, 0.5});
}

TEST_CASE("normalize flags an all-zero frame instead of dividing by zero") {
  SpikeCountFrame frame;
  frame.width = 2;
  frame.height = 2;
  frame.values = {0, 0, 0, 0};
  const CollapsedImage image = normalize(frame);
  CHECK(image.all_zero);
  CHECK(image.intensities == std::vector<double>(4, 0.0));
}

TEST_CASE("normalize is invariant to uniform scaling of the counts") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    SpikeCountFrame frame;
    frame.width = 4;
    frame.height = 3;
    frame.values.resize(12);
    for (std::uint64_t& v : frame.values) v = rng.bounded(50);
    SpikeCountFrame scaled = frame;
    const std::uint64_t k = 1 + rng.bounded(9);
    for (std::uint64_t& v : scaled.values) v *= k;
    CHECK(normalize(frame).intensities == normalize(scaled).intensities);
    CHECK(normalize(frame).all_zero == normalize(scaled).all_zero);
  }
}

TEST_CASE("accumulate is order-invariant and additive") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    EventStream stream = testutil::random_stream(rng);
    const SpikeCountFrame base = accumulate(stream, AccumulateMode::TimeSum);

    EventStream shuffled = stream;
    for (std::size_t i = shuffled.events.size(); i > 1; --i) {
      std::swap(shuffled.events[i - 1],
                shuffled.events[rng.bounded(i)]);
    }
    CHECK(accumulate(shuffled, AccumulateMode::TimeSum).values == base.values);

    // Splitting the stream in two and accumulating the halves sums back.
    EventStream head = stream;
    EventStream tail = stream;
    const std::size_t cut = stream.events.size() / 2;
    head.events.assign(stream.events.begin(), stream.events.begin() + cut);
    tail.events.assign(stream.events.begin() + cut, stream.events.end());
    const SpikeCountFrame a = accumulate(head, AccumulateMode::TimeSum);
    const SpikeCountFrame b = accumulate(tail, AccumulateMode::TimeSum);
    for (std::size_t i = 0; i < base.values.size(); ++i) {
      CHECK(base.values[i] == a.values[i] + b.values[i]);
    }
  }
}

TEST_CASE("quantize maps intensities to rounded bytes") {
  CollapsedImage image;
  image.width = 3;
  image.height = 1;
  image.intensities = {1.0, 0.5, 0.0};
  const PixelGrid8 grid = quantize(image);
  CHECK(grid.channels == 1);
  CHECK(grid.values == std::vector<std::uint8_t>{255, 128, 0});
}

TEST_CASE("the maximal pixel always quantizes to 255") {
  // Counts are kept small: for maxima up to 100 no second value can round
  // up to 255, so the brightest pixel is uniquely identifiable.
  Rng rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    SpikeCountFrame frame;
    frame.width = 5;
    frame.height = 5;
    frame.values.resize(25);
    for (std::uint64_t& v : frame.values) v = rng.bounded(101);
    const std::uint64_t max_value =
        *std::max_element(frame.values.begin(), frame.values.end());
    if (max_value == 0) continue;
    const PixelGrid8 grid = quantize(normalize(frame));
    for (std::size_t i = 0; i < frame.values.size(); ++i) {
      if (frame.values[i] == max_value) {
        CHECK(grid.values[i] == 255);
      } else {
        CHECK(grid.values[i] < 255);
      }
    }
  }
}

TEST_CASE("nearest resize repeats source pixels in blocks") {
  const PixelGrid8 grid = gray_grid(2, 2, {10, 20, 30, 40});
  const PixelGrid8 up = resize(grid, 4, 4, ResizeMethod::Nearest);
  const std::vector<std::uint8_t> expected = {10, 10, 20, 20,  //
                                              10, 10, 20, 20,  //
                                              30, 30, 40, 40,  //
                                              30, 30, 40, 40};
  CHECK(up.values == expected);

  // Integer downscale inverts the upscale.
  const PixelGrid8 back = resize(up, 2, 2, ResizeMethod::Nearest);
  CHECK(back == grid);
}

TEST_CASE("same-size resize is the identity for both methods") {
  Rng rng(53);
  PixelGrid8 grid = gray_grid(6, 4, {});
  grid.values.resize(24);
  for (std::uint8_t& v : grid.values) {
    v = static_cast<std::uint8_t>(rng.bounded(256));
  }
  CHECK(resize(grid, 6, 4, ResizeMethod::Nearest) == grid);
  CHECK(resize(grid, 6, 4, ResizeMethod::Bilinear) == grid);
}

TEST_CASE("bilinear resize preserves constant images") {
  const PixelGrid8 grid = gray_grid(4, 4, std::vector<std::uint8_t>(16, 7));
  const PixelGrid8 down = resize(grid, 2, 2, ResizeMethod::Bilinear);
  CHECK(down.values == std::vector<std::uint8_t>(4, 7));
  const PixelGrid8 up = resize(grid, 9, 5, ResizeMethod::Bilinear);
  CHECK(std::all_of(up.values.begin(), up.values.end(),
                    [](std::uint8_t v) { return v == 7; }));
}

TEST_CASE("bilinear resize interpolates between edge-clamped samples") {
  const PixelGrid8 grid = gray_grid(2, 1, {0, 255});
  const PixelGrid8 wide = resize(grid, 4, 1, ResizeMethod::Bilinear);
  // Sample centers fall at source coords -0.25, 0.25, 0.75, 1.25; the ends
  // clamp and the middle two mix 25/75.
  CHECK(wide.values == std::vector<std::uint8_t>{0, 64, 191, 255});
}

TEST_CASE("resize rejects empty targets") {
  const PixelGrid8 grid = gray_grid(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_WITH_AS(resize(grid, 0, 2, ResizeMethod::Nearest),
                       doctest::Contains("at least 1x1"), ArgumentError);
  CHECK_THROWS_AS(resize(grid, 2, 0, ResizeMethod::Bilinear), ArgumentError);

  CollapsedImage image;
  image.width = 1;
  image.height = 1;
  image.intensities = {0.5};
  CHECK_THROWS_AS(resize(image, 0, 0, ResizeMethod::Nearest), ArgumentError);
}

TEST_CASE("real-valued resize matches the byte path after quantization") {
  CollapsedImage image;
  image.width = 2;
  image.height = 2;
  image.intensities = {1.0, 0.0, 0.0, 1.0};
  const CollapsedImage up = resize(image, 4, 4, ResizeMethod::Nearest);
  CHECK(up.width == 4);
  CHECK(up.height == 4);
  CHECK_FALSE(up.all_zero);
  // NEAREST moves values without arithmetic, so quantize-then-resize and
  // resize-then-quantize agree exactly.
  CHECK(quantize(up) == resize(quantize(image), 4, 4, ResizeMethod::Nearest));

  CollapsedImage zero;
  zero.width = 1;
  zero.height = 1;
  zero.intensities = {0.0};
  CHECK(resize(zero, 3, 3, ResizeMethod::Bilinear).all_zero);
}

TEST_CASE("replicate_channels copies the plane three times") {
  const PixelGrid8 gray = gray_grid(2, 1, {9, 200});
  const PixelGrid8 rgb = replicate_channels(gray);
  CHECK(rgb.channels == 3);
  CHECK(rgb.values == std::vector<std::uint8_t>{9, 200, 9, 200, 9, 200});
  CHECK_THROWS_WITH_AS(replicate_channels(rgb),
                       doctest::Contains("1-channel"), ArgumentError);
}

TEST_CASE("rgb_to_gray uses the 21/72/7 weighting") {
  PixelGrid8 rgb;
  rgb.width = 1;
  rgb.height = 1;
  rgb.channels = 3;
  rgb.values = {100, 200, 50};
  const PixelGrid8 gray = rgb_to_gray(rgb);
  // 0.21*100 + 0.72*200 + 0.07*50 = 168.5, ties away from zero.
  CHECK(gray.values == std::vector<std::uint8_t>{169});

  rgb.values = {255, 255, 255};
  CHECK(rgb_to_gray(rgb).values == std::vector<std::uint8_t>{255});
  rgb.values = {0, 0, 0};
  CHECK(rgb_to_gray(rgb).values == std::vector<std::uint8_t>{0});

  const PixelGrid8 gray_in = gray_grid(1, 1, {5});
  CHECK_THROWS_WITH_AS(rgb_to_gray(gray_in), doctest::Contains("3-channel"),
                       ArgumentError);
}

TEST_CASE("gray replication round-trips through the luma weights") {
  // 0.21 + 0.72 + 0.07 = 1, so replicated grays survive conversion.
  Rng rng(59);
  PixelGrid8 gray = gray_grid(4, 4, {});
  gray.values.resize(16);
  for (std::uint8_t& v : gray.values) {
    v = static_cast<std::uint8_t>(rng.bounded(256));
  }
  CHECK(rgb_to_gray(replicate_channels(gray)) == gray);
}

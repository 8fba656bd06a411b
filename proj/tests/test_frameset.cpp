#include <doctest.h>

#include <filesystem>
#include <vector>

#include "aertk/collapse.hpp"
#include "aertk/error.hpp"
#include "aertk/frameset.hpp"
#include "aertk/imageio.hpp"
#include "test_util.hpp"

using namespace aertk;

namespace {

PixelGrid8 gray_grid(std::uint32_t w, std::uint32_t h,
                     std::vector<std::uint8_t> values) {
  PixelGrid8 grid;
  grid.width = w;
  grid.height = h;
  grid.channels = 1;
  grid.values = std::move(values);
  return grid;
}

void put_frame(const std::filesystem::path& path, const PixelGrid8& grid) {
  std::filesystem::create_directories(path.parent_path());
  if (path.extension() == ".pgm") {
    write_file(path, write_pgm(grid));
  } else {
    write_file(path, write_bmp_gray8(grid));
  }
}

} // namespace

TEST_CASE("load_frames flattens images into labeled rows") {
  const testutil::TempDir dir("frames");
  put_frame(dir.path() / "dogs" / "a.bmp", gray_grid(2, 1, {0, 255}));
  put_frame(dir.path() / "dogs" / "b.bmp", gray_grid(2, 1, {255, 255}));
  put_frame(dir.path() / "cats" / "c.pgm", gray_grid(2, 1, {51, 0}));

  DatasetManifest manifest;
  manifest.entries = {{"dogs/a.bmp", "dogs", Split::Train},
                      {"dogs/b.bmp", "dogs", Split::Val},
                      {"cats/c.pgm", "cats", Split::Train}};

  const FrameDataset data = load_frames(manifest, dir.path());
  // Class indices follow the sorted category names: cats 0, dogs 1.
  CHECK(data.class_names == std::vector<std::string>{"cats", "dogs"});
  CHECK(data.frame_width == 2);
  CHECK(data.frame_height == 1);

  REQUIRE(data.x_train.rows == 2);
  REQUIRE(data.x_train.cols == 2);
  CHECK(data.y_train == std::vector<int>{1, 0});
  CHECK(data.x_train(0, 0) == 0.0);
  CHECK(data.x_train(0, 1) == 1.0);
  CHECK(data.x_train(1, 0) == doctest::Approx(51.0 / 255.0).epsilon(1e-15));
  CHECK(data.x_train(1, 1) == 0.0);

  REQUIRE(data.x_val.rows == 1);
  CHECK(data.y_val == std::vector<int>{1});
  CHECK(data.x_val(0, 0) == 1.0);
}

TEST_CASE("load_frames converts color frames to grayscale") {
  const testutil::TempDir dir("frames-color");
  // Hand-build a 24-bit BMP the reader returns as 3 channels.
  std::vector<std::uint8_t> bytes;
  const auto u32 = [&](std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) bytes.push_back((v >> s) & 0xFF);
  };
  const auto u16 = [&](std::uint16_t v) {
    bytes.push_back(v & 0xFF);
    bytes.push_back(v >> 8);
  };
  bytes.push_back('B');
  bytes.push_back('M');
  u32(54 + 4);
  u32(0);
  u32(54);
  u32(40);
  u32(1);
  u32(1);
  u16(1);
  u16(24);
  u32(0);
  u32(4);
  u32(2835);
  u32(2835);
  u32(0);
  u32(0);
  const std::uint8_t bgr[4] = {50, 200, 100, 0}; // RGB(100,200,50) padded
  bytes.insert(bytes.end(), bgr, bgr + 4);

  std::filesystem::create_directories(dir.path() / "c");
  write_file(dir.path() / "c" / "x.bmp", bytes);
  put_frame(dir.path() / "c" / "y.bmp", gray_grid(1, 1, {169}));

  DatasetManifest manifest;
  manifest.entries = {{"c/x.bmp", "c", Split::Train},
                      {"c/y.bmp", "c", Split::Val}};
  const FrameDataset data = load_frames(manifest, dir.path());
  // The color pixel lands on the same gray value as its luma counterpart.
  CHECK(data.x_train(0, 0) == data.x_val(0, 0));
  CHECK(data.x_train(0, 0) == doctest::Approx(169.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("load_frames reports extent mismatches by file") {
  const testutil::TempDir dir("frames-extent");
  put_frame(dir.path() / "c" / "a.bmp", gray_grid(2, 2, {1, 2, 3, 4}));
  put_frame(dir.path() / "c" / "b.bmp", gray_grid(3, 1, {1, 2, 3}));

  DatasetManifest manifest;
  manifest.entries = {{"c/a.bmp", "c", Split::Train},
                      {"c/b.bmp", "c", Split::Train}};
  CHECK_THROWS_WITH_AS(load_frames(manifest, dir.path()),
                       doctest::Contains("c/b.bmp"), DataError);
}

TEST_CASE("load_frames rejects unknown extensions and empty manifests") {
  const testutil::TempDir dir("frames-bad");
  put_frame(dir.path() / "c" / "a.bmp", gray_grid(1, 1, {1}));
  std::filesystem::copy_file(dir.path() / "c" / "a.bmp",
                             dir.path() / "c" / "a.png");

  DatasetManifest png;
  png.entries = {{"c/a.png", "c", Split::Train}};
  CHECK_THROWS_WITH_AS(load_frames(png, dir.path()),
                       doctest::Contains("extension"), DataError);

  CHECK_THROWS_AS(load_frames(DatasetManifest{}, dir.path()), DataError);

  DatasetManifest missing;
  missing.entries = {{"c/absent.bmp", "c", Split::Train}};
  CHECK_THROWS_AS(load_frames(missing, dir.path()), DataError);
}

TEST_CASE("load_frames accepts uppercase extensions") {
  const testutil::TempDir dir("frames-case");
  put_frame(dir.path() / "c" / "a.bmp", gray_grid(1, 1, {7}));
  put_frame(dir.path() / "c" / "b.bmp", gray_grid(1, 1, {9}));
  std::filesystem::rename(dir.path() / "c" / "b.bmp", dir.path() / "c" / "b.BMP");

  DatasetManifest manifest;
  manifest.entries = {{"c/a.bmp", "c", Split::Train},
                      {"c/b.BMP", "c", Split::Train}};
  const FrameDataset data = load_frames(manifest, dir.path());
  CHECK(data.x_train.rows == 2);
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "tetiqa/errors.h"
#include "tetiqa/image_io.h"
#include "tetiqa/manifest.h"
#include "tetiqa/rr_io.h"
#include "testing/oracles.h"
#include "testing/synthetic.h"

namespace tetiqa {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tetiqa_io_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path Write(const std::string& name, const std::string& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << bytes;
    return p;
  }

  fs::path dir_;
};

RRFeatureSet SampleFeatures(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  RRFeatureSet f;
  f.source_id = "img \"7\".pgm";
  f.width = 512;
  f.height = 384;
  for (int s = 1; s <= 2; ++s) {
    for (int o = 1; o <= 3; ++o) {
      SubbandFeatures b;
      b.scale = s;
      b.orientation = o;
      b.cov = testing::RandomSpd(9, rng) / 3.0;
      b.weibull = {u(rng), u(rng) / 7.0};
      b.dropped_zero_fraction = u(rng) / 10.0;
      f.subbands.push_back(b);
    }
  }
  return f;
}

using LoadTest = TempDir;

TEST_F(LoadTest, BinaryGraymap) {
  std::string bytes = "P5\n# comment\n3 2\n255\n";
  for (unsigned char v : {0, 10, 20, 128, 254, 255}) bytes.push_back(static_cast<char>(v));
  const ImagePlane p = LoadGrayscale(Write("a.pgm", bytes));
  ASSERT_EQ(p.width(), 3u);
  ASSERT_EQ(p.height(), 2u);
  EXPECT_EQ(p.at(0, 1), 10.0);
  EXPECT_EQ(p.at(1, 0), 128.0);
  EXPECT_EQ(p.at(1, 2), 255.0);
}

TEST_F(LoadTest, AsciiAndSixteenBitGraymaps) {
  const ImagePlane ascii = LoadGrayscale(Write("b.pgm", "P2 2 2 15\n0 15\n5 10\n"));
  EXPECT_EQ(ascii.at(0, 1), 255.0);
  EXPECT_DOUBLE_EQ(ascii.at(1, 0), 85.0);

  std::string wide = "P5 2 1 65535\n";
  for (unsigned char v : {0xff, 0xff, 0x80, 0x00}) wide.push_back(static_cast<char>(v));
  const ImagePlane p16 = LoadGrayscale(Write("c.pgm", wide));
  EXPECT_EQ(p16.at(0, 0), 255.0);
  EXPECT_DOUBLE_EQ(p16.at(0, 1), 32768.0 * 255.0 / 65535.0);
}

TEST_F(LoadTest, ColorUsesLumaWeights) {
  std::string bytes = "P6 3 1 255\n";
  for (unsigned char v : {255, 255, 255, 255, 0, 0, 0, 0, 255}) {
    bytes.push_back(static_cast<char>(v));
  }
  const ImagePlane p = LoadGrayscale(Write("d.ppm", bytes));
  EXPECT_NEAR(p.at(0, 0), 255.0, 1e-12);
  EXPECT_NEAR(p.at(0, 1), 76.245, 1e-12);
  EXPECT_NEAR(p.at(0, 2), 29.07, 1e-12);

  const ImagePlane ascii = LoadGrayscale(Write("e.ppm", "P3 1 1 255 0 255 0\n"));
  EXPECT_NEAR(ascii.at(0, 0), 0.587 * 255.0, 1e-12);
}

TEST_F(LoadTest, WritePgmRoundTrip) {
  std::mt19937_64 rng(3);
  ImagePlane p = testing::RandomImage(17, 9, rng);
  for (double& v : p.samples()) v = std::round(v);
  WritePgm(p, dir_ / "w.pgm");
  EXPECT_EQ(LoadGrayscale(dir_ / "w.pgm"), p);
}

TEST_F(LoadTest, Errors) {
  EXPECT_THROW(LoadGrayscale(dir_ / "missing.pgm"), IoError);
  EXPECT_THROW(LoadGrayscale(Write("t.pgm", "P5 4 4 255\nab")), IoError);
  EXPECT_THROW(LoadGrayscale(Write("x.pgm", "not an image")), IoError);
  try {
    LoadGrayscale(dir_ / "missing.pgm");
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.pgm"), std::string::npos);
  }
}

TEST(CropTest, Geometry) {
  const CropResult same = CropToTransformSize(ImagePlane(512, 512), 2);
  EXPECT_EQ(same.plane.width(), 512u);
  EXPECT_EQ(same.offset_x, 0u);

  ImagePlane odd(513, 510);
  for (std::size_t r = 0; r < 510; ++r) {
    for (std::size_t c = 0; c < 513; ++c) odd.at(r, c) = static_cast<double>(r * 1000 + c);
  }
  const CropResult crop = CropToTransformSize(odd, 2);
  EXPECT_EQ(crop.plane.width(), 512u);
  EXPECT_EQ(crop.plane.height(), 504u);
  EXPECT_EQ(crop.offset_x, 0u);
  EXPECT_EQ(crop.offset_y, 3u);
  EXPECT_EQ(crop.plane.at(0, 0), odd.at(3, 0));

  EXPECT_EQ(CropToTransformSize(ImagePlane(20, 8), 1).plane.width(), 20u);
  EXPECT_EQ(CropToTransformSize(ImagePlane(20, 8), 2).plane.width(), 16u);
}

TEST(CropTest, Idempotent) {
  std::mt19937_64 rng(5);
  const CropResult once = CropToTransformSize(testing::RandomImage(101, 77, rng), 2);
  const CropResult twice = CropToTransformSize(once.plane, 2);
  EXPECT_EQ(twice.plane, once.plane);
  EXPECT_EQ(twice.offset_x, 0u);
}

TEST(CropTest, TooSmall) {
  EXPECT_THROW(CropToTransformSize(ImagePlane(7, 7), 2), InvalidInput);
  EXPECT_THROW(CropToTransformSize(ImagePlane(64, 7), 2), InvalidInput);
  EXPECT_THROW(CropToTransformSize(ImagePlane(8, 8), 0), InvalidInput);
}

TEST(RRTest, BitExactRoundTrip) {
  const RRFeatureSet f = SampleFeatures(11);
  const RRFeatureSet g = ParseRR(SerializeRR(f));
  EXPECT_EQ(g.format_version, f.format_version);
  EXPECT_EQ(g.source_id, f.source_id);
  EXPECT_EQ(g.width, f.width);
  EXPECT_EQ(g.height, f.height);
  EXPECT_EQ(g.levels, f.levels);
  ASSERT_EQ(g.subbands.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(g.subbands[i].scale, f.subbands[i].scale);
    EXPECT_EQ(g.subbands[i].orientation, f.subbands[i].orientation);
    EXPECT_EQ(g.subbands[i].cov, f.subbands[i].cov);
    EXPECT_EQ(g.subbands[i].weibull, f.subbands[i].weibull);
    EXPECT_EQ(g.subbands[i].dropped_zero_fraction, f.subbands[i].dropped_zero_fraction);
  }
  EXPECT_EQ(SerializeRR(g), SerializeRR(f));
}

TEST(RRTest, IdentityUpperTriangle) {
  RRFeatureSet f = SampleFeatures(12);
  for (auto& s : f.subbands) s.cov = Matrix9::Identity();
  const std::string text = SerializeRR(f);
  EXPECT_NE(text.find("[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0"), std::string::npos) << text;
  EXPECT_EQ(ParseRR(text).subbands[0].cov, Matrix9::Identity());
}

std::string Replace(std::string s, const std::string& from, const std::string& to) {
  const std::size_t at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

void ExpectParseError(const std::string& text, const std::string& needle) {
  try {
    ParseRR(text);
    ADD_FAILURE() << "expected InvalidInput containing '" << needle << "'";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(RRTest, MissingSubbandIsNamed) {
  RRFeatureSet f = SampleFeatures(13);
  f.subbands.erase(f.subbands.begin() + 5);
  ExpectParseError(SerializeRR(f), "missing subband (scale 2, orientation 3)");

  RRFeatureSet g = SampleFeatures(13);
  g.subbands.erase(g.subbands.begin() + 1);
  ExpectParseError(SerializeRR(g), "missing subband (scale 1, orientation 2)");
}

TEST(RRTest, ValidationErrors) {
  const std::string good = SerializeRR(SampleFeatures(14));
  ExpectParseError(Replace(good, "\"format_version\": 1", "\"format_version\": 2"),
                   "version");
  ExpectParseError(good.substr(0, good.size() / 2), "rr:");
  ExpectParseError("[]", "rr:");
  ExpectParseError(Replace(good, "\"lambda\": ", "\"lambda\": -"), "Weibull parameters");

  RRFeatureSet non_pd = SampleFeatures(14);
  non_pd.subbands[2].cov(0, 0) = -1.0;
  ExpectParseError(SerializeRR(non_pd), "positive definite");

  RRFeatureSet dup = SampleFeatures(14);
  dup.subbands[1] = dup.subbands[0];
  ExpectParseError(SerializeRR(dup), "subband");
}

using RRFileTest = TempDir;

TEST_F(RRFileTest, WriteRead) {
  const RRFeatureSet f = SampleFeatures(15);
  WriteRR(f, dir_ / "f.json");
  EXPECT_EQ(SerializeRR(ReadRR(dir_ / "f.json")), SerializeRR(f));
  EXPECT_THROW(ReadRR(dir_ / "none.json"), IoError);
  try {
    ReadRR(Write("bad.json", "{"));
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
}

TEST(ManifestTest, SixtyRowsSixLabels) {
  const char* labels[] = {"FLT", "NOZ", "JPG", "JP2", "DCQ", "BLR"};
  std::string text = "ref_path,dist_path,mos,distortion_label\n";
  for (int i = 0; i < 60; ++i) {
    text += "ref" + std::to_string(i % 3) + ".pgm, d/" + std::to_string(i) + ".pgm , " +
            std::to_string(0.5 + i / 100.0) + "," + labels[i % 6] + "\n";
  }
  const std::vector<ManifestRow> rows = ParseManifestText(text, "/data");
  ASSERT_EQ(rows.size(), 60u);
  std::set<std::string> distinct;
  for (const ManifestRow& r : rows) distinct.insert(r.distortion_label);
  EXPECT_EQ(distinct.size(), 6u);
  EXPECT_EQ(rows[7].ref_path, fs::path("/data/ref1.pgm"));
  EXPECT_EQ(rows[7].dist_path, fs::path("/data/d/7.pgm"));
  EXPECT_DOUBLE_EQ(rows[7].mos, 0.57);
  EXPECT_EQ(rows[7].line, 9);
}

TEST(ManifestTest, HeaderOrderCommentsAndAbsolutePaths) {
  const std::string text =
      "# A-57 style\n"
      "mos,distortion_label,dist_path,ref_path,extra\n"
      "\n"
      "# skipped\n"
      "  0.25 ,BLR,/abs/d.pgm,r.pgm,ignored\n";
  const std::vector<ManifestRow> rows = ParseManifestText(text, "base");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mos, 0.25);
  EXPECT_EQ(rows[0].distortion_label, "BLR");
  EXPECT_EQ(rows[0].dist_path, fs::path("/abs/d.pgm"));
  EXPECT_EQ(rows[0].ref_path, fs::path("base/r.pgm"));
  EXPECT_EQ(rows[0].line, 5);
}

TEST(ManifestTest, EmptyAfterHeader) {
  EXPECT_TRUE(ParseManifestText("ref_path,dist_path,mos,distortion_label\n", ".").empty());
}

TEST(ManifestTest, Errors) {
  const std::string header = "ref_path,dist_path,mos,distortion_label\n";
  try {
    ParseManifestText(header + "a,b,0.5,JPG\na,b,abc,JPG\n", ".");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseManifestText("ref_path,dist_path,mos\na,b,1\n", "."), InvalidInput);
  EXPECT_THROW(ParseManifestText(header + "a,b\n", "."), InvalidInput);
  EXPECT_THROW(ParseManifestText(header + "a,b,inf,JPG\n", "."), InvalidInput);
  EXPECT_THROW(ParseManifestText("", "."), InvalidInput);
  EXPECT_THROW(ParseManifest("/nonexistent/manifest.csv"), IoError);
}

}  // namespace
}  // namespace tetiqa

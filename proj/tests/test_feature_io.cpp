// Copyright 2026 The CRL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "crl/error.hpp"
#include "crl/feature_io.hpp"
#include "test_util.hpp"

using namespace crl;
using crl::testing::bits_equal;
using crl::testing::TempDir;

namespace {

ErrorCode decode_error(std::vector<std::uint8_t> bytes) {
  try {
    decode_bundle(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode_bundle accepted malformed input");
  return ErrorCode::kIo;
}

void put_u32(std::vector<std::uint8_t>& bytes, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

FeatureBundle small_bundle() {
  FeatureBundle b;
  b.shape = {1, 2, 2};
  b.labels = {"cat", "dog", "eel"};
  b.domain_tag = "toy";
  std::mt19937_64 rng(7);
  for (std::uint32_t i = 0; i < 10; ++i) {
    b.records.push_back({i % 3, AfmVector{crl::testing::random_vector(rng, 4), b.shape}});
  }
  return b;
}

}  // namespace

TEST_SUITE("feature_io") {

TEST_CASE("empty bundle is header plus label table") {
  FeatureBundle b;
  b.shape = {1, 1, 4};
  b.labels = {"a", "bc"};
  b.domain_tag = "";
  const auto bytes = encode_bundle(b);
  // magic + 28 header bytes (version, H, W, C, labels, records, tag length)
  // + label table (4+1, 4+2).
  CHECK(bytes.size() == 8 + 28 + (4 + 1) + (4 + 2));
  const auto back = decode_bundle(bytes);
  CHECK(back.records.empty());
  CHECK(back.labels == b.labels);
  CHECK(back.dim() == 4);
}

TEST_CASE("header layout is little-endian with declared shape") {
  FeatureBundle b;
  b.shape = {8, 8, 192};
  b.labels = {"x"};
  const auto bytes = encode_bundle(b);
  CHECK(std::string(bytes.begin(), bytes.begin() + 7) == "CRLAFM1");
  CHECK(bytes[7] == 0);
  CHECK(bytes[8] == 1);
  CHECK(bytes[9] == 0);
  CHECK(bytes[12] == 8);
  CHECK(bytes[20] == 192);
  CHECK(decode_bundle(bytes).dim() == 12288);
}

TEST_CASE("write then read returns a bit-identical bundle") {
  TempDir dir;
  const auto b = small_bundle();
  write_bundle(b, dir / "b.afm");
  const auto back = read_bundle(dir / "b.afm");
  CHECK(bits_equal(b, back));
  CHECK(back == b);
}

TEST_CASE("round trip holds for randomized bundles") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const auto b = crl::testing::random_bundle(rng);
    CHECK(bits_equal(decode_bundle(encode_bundle(b)), b));
  }
}

TEST_CASE("malformed files raise distinct errors") {
  const auto good = encode_bundle(small_bundle());

  SUBCASE("bad magic") {
    auto bytes = good;
    bytes[0] = 'X';
    CHECK(decode_error(bytes) == ErrorCode::kBadMagic);
  }
  SUBCASE("version mismatch") {
    auto bytes = good;
    put_u32(bytes, 8, 2);
    CHECK(decode_error(bytes) == ErrorCode::kVersionMismatch);
  }
  SUBCASE("truncated header") {
    CHECK(decode_error({good.begin(), good.begin() + 20}) == ErrorCode::kTruncatedHeader);
  }
  SUBCASE("declared records exceed data") {
    // 10 records of (4 + 4*4) bytes; drop the last one.
    CHECK(decode_error({good.begin(), good.end() - 20}) == ErrorCode::kTruncatedRecords);
    CHECK(decode_error({good.begin(), good.end() - 3}) == ErrorCode::kTruncatedRecords);
  }
  SUBCASE("trailing bytes") {
    auto bytes = good;
    bytes.push_back(0);
    CHECK(decode_error(bytes) == ErrorCode::kLengthMismatch);
  }
  SUBCASE("non-finite value") {
    auto bytes = good;
    put_u32(bytes, bytes.size() - 4, std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN()));
    CHECK(decode_error(bytes) == ErrorCode::kNonFinite);
    put_u32(bytes, bytes.size() - 4, std::bit_cast<std::uint32_t>(std::numeric_limits<float>::infinity()));
    CHECK(decode_error(bytes) == ErrorCode::kNonFinite);
  }
  SUBCASE("duplicate label") {
    auto b = small_bundle();
    b.labels = {"cat", "dog", "cat"};
    CHECK_THROWS_AS(encode_bundle(b), Error);
    // Forge the file directly: relabel "eel" to "dog" in the label table.
    auto bytes = good;
    const std::string text(bytes.begin(), bytes.end());
    const auto at = text.find("eel");
    REQUIRE(at != std::string::npos);
    bytes[at] = 'd';
    bytes[at + 1] = 'o';
    bytes[at + 2] = 'g';
    CHECK(decode_error(bytes) == ErrorCode::kDuplicateLabel);
  }
  SUBCASE("class id out of range") {
    auto bytes = good;
    const std::size_t first_record = bytes.size() - 10 * 20;
    put_u32(bytes, first_record, 3);
    CHECK(decode_error(bytes) == ErrorCode::kLabelOutOfRange);
  }
  SUBCASE("dimension beyond cap") {
    auto bytes = good;
    put_u32(bytes, 12, 4096);
    put_u32(bytes, 16, 4096);
    put_u32(bytes, 20, 2);
    CHECK(decode_error(bytes) == ErrorCode::kDimensionTooLarge);
  }
}

TEST_CASE("invalid bundle is rejected before the file is created") {
  TempDir dir;
  auto b = small_bundle();
  b.records[3].afm.values.pop_back();
  CHECK_THROWS_AS(write_bundle(b, dir / "bad.afm"), Error);
  CHECK_FALSE(std::filesystem::exists(dir / "bad.afm"));

  b = small_bundle();
  b.records[0].afm.values[0] = std::numeric_limits<float>::infinity();
  try {
    write_bundle(b, dir / "bad.afm");
    FAIL("accepted non-finite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
  }
}

TEST_CASE("missing file is an i/o error") {
  try {
    read_bundle("/nonexistent/crl/file.afm");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("parse_shape") {
  CHECK(parse_shape("8x8x192") == Shape{8, 8, 192});
  CHECK(parse_shape("1X2x3") == Shape{1, 2, 3});
  CHECK_THROWS_AS(parse_shape("8x8"), Error);
  CHECK_THROWS_AS(parse_shape("8x0x2"), Error);
  CHECK_THROWS_AS(parse_shape("8x8x2x"), Error);
}

TEST_CASE("synth_bundle is a pure function of its arguments") {
  const auto a = synth_bundle(4, 7, Shape{2, 2, 3}, 2.5, 99);
  const auto b = synth_bundle(4, 7, Shape{2, 2, 3}, 2.5, 99);
  CHECK(encode_bundle(a) == encode_bundle(b));
  const auto c = synth_bundle(4, 7, Shape{2, 2, 3}, 2.5, 100);
  CHECK(encode_bundle(a) != encode_bundle(c));
  CHECK(a.records.size() == 28);
  CHECK(a.class_counts() == std::vector<std::size_t>{7, 7, 7, 7});
}

TEST_CASE("class means honour the requested separation") {
  const auto means = place_class_means(20, 16, 3.0, 5);
  REQUIRE(means.size() == 20);
  const double radius = 3.0 * std::sqrt(20.0);
  for (std::size_t i = 0; i < means.size(); ++i) {
    double r2 = 0;
    for (double x : means[i]) r2 += x * x;
    CHECK(std::sqrt(r2) == doctest::Approx(radius).epsilon(1e-12));
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < 16; ++k) d2 += (means[i][k] - means[j][k]) * (means[i][k] - means[j][k]);
      CHECK(std::sqrt(d2) >= 3.0);
    }
  }
}

TEST_CASE("separation zero with one class draws around a single mean") {
  const auto b = synth_bundle(1, 500, Shape{1, 1, 2}, 0.0, 1);
  double sx = 0, sy = 0;
  for (const auto& r : b.records) {
    CHECK(r.class_id == 0);
    sx += r.afm.values[0];
    sy += r.afm.values[1];
  }
  // Mean sits at the origin (radius 0); sample mean within ~4 standard errors.
  CHECK(std::abs(sx / 500) < 0.18);
  CHECK(std::abs(sy / 500) < 0.18);
}

TEST_CASE("unreachable separation exhausts the retry budget") {
  // In one dimension the sphere is two points, so a third class cannot fit.
  try {
    place_class_means(3, 1, 1.0, 0);
    FAIL("placed three classes on a 0-sphere");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSeparationUnreachable);
  }
  CHECK_THROWS_AS(synth_bundle(0, 1, Shape{1, 1, 1}, 1.0, 0), Error);
  CHECK_THROWS_AS(synth_bundle(1, 0, Shape{1, 1, 1}, 1.0, 0), Error);
}

}  // TEST_SUITE

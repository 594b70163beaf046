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
#include <random>

#include "crl/class_rep.hpp"
#include "crl/error.hpp"
#include "crl/feature_io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace crl;
using crl::testing::bits_equal;
using crl::testing::TempDir;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected crl::Error");
  return ErrorCode::kIo;
}

FeatureBundle only_classes(const FeatureBundle& b, std::vector<std::uint32_t> keep) {
  FeatureBundle out = b;
  out.records.clear();
  for (const auto& r : b.records) {
    if (std::find(keep.begin(), keep.end(), r.class_id) != keep.end()) out.records.push_back(r);
  }
  return out;
}

}  // namespace

TEST_SUITE("class_rep") {

TEST_CASE("representative of one instance is that instance") {
  std::mt19937_64 rng(3);
  const AfmVector v{crl::testing::random_vector(rng, 50), Shape{5, 10, 1}};
  const auto cr = build_cr("only", std::span(&v, 1));
  CHECK(cr.count() == 1);
  CHECK(bits_equal(cr.vector(), v.values));
}

TEST_CASE("two orthogonal unit vectors average to (0.5, 0.5)") {
  const std::vector<AfmVector> in = {{{1, 0}, Shape{1, 1, 2}}, {{0, 1}, Shape{1, 1, 2}}};
  const auto cr = build_cr("c", in);
  CHECK(cr.count() == 2);
  CHECK(cr.vector()[0] == 0.5f);
  CHECK(cr.vector()[1] == 0.5f);
  CHECK(cr.norm() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("1000-instance mean agrees with an extended-precision mean") {
  std::mt19937_64 rng(11);
  std::lognormal_distribution<float> mag(0.0f, 2.0f);
  std::vector<AfmVector> in;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 1000; ++i) {
    auto v = crl::testing::random_vector(rng, 64);
    for (auto& x : v) x *= mag(rng);
    rows.push_back(v);
    in.push_back({v, Shape{8, 8, 1}});
  }
  const auto cr = build_cr("c", in);
  const auto ref = oracle::mean(rows);
  for (std::size_t j = 0; j < 64; ++j) {
    const long double err = std::abs(cr.vector()[j] - ref[j]);
    CHECK(static_cast<double>(err) <= 1e-6 * std::abs(static_cast<double>(ref[j])) + 1e-30);
  }
}

TEST_CASE("cached norm matches the vector") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto v = crl::testing::random_vector(rng, 1 + rng() % 300);
    const auto cr = ClassRepresentative::from_vector("x", 1, v);
    long double s = 0;
    for (float x : v) s += static_cast<long double>(x) * x;
    CHECK(std::abs(cr.norm() - std::sqrt(static_cast<double>(s))) <= 1e-12 * cr.norm());
  }
}

TEST_CASE("build_cr rejects degenerate input") {
  CHECK(error_of([] { build_cr("e", std::span<const AfmVector>{}); }) == ErrorCode::kEmptyInput);
  const std::vector<AfmVector> mixed = {{{1, 0}, Shape{1, 1, 2}}, {{1, 0, 0}, Shape{1, 1, 3}}};
  CHECK(error_of([&] { build_cr("m", mixed); }) == ErrorCode::kDimensionMismatch);
  const std::vector<AfmVector> cancel = {{{1, -2}, Shape{1, 1, 2}}, {{-1, 2}, Shape{1, 1, 2}}};
  CHECK(error_of([&] { build_cr("z", cancel); }) == ErrorCode::kZeroVector);
  CHECK(error_of([] { ClassRepresentative::from_vector("n", 0, {1.0f}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("per-class representatives are independent of other classes") {
  const auto b = synth_bundle(5, 20, Shape{2, 2, 4}, 3.0, 8);
  const auto joint = build_model(b);
  const auto alone = build_model(only_classes(b, {2}));
  REQUIRE(alone.size() == 1);
  CHECK(bits_equal(*joint.find("class_2"), alone.crs()[0]));
  const auto pair = build_model(only_classes(b, {0, 4}));
  CHECK(pair.size() == 2);
  CHECK(bits_equal(*joint.find("class_4"), *pair.find("class_4")));
}

TEST_CASE("max_per_class keeps the first records in bundle order") {
  const auto b = synth_bundle(3, 6, Shape{1, 1, 8}, 2.0, 4);
  BuildOptions opts;
  opts.max_per_class = 1;
  const auto m = build_model(b, opts);
  for (std::uint32_t c = 0; c < 3; ++c) {
    const auto& first = b.records[c * 6].afm.values;
    const auto* cr = m.find(b.labels[c]);
    REQUIRE(cr != nullptr);
    CHECK(cr->count() == 1);
    CHECK(bits_equal(cr->vector(), first));
  }
  opts.max_per_class = 100;
  CHECK(build_model(b, opts).find("class_0")->count() == 6);
  CHECK(build_model(b, opts).metadata().built_from == "records=18;max_per_class=100");
}

TEST_CASE("classes without records are omitted; empty bundles are rejected") {
  auto b = synth_bundle(3, 4, Shape{1, 1, 4}, 2.0, 2);
  b.labels.push_back("ghost");
  const auto m = build_model(b);
  CHECK(m.size() == 3);
  CHECK_FALSE(m.contains("ghost"));
  b.records.clear();
  CHECK(error_of([&] { build_model(b); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("average pooling reduces 8x8x192 models to 3072 dimensions") {
  const auto b = synth_bundle(2, 3, Shape{8, 8, 192}, 1.0, 6);
  BuildOptions opts;
  opts.pooling = PoolingSpec{PoolMode::kAvg, 2, 2, 2, 2};
  const auto m = build_model(b, opts);
  CHECK(m.shape() == Shape{4, 4, 192});
  CHECK(m.dim() == 3072);
  CHECK(m.metadata().pooling == "avg:2x2/2x2");
  CHECK(m.metadata().source_env == "synth");
}

TEST_CASE("mean and average pooling commute") {
  std::mt19937_64 rng(21);
  const Shape shape{6, 6, 3};
  std::vector<AfmVector> in;
  std::vector<AfmVector> pooled;
  const PoolingSpec spec{PoolMode::kAvg, 2, 2, 2, 2};
  for (int i = 0; i < 40; ++i) {
    in.push_back({crl::testing::random_vector(rng, shape.dim()), shape});
    pooled.push_back(pool(in.back(), spec));
  }
  const auto cr = build_cr("c", in);
  const auto pool_after = pool(AfmVector{{cr.vector().begin(), cr.vector().end()}, shape}, spec);
  const auto pool_before = build_cr("c", pooled);
  for (std::size_t j = 0; j < pool_after.dim(); ++j) {
    CHECK(std::abs(pool_after.values[j] - pool_before.vector()[j]) <= 1e-6);
  }
}

TEST_CASE("max pooling does not commute with the mean, so instances are pooled first") {
  // Two 2x1 instances: (1, 0) and (0, 1). Max of each is 1, so pooling
  // first gives 1; pooling the mean (0.5, 0.5) gives 0.5.
  const std::vector<AfmVector> in = {{{1, 0}, Shape{2, 1, 1}}, {{0, 1}, Shape{2, 1, 1}}};
  const PoolingSpec spec{PoolMode::kMax, 2, 1, 2, 1};
  FeatureBundle b{Shape{2, 1, 1}, {"c"}, {{0, in[0]}, {0, in[1]}}, "t"};
  BuildOptions opts;
  opts.pooling = spec;
  CHECK(build_model(b, opts).crs()[0].vector()[0] == 1.0f);
  CHECK(pool(AfmVector{{0.5f, 0.5f}, Shape{2, 1, 1}}, spec).values[0] == 0.5f);
}

TEST_CASE("duplicating every instance leaves the representative unchanged") {
  std::mt19937_64 rng(99);
  std::vector<AfmVector> in;
  for (int i = 0; i < 30; ++i) in.push_back({crl::testing::random_vector(rng, 32), Shape{1, 1, 32}});
  for (int k : {2, 3, 10}) {
    std::vector<AfmVector> dup;
    for (int r = 0; r < k; ++r) dup.insert(dup.end(), in.begin(), in.end());
    const auto a = build_cr("c", in);
    const auto b = build_cr("c", dup);
    for (std::size_t j = 0; j < 32; ++j) {
      CHECK(std::abs(a.vector()[j] - b.vector()[j]) <= 1e-7 * std::abs(a.vector()[j]));
    }
  }
}

TEST_CASE("thread count never changes the model") {
  const auto b = synth_bundle(12, 25, Shape{2, 2, 8}, 3.0, 13);
  BuildOptions opts;
  opts.threads = 1;
  const auto ref = encode_model(build_model(b, opts));
  for (unsigned t : {2u, 3u, 4u, 16u, 0u}) {
    opts.threads = t;
    CHECK(encode_model(build_model(b, opts)) == ref);
  }
}

TEST_CASE("merge is a union that leaves every representative untouched") {
  std::mt19937_64 rng(1);
  const auto a = crl::testing::random_model(rng, 3, 16, "a");
  const auto b = crl::testing::random_model(rng, 4, 16, "b");
  const auto m = merge_models(a, b);
  CHECK(m.size() == 7);
  for (const auto& cr : a.crs()) CHECK(bits_equal(*m.find(cr.class_name()), cr));
  for (const auto& cr : b.crs()) CHECK(bits_equal(*m.find(cr.class_name()), cr));

  CHECK(merge_models(a, CrModel(a.shape())) == a);
  CHECK(error_of([&] { merge_models(a, a); }) == ErrorCode::kDuplicateLabel);
  const auto other = crl::testing::random_model(rng, 2, 8, "z");
  CHECK(error_of([&] { merge_models(a, other); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("rename_colliding prefixes only clashing names") {
  std::mt19937_64 rng(2);
  const auto a = crl::testing::random_model(rng, 3, 8, "c");
  const auto b = crl::testing::random_model(rng, 5, 8, "c");
  const auto renamed = rename_colliding(a, b, "src:");
  CHECK(renamed.contains("src:c0"));
  CHECK(renamed.contains("src:c2"));
  CHECK(renamed.contains("c3"));
  CHECK(merge_models(a, renamed).size() == 8);
}

TEST_CASE("model files round-trip") {
  TempDir dir;
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    auto m = crl::testing::random_model(rng, 1 + rng() % 10, 1 + rng() % 64);
    m.metadata() = {"env" + std::to_string(t), "mixed_7", t % 2 ? "none" : "max:2x2/2x2", "x=1"};
    save_model(m, dir / "m.crl");
    const auto back = load_model(dir / "m.crl");
    CHECK(bits_equal(back, m));
    CHECK(back == m);
  }
}

TEST_CASE("vector payload is four bytes per dimension") {
  std::mt19937_64 rng(4);
  CrModel m(Shape{4, 4, 192});
  m.add(ClassRepresentative::from_vector("one", 5, crl::testing::random_vector(rng, 3072)));
  const std::size_t base = encode_model(CrModel(Shape{4, 4, 192})).size();
  // name (4 + 3) + count (8) + 3072 floats.
  CHECK(encode_model(m).size() - base == 4 + 3 + 8 + 12288);
}

TEST_CASE("malformed model files raise designated errors") {
  std::mt19937_64 rng(8);
  const auto good = encode_model(crl::testing::random_model(rng, 3, 10));
  auto code = [](std::vector<std::uint8_t> bytes) {
    return error_of([&] { decode_model(bytes); });
  };
  CHECK(code({good.begin(), good.end() - 1}) == ErrorCode::kTruncatedRecords);
  CHECK(code({good.begin(), good.end() - 44}) == ErrorCode::kTruncatedRecords);
  CHECK(code({good.begin(), good.begin() + 10}) == ErrorCode::kTruncatedHeader);
  auto bad = good;
  bad[3] = 'X';
  CHECK(code(bad) == ErrorCode::kBadMagic);
  bad = good;
  bad[8] = 9;
  CHECK(code(bad) == ErrorCode::kVersionMismatch);
  bad = good;
  bad.push_back(1);
  CHECK(code(bad) == ErrorCode::kLengthMismatch);
  // Bundle files are not models.
  CHECK(code(encode_bundle(synth_bundle(1, 1, Shape{1, 1, 1}, 0, 0))) == ErrorCode::kBadMagic);
}

TEST_CASE("zero and duplicate representatives in a file are rejected") {
  CrModel m(Shape{1, 1, 2});
  m.add(ClassRepresentative::from_vector("a", 1, {1.0f, 0.0f}));
  auto bytes = encode_model(m);
  // Overwrite the single vector with zeros.
  std::fill(bytes.end() - 8, bytes.end(), 0);
  CHECK(error_of([&] { decode_model(bytes); }) == ErrorCode::kZeroVector);

  m.add(ClassRepresentative::from_vector("b", 1, {0.0f, 1.0f}));
  bytes = encode_model(m);
  const std::string text(bytes.begin(), bytes.end());
  bytes[text.rfind('b')] = 'a';
  CHECK(error_of([&] { decode_model(bytes); }) == ErrorCode::kDuplicateLabel);
}

TEST_CASE("metadata values cannot contain line breaks") {
  CrModel m(Shape{1, 1, 1});
  m.metadata().layer = "bad\nlayer";
  CHECK(error_of([&] { encode_model(m); }) == ErrorCode::kInvalidArgument);
}

}  // TEST_SUITE

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

#include "crl/feature_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

#include "binary_io.hpp"
#include "crl/error.hpp"

namespace crl {

std::string Shape::str() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" +
         std::to_string(channels);
}

Shape parse_shape(const std::string& text) {
  std::uint32_t parts[3] = {0, 0, 0};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, parts[i]);
    if (ec != std::errc() || parts[i] == 0) {
      throw Error(ErrorCode::kInvalidArgument, "expected shape HxWxC, got '" + text + "'");
    }
    p = next;
    if (i < 2) {
      if (p == end || (*p != 'x' && *p != 'X')) {
        throw Error(ErrorCode::kInvalidArgument, "expected shape HxWxC, got '" + text + "'");
      }
      ++p;
    }
  }
  if (p != end) {
    throw Error(ErrorCode::kInvalidArgument, "expected shape HxWxC, got '" + text + "'");
  }
  return Shape{parts[0], parts[1], parts[2]};
}

void AfmVector::validate() const {
  if (values.size() != shape.dim()) {
    throw Error(ErrorCode::kLengthMismatch,
                "afm has " + std::to_string(values.size()) + " values but shape " +
                    shape.str() + " needs " + std::to_string(shape.dim()));
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      throw Error(ErrorCode::kNonFinite, "afm value " + std::to_string(j));
    }
  }
}

void FeatureBundle::validate() const {
  if (dim() == 0) {
    throw Error(ErrorCode::kLengthMismatch, "bundle shape " + shape.str() + " is empty");
  }
  if (dim() > kMaxDim) {
    throw Error(ErrorCode::kDimensionTooLarge, "bundle dim " + std::to_string(dim()));
  }
  std::set<std::string_view> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::kDuplicateLabel, "'" + label + "'");
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.class_id >= labels.size()) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "record " + std::to_string(i) + " has class id " +
                      std::to_string(rec.class_id));
    }
    if (rec.afm.shape != shape) {
      throw Error(ErrorCode::kLengthMismatch,
                  "record " + std::to_string(i) + " has shape " + rec.afm.shape.str() +
                      ", bundle declares " + shape.str());
    }
    rec.afm.validate();
  }
}

std::vector<std::size_t> FeatureBundle::class_counts() const {
  std::vector<std::size_t> counts(labels.size(), 0);
  for (const auto& rec : records) {
    if (rec.class_id < counts.size()) ++counts[rec.class_id];
  }
  return counts;
}

std::vector<std::uint8_t> encode_bundle(const FeatureBundle& bundle) {
  bundle.validate();
  detail::ByteWriter w;
  w.raw(kBundleMagic);
  w.u32(kBundleVersion);
  w.u32(bundle.shape.height);
  w.u32(bundle.shape.width);
  w.u32(bundle.shape.channels);
  w.u32(static_cast<std::uint32_t>(bundle.labels.size()));
  w.u32(static_cast<std::uint32_t>(bundle.records.size()));
  w.str(bundle.domain_tag);
  for (const auto& label : bundle.labels) w.str(label);
  for (const auto& rec : bundle.records) {
    w.u32(rec.class_id);
    for (float v : rec.afm.values) w.f32(v);
  }
  return w.take();
}

FeatureBundle decode_bundle(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  auto magic = r.take(sizeof(kBundleMagic), "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kBundleMagic),
                  [](std::uint8_t a, char b) { return a == static_cast<std::uint8_t>(b); })) {
    throw Error(ErrorCode::kBadMagic, "not a CRLAFM1 feature bundle");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kBundleVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "bundle version " + std::to_string(version) + ", expected 1");
  }
  FeatureBundle bundle;
  bundle.shape.height = r.u32("height");
  bundle.shape.width = r.u32("width");
  bundle.shape.channels = r.u32("channels");
  const std::size_t dim = bundle.shape.dim();
  if (dim == 0) {
    throw Error(ErrorCode::kLengthMismatch, "bundle shape " + bundle.shape.str() + " is empty");
  }
  if (dim > kMaxDim) {
    throw Error(ErrorCode::kDimensionTooLarge, "bundle dim " + std::to_string(dim));
  }
  const std::uint32_t num_labels = r.u32("num_labels");
  const std::uint32_t num_records = r.u32("num_records");
  bundle.domain_tag = r.str("domain tag");

  std::set<std::string> seen;
  bundle.labels.reserve(std::min<std::size_t>(num_labels, r.remaining() / 4));
  for (std::uint32_t i = 0; i < num_labels; ++i) {
    std::string label = r.str("label table");
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::kDuplicateLabel, "'" + label + "'");
    }
    bundle.labels.push_back(std::move(label));
  }

  r.set_truncation_code(ErrorCode::kTruncatedRecords);
  const std::size_t record_bytes = 4 + 4 * dim;
  if (r.remaining() / record_bytes < num_records) {
    throw Error(ErrorCode::kTruncatedRecords,
                "header declares " + std::to_string(num_records) + " records, data holds " +
                    std::to_string(r.remaining() / record_bytes));
  }
  bundle.records.resize(num_records);
  for (std::uint32_t i = 0; i < num_records; ++i) {
    auto& rec = bundle.records[i];
    rec.class_id = r.u32("class id");
    if (rec.class_id >= num_labels) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "record " + std::to_string(i) + " has class id " +
                      std::to_string(rec.class_id));
    }
    rec.afm.shape = bundle.shape;
    rec.afm.values.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const float v = r.f32("record values");
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite,
                    "record " + std::to_string(i) + " value " + std::to_string(j));
      }
      rec.afm.values[j] = v;
    }
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(r.remaining()) + " trailing bytes after last record");
  }
  return bundle;
}

void write_bundle(const FeatureBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = encode_bundle(bundle);
  detail::write_file(path, bytes);
}

FeatureBundle read_bundle(const std::filesystem::path& path) {
  return decode_bundle(detail::read_file(path));
}

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
}

}  // namespace detail

namespace {

constexpr std::size_t kPlacementBudget = 10000;
constexpr std::uint64_t kSampleStream = 0x9E3779B97F4A7C15ull;

std::vector<double> random_direction(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm2 = 0.0;
  while (norm2 == 0.0) {
    norm2 = 0.0;
    for (auto& x : v) {
      x = gauss(rng);
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<std::vector<double>> place_class_means(std::size_t num_classes,
                                                   std::size_t dim,
                                                   double separation,
                                                   std::uint64_t seed) {
  if (num_classes == 0 || dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one class and dimension");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw Error(ErrorCode::kInvalidArgument, "separation must be finite and >= 0");
  }
  std::mt19937_64 rng(seed);
  const double radius = separation * std::sqrt(static_cast<double>(num_classes));
  std::vector<std::vector<double>> means;
  means.reserve(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kPlacementBudget && !placed; ++attempt) {
      auto candidate = random_direction(dim, rng);
      for (auto& x : candidate) x *= radius;
      bool ok = true;
      for (const auto& m : means) {
        if (distance(candidate, m) < separation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        means.push_back(std::move(candidate));
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorCode::kSeparationUnreachable,
                  "could not place class " + std::to_string(c) + " of " +
                      std::to_string(num_classes) + " at separation " +
                      std::to_string(separation) + " in dim " + std::to_string(dim));
    }
  }
  return means;
}

FeatureBundle synth_bundle_around(const std::vector<std::vector<double>>& means,
                                  std::size_t per_class, Shape shape,
                                  std::uint64_t seed, std::vector<std::string> labels,
                                  std::string domain_tag) {
  if (means.empty() || per_class == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one class and one instance per class");
  }
  const std::size_t dim = shape.dim();
  if (dim == 0 || dim > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument, "shape " + shape.str() + " out of range");
  }
  if (labels.empty()) {
    for (std::size_t c = 0; c < means.size(); ++c) labels.push_back("class_" + std::to_string(c));
  }
  if (labels.size() != means.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one label per mean required");
  }

  FeatureBundle bundle;
  bundle.shape = shape;
  bundle.labels = std::move(labels);
  bundle.domain_tag = std::move(domain_tag);
  bundle.records.reserve(means.size() * per_class);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t c = 0; c < means.size(); ++c) {
    if (means[c].size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "mean " + std::to_string(c) + " has length " + std::to_string(means[c].size()));
    }
    for (std::size_t i = 0; i < per_class; ++i) {
      LabeledInstance rec;
      rec.class_id = static_cast<std::uint32_t>(c);
      rec.afm.shape = shape;
      rec.afm.values.resize(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        rec.afm.values[j] = static_cast<float>(means[c][j] + gauss(rng));
      }
      bundle.records.push_back(std::move(rec));
    }
  }
  return bundle;
}

FeatureBundle synth_bundle(std::size_t num_classes, std::size_t per_class, Shape shape,
                           double separation, std::uint64_t seed) {
  if (num_classes == 0 || per_class == 0) {
    throw Error(ErrorCode::kInvalidArgument, "num_classes and per_class must be >= 1");
  }
  auto means = place_class_means(num_classes, shape.dim(), separation, seed);
  return synth_bundle_around(means, per_class, shape, seed ^ kSampleStream);
}

}  // namespace crl

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

#ifndef CRL_CLASS_REP_HPP_
#define CRL_CLASS_REP_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crl/pooling.hpp"
#include "crl/types.hpp"

namespace crl {

/// Per-class mean activation vector. Construct through build_cr or
/// ClassRepresentative::from_vector so the cached norm always matches.
class ClassRepresentative {
 public:
  /// Throws Error(kZeroVector) for an all-zero vector, kNonFinite for
  /// NaN/Inf, kInvalidArgument for count == 0.
  static ClassRepresentative from_vector(std::string class_name, std::uint64_t count,
                                         std::vector<float> vector);

  const std::string& class_name() const { return class_name_; }
  std::uint64_t count() const { return count_; }
  std::span<const float> vector() const { return vector_; }
  std::size_t dim() const { return vector_.size(); }
  double norm() const { return norm_; }

  ClassRepresentative renamed(std::string class_name) const;

  friend bool operator==(const ClassRepresentative&, const ClassRepresentative&) = default;

 private:
  ClassRepresentative() = default;

  std::string class_name_;
  std::uint64_t count_ = 0;
  std::vector<float> vector_;
  double norm_ = 0.0;
};

/// Euclidean norm with a 64-bit accumulator.
double l2_norm(std::span<const float> v);

/// Mean of `instances`, accumulated in input order in double and stored
/// as float. Independent of every other class.
ClassRepresentative build_cr(std::string class_name, std::span<const AfmVector> instances);

struct ModelMetadata {
  std::string source_env;
  std::string layer;
  std::string pooling = "none";
  std::string built_from;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

/// An ordered set of class representatives over one feature grid.
class CrModel {
 public:
  CrModel() = default;
  explicit CrModel(Shape shape, ModelMetadata metadata = {});

  /// Throws kDimensionMismatch on a length mismatch and kDuplicateLabel
  /// if the name is already present.
  void add(ClassRepresentative cr);

  const Shape& shape() const { return shape_; }
  std::size_t dim() const { return shape_.dim(); }
  std::size_t size() const { return crs_.size(); }
  bool empty() const { return crs_.empty(); }
  const std::vector<ClassRepresentative>& crs() const { return crs_; }
  const ClassRepresentative* find(std::string_view class_name) const;
  bool contains(std::string_view class_name) const { return find(class_name) != nullptr; }

  const ModelMetadata& metadata() const { return metadata_; }
  ModelMetadata& metadata() { return metadata_; }

  friend bool operator==(const CrModel&, const CrModel&) = default;

 private:
  Shape shape_;
  std::vector<ClassRepresentative> crs_;
  ModelMetadata metadata_;
};

struct BuildOptions {
  /// Use only the first N records of each class, in bundle order.
  std::optional<std::size_t> max_per_class;
  /// Pool every instance before aggregation.
  std::optional<PoolingSpec> pooling;
  std::string layer;
  unsigned threads = 0;
};

/// One CR per class present in the bundle, in label-table order. Classes
/// run concurrently; each class sums its records sequentially so the result
/// is bit-identical for every thread count.
CrModel build_model(const FeatureBundle& bundle, const BuildOptions& options = {});

/// Union of two models over the same grid. CRs are copied unchanged.
/// Throws kDimensionMismatch on shape mismatch, kDuplicateLabel on a name
/// present in both.
CrModel merge_models(const CrModel& a, const CrModel& b);

/// Copy of `b` where each class name also present in `a` gets `prefix`
/// prepended.
CrModel rename_colliding(const CrModel& a, const CrModel& b, const std::string& prefix);

// Model Format v1 (little-endian):
//   "CRLMDL1\0", u32 version, u32 H, u32 W, u32 C, u32 num_crs,
//   u32 metadata_len, metadata (key=value lines),
//   num_crs x (u32 name_len, name, u64 count, dim x f32)
inline constexpr char kModelMagic[8] = {'C', 'R', 'L', 'M', 'D', 'L', '1', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

std::vector<std::uint8_t> encode_model(const CrModel& model);
CrModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const CrModel& model, const std::filesystem::path& path);
CrModel load_model(const std::filesystem::path& path);

}  // namespace crl

#endif  // CRL_CLASS_REP_HPP_

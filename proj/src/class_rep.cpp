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

#include "crl/class_rep.hpp"

#include <algorithm>
#include <cmath>

#include "crl/error.hpp"
#include "crl/parallel.hpp"

namespace crl {

double l2_norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

ClassRepresentative ClassRepresentative::from_vector(std::string class_name,
                                                     std::uint64_t count,
                                                     std::vector<float> vector) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "class '" + class_name + "' has count 0");
  }
  for (float x : vector) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFinite, "class '" + class_name + "' representative");
    }
  }
  const double norm = l2_norm(vector);
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kZeroVector, "class '" + class_name + "' representative is all zeros");
  }
  ClassRepresentative cr;
  cr.class_name_ = std::move(class_name);
  cr.count_ = count;
  cr.vector_ = std::move(vector);
  cr.norm_ = norm;
  return cr;
}

ClassRepresentative ClassRepresentative::renamed(std::string class_name) const {
  ClassRepresentative cr = *this;
  cr.class_name_ = std::move(class_name);
  return cr;
}

namespace {

// Running sum for one class. Callers feed records in bundle order.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(std::size_t dim) : sum_(dim, 0.0) {}

  void add(std::span<const float> v) {
    if (v.size() != sum_.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "instance of length " + std::to_string(v.size()) + ", expected " +
                      std::to_string(sum_.size()));
    }
    for (std::size_t j = 0; j < v.size(); ++j) sum_[j] += v[j];
    ++count_;
  }

  ClassRepresentative finish(std::string class_name) const {
    if (count_ == 0) {
      throw Error(ErrorCode::kEmptyInput, "class '" + class_name + "' has no instances");
    }
    std::vector<float> mean(sum_.size());
    const double n = static_cast<double>(count_);
    for (std::size_t j = 0; j < sum_.size(); ++j) {
      mean[j] = static_cast<float>(sum_[j] / n);
    }
    return ClassRepresentative::from_vector(std::move(class_name), count_, std::move(mean));
  }

 private:
  std::vector<double> sum_;
  std::uint64_t count_ = 0;
};

}  // namespace

ClassRepresentative build_cr(std::string class_name, std::span<const AfmVector> instances) {
  if (instances.empty()) {
    throw Error(ErrorCode::kEmptyInput, "class '" + class_name + "' has no instances");
  }
  MeanAccumulator acc(instances.front().dim());
  for (const auto& afm : instances) acc.add(afm.values);
  return acc.finish(std::move(class_name));
}

CrModel::CrModel(Shape shape, ModelMetadata metadata)
    : shape_(shape), metadata_(std::move(metadata)) {}

void CrModel::add(ClassRepresentative cr) {
  if (cr.dim() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "representative '" + cr.class_name() + "' has dim " + std::to_string(cr.dim()) +
                    ", model grid " + shape_.str() + " needs " + std::to_string(dim()));
  }
  if (contains(cr.class_name())) {
    throw Error(ErrorCode::kDuplicateLabel, "class '" + cr.class_name() + "' already in model");
  }
  crs_.push_back(std::move(cr));
}

const ClassRepresentative* CrModel::find(std::string_view class_name) const {
  auto it = std::find_if(crs_.begin(), crs_.end(),
                         [&](const auto& cr) { return cr.class_name() == class_name; });
  return it == crs_.end() ? nullptr : &*it;
}

CrModel build_model(const FeatureBundle& bundle, const BuildOptions& options) {
  bundle.validate();
  if (bundle.records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "bundle '" + bundle.domain_tag + "' has no records");
  }
  if (options.max_per_class && *options.max_per_class == 0) {
    throw Error(ErrorCode::kEmptyInput, "max_per_class 0 leaves every class empty");
  }
  const Shape out_shape =
      options.pooling ? pooled_shape(bundle.shape, *options.pooling) : bundle.shape;

  // Record indices per class, bundle order, capped.
  std::vector<std::vector<std::size_t>> members(bundle.labels.size());
  for (std::size_t i = 0; i < bundle.records.size(); ++i) {
    auto& m = members[bundle.records[i].class_id];
    if (!options.max_per_class || m.size() < *options.max_per_class) m.push_back(i);
  }
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (!members[c].empty()) present.push_back(c);
  }

  std::vector<std::optional<ClassRepresentative>> built(present.size());
  parallel_for(present.size(), options.threads, [&](std::size_t slot) {
    const std::size_t c = present[slot];
    MeanAccumulator acc(out_shape.dim());
    for (std::size_t i : members[c]) {
      const AfmVector& afm = bundle.records[i].afm;
      if (options.pooling) {
        acc.add(pool(afm, *options.pooling).values);
      } else {
        acc.add(afm.values);
      }
    }
    built[slot] = acc.finish(bundle.labels[c]);
  });

  ModelMetadata meta;
  meta.source_env = bundle.domain_tag;
  meta.layer = options.layer;
  meta.pooling = options.pooling ? options.pooling->str() : "none";
  meta.built_from = "records=" + std::to_string(bundle.records.size()) + ";max_per_class=" +
                    (options.max_per_class ? std::to_string(*options.max_per_class) : "all");
  CrModel model(out_shape, std::move(meta));
  for (auto& cr : built) model.add(std::move(*cr));
  return model;
}

CrModel merge_models(const CrModel& a, const CrModel& b) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot merge grid " + a.shape().str() + " with " + b.shape().str());
  }
  CrModel out(a.shape(), a.metadata());
  for (const auto& cr : a.crs()) out.add(cr);
  for (const auto& cr : b.crs()) {
    if (out.contains(cr.class_name())) {
      throw Error(ErrorCode::kDuplicateLabel,
                  "class '" + cr.class_name() + "' present in both models; rename before merging");
    }
    out.add(cr);
  }
  if (!b.empty()) {
    auto& meta = out.metadata();
    if (meta.source_env != b.metadata().source_env) {
      meta.source_env += "+" + b.metadata().source_env;
    }
    meta.built_from = "merge(" + a.metadata().built_from + "|" + b.metadata().built_from + ")";
  }
  return out;
}

CrModel rename_colliding(const CrModel& a, const CrModel& b, const std::string& prefix) {
  CrModel out(b.shape(), b.metadata());
  for (const auto& cr : b.crs()) {
    if (a.contains(cr.class_name())) {
      out.add(cr.renamed(prefix + cr.class_name()));
    } else {
      out.add(cr);
    }
  }
  return out;
}

}  // namespace crl

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

#include "crl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "crl/error.hpp"
#include "crl/parallel.hpp"

namespace crl {

namespace {

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += static_cast<double>(a[j]) * static_cast<double>(b[j]);
  }
  return s;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

Prediction rank_models(std::span<const float> query, std::span<const CrModel* const> models,
                       std::size_t k) {
  std::size_t total = 0;
  for (const CrModel* m : models) {
    if (m->dim() != query.size() && !m->empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "query has dim " + std::to_string(query.size()) + ", model grid " +
                      m->shape().str() + " has dim " + std::to_string(m->dim()));
    }
    total += m->size();
  }
  if (total == 0) throw Error(ErrorCode::kEmptyInput, "model has no class representatives");
  if (k == 0 || k > total) {
    throw Error(ErrorCode::kInvalidArgument,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(total) + "]");
  }
  const double qnorm = l2_norm(query);
  if (!(qnorm > 0.0)) throw Error(ErrorCode::kZeroVector, "query has zero norm");

  std::vector<RankedClass> scored;
  scored.reserve(total);
  for (const CrModel* m : models) {
    for (const auto& cr : m->crs()) {
      scored.push_back({cr.class_name(), clamp_unit(dot(query, cr.vector()) / (qnorm * cr.norm()))});
    }
  }
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    ranks_before);
  scored.resize(k);
  return Prediction{std::move(scored)};
}

}  // namespace

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return clamp_unit(dot(a, b) / (na * nb));
}

bool ranks_before(const RankedClass& a, const RankedClass& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.class_name < b.class_name;
}

std::optional<std::size_t> Prediction::rank_of(std::string_view class_name) const {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].class_name == class_name) return i + 1;
  }
  return std::nullopt;
}

Prediction classify(std::span<const float> query, const CrModel& model, std::size_t k) {
  const CrModel* models[] = {&model};
  return rank_models(query, models, k);
}

Prediction classify_task(std::span<const float> query, const CrModel& target_model,
                         const CrModel* source_model, std::size_t k) {
  if (source_model == nullptr) return classify(query, target_model, k);
  if (source_model->shape() != target_model.shape()) {
    throw Error(ErrorCode::kDimensionMismatch, "source grid " + source_model->shape().str() +
                                                   " vs target grid " + target_model.shape().str());
  }
  for (const auto& cr : target_model.crs()) {
    if (source_model->contains(cr.class_name())) {
      throw Error(ErrorCode::kDuplicateLabel,
                  "class '" + cr.class_name() + "' present in both models; rename before merging");
    }
  }
  const CrModel* models[] = {source_model, &target_model};
  return rank_models(query, models, k);
}

BatchResult classify_batch(const FeatureBundle& bundle, const CrModel& model, std::size_t k,
                           unsigned threads) {
  if (!bundle.records.empty() && bundle.dim() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features have dim " + std::to_string(bundle.dim()) + ", model has " +
                    std::to_string(model.dim()));
  }
  BatchResult result;
  result.predictions.resize(bundle.records.size());
  parallel_for(bundle.records.size(), threads, [&](std::size_t i) {
    result.predictions[i] = classify(bundle.records[i].afm, model, k);
  });
  if (bundle.records.empty()) return result;

  result.topk_hits.assign(k, 0);
  for (std::size_t i = 0; i < bundle.records.size(); ++i) {
    const auto& truth = bundle.labels[bundle.records[i].class_id];
    if (auto rank = result.predictions[i].rank_of(truth)) {
      for (std::size_t m = *rank; m <= k; ++m) ++result.topk_hits[m - 1];
    }
  }
  const double n = static_cast<double>(bundle.records.size());
  for (std::size_t hits : result.topk_hits) result.topk_accuracy.push_back(hits / n);
  return result;
}

void write_predictions_csv(std::ostream& out, const FeatureBundle& bundle,
                           const std::vector<Prediction>& predictions) {
  if (predictions.size() != bundle.records.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predictions do not align with records");
  }
  char buf[32];
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out << i << ',' << bundle.labels[bundle.records[i].class_id];
    for (const auto& r : predictions[i].ranked) {
      std::snprintf(buf, sizeof(buf), "%.6f", r.score);
      out << ',' << r.class_name << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace crl

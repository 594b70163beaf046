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

#ifndef CRL_INFERENCE_HPP_
#define CRL_INFERENCE_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crl/class_rep.hpp"
#include "crl/types.hpp"

namespace crl {

/// a.b / (|a||b|) with 64-bit accumulation, clamped to [-1, 1].
/// Throws kDimensionMismatch or kZeroVector.
double cosine(std::span<const float> a, std::span<const float> b);

struct RankedClass {
  std::string class_name;
  double score = 0.0;

  friend bool operator==(const RankedClass&, const RankedClass&) = default;
};

/// Top-k classes by descending score; equal scores order by ascending
/// class name (byte-wise).
struct Prediction {
  std::vector<RankedClass> ranked;

  const RankedClass& top() const { return ranked.front(); }
  /// 1-based rank of `class_name`, or nullopt when it is not in the list.
  std::optional<std::size_t> rank_of(std::string_view class_name) const;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Ordering used everywhere a ranking is formed: higher score first, then
/// smaller name.
bool ranks_before(const RankedClass& a, const RankedClass& b);

Prediction classify(std::span<const float> query, const CrModel& model, std::size_t k);
inline Prediction classify(const AfmVector& query, const CrModel& model, std::size_t k) {
  return classify(query.span(), model, k);
}

/// Without a source model this is classify against the target (T=>T).
/// With one, the query is scored over the union of source and target
/// classes (T=>S+T).
Prediction classify_task(std::span<const float> query, const CrModel& target_model,
                         const CrModel* source_model, std::size_t k);

struct BatchResult {
  std::vector<Prediction> predictions;  // one per record, input order
  /// topk_accuracy[m-1] = fraction of records whose true label is within
  /// the first m ranks. Empty when the bundle has no records.
  std::vector<double> topk_accuracy;
  std::vector<std::size_t> topk_hits;
};

BatchResult classify_batch(const FeatureBundle& bundle, const CrModel& model, std::size_t k,
                           unsigned threads = 0);

/// Rows of "record_index,true_label,rank1_label,rank1_score,..." with
/// six-decimal scores.
void write_predictions_csv(std::ostream& out, const FeatureBundle& bundle,
                           const std::vector<Prediction>& predictions);

}  // namespace crl

#endif  // CRL_INFERENCE_HPP_

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

#include "crl/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "crl/error.hpp"
#include "crl/inference.hpp"
#include "crl/parallel.hpp"

namespace crl {

GcsMode parse_gcs_mode(const std::string& text) {
  if (text == "mean") return GcsMode::kMean;
  if (text == "sum") return GcsMode::kSum;
  throw Error(ErrorCode::kInvalidArgument, "gcs mode must be mean or sum, got '" + text + "'");
}

DomainProfile profile(const CrModel& model, GcsMode mode, unsigned threads) {
  return profile(model, model.metadata().source_env, mode, threads);
}

DomainProfile profile(const CrModel& model, std::string model_id, GcsMode mode,
                      unsigned threads) {
  const std::size_t c = model.size();
  if (c < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "profile needs at least 2 classes, model has " + std::to_string(c));
  }
  const auto& crs = model.crs();

  // Full symmetric similarity matrix; row i is filled by one worker.
  std::vector<double> sim(c * c, 1.0);
  parallel_for(c, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < c; ++j) sim[i * c + j] = cosine(crs[i].vector(), crs[j].vector());
  });
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < i; ++j) sim[i * c + j] = sim[j * c + i];
  }

  DomainProfile p;
  p.model_id = std::move(model_id);
  p.pair_similarities.reserve(c * (c - 1) / 2);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) p.pair_similarities.push_back(sim[i * c + j]);
  }
  std::sort(p.pair_similarities.begin(), p.pair_similarities.end());
  p.median = median_of(p.pair_similarities);

  for (std::size_t i = 0; i < c; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      if (j != i) total += sim[i * c + j];
    }
    p.gcs[crs[i].class_name()] =
        mode == GcsMode::kMean ? total / static_cast<double>(c - 1) : total;
  }
  return p;
}

double median_of(std::vector<double> sample) {
  if (sample.empty()) throw Error(ErrorCode::kEmptyInput, "median of an empty sample");
  const std::size_t n = sample.size();
  const auto mid = sample.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(sample.begin(), mid, sample.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(sample.begin(), mid);
  return (lower + upper) / 2.0;
}

double ks_distance(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ks_distance needs two non-empty samples");
  }
  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // Step through the pooled values in order; after consuming every copy of
  // the current value, i and j are the ECDF counts at that point.
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Once one side is exhausted its ECDF sits at 1 and the other only climbs
  // toward it, so the gap cannot grow further.
  return d;
}

const char* to_string(TransferType type) {
  switch (type) {
    case TransferType::kHomogeneous: return "homogeneous";
    case TransferType::kHeterogeneous: return "heterogeneous";
    case TransferType::kNegative: return "negative";
    case TransferType::kIndeterminate: return "indeterminate";
  }
  return "?";
}

TransferType classify_transfer(bool same_model, double d_star,
                               const TransferThresholds& thresholds) {
  if (same_model) return TransferType::kHomogeneous;
  if (d_star <= thresholds.heterogeneous_max) return TransferType::kHeterogeneous;
  if (d_star >= thresholds.negative_min) return TransferType::kNegative;
  return TransferType::kIndeterminate;
}

KsReport compare_domains(const DomainProfile& source, const DomainProfile& target,
                         const TransferThresholds& thresholds) {
  KsReport r;
  r.d_star = ks_distance(source.pair_similarities, target.pair_similarities);
  r.median_source = source.median;
  r.median_target = target.median;
  r.median_distance = source.median - target.median;
  r.transfer_type = classify_transfer(source.model_id == target.model_id, r.d_star, thresholds);
  return r;
}

namespace {

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_analysis_report(std::ostream& out, const DomainProfile& source,
                           const DomainProfile* target, const KsReport* report) {
  out << "model_source: " << source.model_id << '\n';
  out << "median_source: " << fixed6(source.median) << '\n';
  if (target != nullptr && report != nullptr) {
    out << "model_target: " << target->model_id << '\n';
    out << "median_target: " << fixed6(report->median_target) << '\n';
    out << "median_distance: " << fixed6(report->median_distance) << '\n';
    out << "ks_score: " << fixed6(report->d_star) << '\n';
    out << "transfer_type: " << to_string(report->transfer_type) << '\n';
  }
  // std::map keeps names sorted.
  out << "\n# gcs source\nclass_name,gcs\n";
  for (const auto& [name, v] : source.gcs) out << name << ',' << fixed6(v) << '\n';
  if (target != nullptr) {
    out << "\n# gcs target\nclass_name,gcs\n";
    for (const auto& [name, v] : target->gcs) out << name << ',' << fixed6(v) << '\n';
  }
}

std::vector<std::size_t> similarity_histogram(std::span<const double> sample) {
  std::vector<std::size_t> counts(kHistogramBins, 0);
  const double width = 2.0 / static_cast<double>(kHistogramBins);
  for (double x : sample) {
    auto bin = static_cast<std::ptrdiff_t>(std::floor((x + 1.0) / width));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(kHistogramBins) - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  return counts;
}

void write_histogram_csv(std::ostream& out, std::span<const double> source,
                         std::span<const double> target) {
  const auto hs = similarity_histogram(source);
  const auto ht = similarity_histogram(target);
  const double width = 2.0 / static_cast<double>(kHistogramBins);
  out << "bin_left,bin_right,count_source,count_target\n";
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    out << fixed6(-1.0 + width * static_cast<double>(b)) << ','
        << fixed6(-1.0 + width * static_cast<double>(b + 1)) << ',' << hs[b] << ',' << ht[b]
        << '\n';
  }
}

}  // namespace crl

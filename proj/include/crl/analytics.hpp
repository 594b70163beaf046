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

#ifndef CRL_ANALYTICS_HPP_
#define CRL_ANALYTICS_HPP_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crl/class_rep.hpp"

namespace crl {

/// How a class's group cosine similarity folds its C-1 pair scores.
enum class GcsMode { kMean, kSum };

GcsMode parse_gcs_mode(const std::string& text);

/// Pairwise similarity distribution of one model.
struct DomainProfile {
  std::string model_id;
  std::vector<double> pair_similarities;  // all C(C-1)/2 unordered pairs, ascending
  double median = 0.0;
  std::map<std::string, double> gcs;
};

/// Cosine over every unordered CR pair, its median, and per-class group
/// cosine similarity. `model_id` defaults to the model's source_env.
/// Throws kInvalidArgument for fewer than two classes.
DomainProfile profile(const CrModel& model, GcsMode mode = GcsMode::kMean,
                      unsigned threads = 0);
DomainProfile profile(const CrModel& model, std::string model_id, GcsMode mode,
                      unsigned threads = 0);

/// Exact median of a sample (mean of the two central values for even n).
double median_of(std::vector<double> sample);

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|,
/// computed exactly from sorted copies of both samples.
double ks_distance(std::span<const double> sample_a, std::span<const double> sample_b);

enum class TransferType { kHomogeneous, kHeterogeneous, kNegative, kIndeterminate };

const char* to_string(TransferType type);

struct TransferThresholds {
  double heterogeneous_max = 0.05;
  double negative_min = 0.3;
};

/// Same model id means homogeneous; otherwise d_star <= heterogeneous_max
/// is heterogeneous, d_star >= negative_min is negative, and the band in
/// between is indeterminate.
TransferType classify_transfer(bool same_model, double d_star,
                               const TransferThresholds& thresholds = {});

struct KsReport {
  double d_star = 0.0;
  double median_source = 0.0;
  double median_target = 0.0;
  double median_distance = 0.0;  // source.median - target.median
  TransferType transfer_type = TransferType::kIndeterminate;
};

KsReport compare_domains(const DomainProfile& source, const DomainProfile& target,
                         const TransferThresholds& thresholds = {});

/// `key: value` lines followed by a name-sorted gcs table. `target` and
/// `report` may be null for a single-model report.
void write_analysis_report(std::ostream& out, const DomainProfile& source,
                           const DomainProfile* target, const KsReport* report);

/// 50 uniform bins over [-1, 1]; 1.0 lands in the last bin.
inline constexpr std::size_t kHistogramBins = 50;
std::vector<std::size_t> similarity_histogram(std::span<const double> sample);

/// "bin_left,bin_right,count_source,count_target" rows.
void write_histogram_csv(std::ostream& out, std::span<const double> source,
                         std::span<const double> target);

}  // namespace crl

#endif  // CRL_ANALYTICS_HPP_

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

#ifndef CRL_EVALUATION_HPP_
#define CRL_EVALUATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crl/class_rep.hpp"
#include "crl/inference.hpp"
#include "crl/types.hpp"

namespace crl {

/// Top-1 accuracy per class plus population summary statistics. Classes
/// without test records are left out of the map.
struct PerClassSummary {
  std::map<std::string, double> accuracy;
  std::map<std::string, std::size_t> support;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

PerClassSummary per_class_accuracy(const std::vector<Prediction>& predictions,
                                   const FeatureBundle& bundle);

struct ReportRow {
  std::string setting;
  std::vector<double> accuracy;  // aligned with ExperimentReport::k_list
};

/// Wall-clock seconds per phase. Informational only; excluded from the
/// written report so output files stay reproducible.
struct PhaseTimings {
  double ingest_s = 0.0;
  double build_s = 0.0;
  double inference_s = 0.0;
};

struct ExperimentReport {
  std::string protocol;
  std::string parameters;
  std::uint64_t seed = 0;
  std::vector<std::size_t> k_list;
  std::vector<ReportRow> rows;
  PerClassSummary per_class;
  PhaseTimings timings;
};

struct EvalOptions {
  std::vector<std::size_t> k_list = {1, 5};
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// One row per entry of `counts` (nullopt = all instances), each a model
/// built from the first `count` training records per class and scored on
/// `test`. An "all" row is appended when `counts` has none. Per-class
/// accuracy comes from the "all" row.
ExperimentReport run_instance_curve(const FeatureBundle& train, const FeatureBundle& test,
                                    const std::vector<std::optional<std::size_t>>& counts,
                                    const EvalOptions& options = {});

/// Rows "T=>T" and "T=>S+T": the target model alone, then merged with
/// `source_model`. Throws std::logic_error if any record hit under the
/// union is missed under the target alone.
ExperimentReport run_task_comparison(const CrModel& source_model,
                                     const FeatureBundle& target_train,
                                     const FeatureBundle& target_test,
                                     const EvalOptions& options = {});

/// Stratified per-class split; `train_fraction` of each class (rounded,
/// kept within [1, n-1] when n >= 2) goes to train. Record order is
/// preserved inside each half.
std::pair<FeatureBundle, FeatureBundle> split_stratified(const FeatureBundle& bundle,
                                                         double train_fraction,
                                                         std::uint64_t seed);

void write_report_text(std::ostream& out, const ExperimentReport& report);
void write_report_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace crl

#endif  // CRL_EVALUATION_HPP_

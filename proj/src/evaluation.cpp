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

#include "crl/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "crl/error.hpp"

namespace crl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t max_k(const std::vector<std::size_t>& k_list) {
  if (k_list.empty()) throw Error(ErrorCode::kInvalidArgument, "k list is empty");
  for (std::size_t k : k_list) {
    if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  }
  return *std::max_element(k_list.begin(), k_list.end());
}

std::vector<double> pick_accuracies(const BatchResult& batch,
                                    const std::vector<std::size_t>& k_list) {
  std::vector<double> out;
  for (std::size_t k : k_list) out.push_back(batch.topk_accuracy.at(k - 1));
  return out;
}

std::string join_k(const std::vector<std::size_t>& k_list) {
  std::string s;
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(k_list[i]);
  }
  return s;
}

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

PerClassSummary per_class_accuracy(const std::vector<Prediction>& predictions,
                                   const FeatureBundle& bundle) {
  if (predictions.size() != bundle.records.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predictions do not align with records");
  }
  std::vector<std::size_t> hits(bundle.labels.size(), 0);
  std::vector<std::size_t> total(bundle.labels.size(), 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto c = bundle.records[i].class_id;
    ++total[c];
    if (!predictions[i].ranked.empty() &&
        predictions[i].top().class_name == bundle.labels[c]) {
      ++hits[c];
    }
  }
  PerClassSummary s;
  std::vector<double> values;
  for (std::size_t c = 0; c < bundle.labels.size(); ++c) {
    if (total[c] == 0) continue;
    const double acc = static_cast<double>(hits[c]) / static_cast<double>(total[c]);
    s.accuracy[bundle.labels[c]] = acc;
    s.support[bundle.labels[c]] = total[c];
    values.push_back(acc);
  }
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

ExperimentReport run_instance_curve(const FeatureBundle& train, const FeatureBundle& test,
                                    const std::vector<std::optional<std::size_t>>& counts,
                                    const EvalOptions& options) {
  if (train.labels != test.labels) {
    throw Error(ErrorCode::kInvalidArgument,
                "train and test bundles have different label tables");
  }
  if (train.shape != test.shape) {
    throw Error(ErrorCode::kDimensionMismatch,
                "train grid " + train.shape.str() + " vs test grid " + test.shape.str());
  }
  const std::size_t k = max_k(options.k_list);

  auto settings = counts;
  if (std::find(settings.begin(), settings.end(), std::nullopt) == settings.end()) {
    settings.push_back(std::nullopt);
  }

  ExperimentReport report;
  report.protocol = "instance_curve";
  report.seed = options.seed;
  report.k_list = options.k_list;
  report.parameters = "train=" + train.domain_tag + " test=" + test.domain_tag +
                      " classes=" + std::to_string(train.labels.size()) +
                      " dim=" + std::to_string(train.dim()) + " topk=" + join_k(options.k_list);

  for (const auto& count : settings) {
    BuildOptions build;
    build.max_per_class = count;
    build.threads = options.threads;
    auto t0 = Clock::now();
    const CrModel model = build_model(train, build);
    report.timings.build_s += seconds_since(t0);

    t0 = Clock::now();
    const BatchResult batch = classify_batch(test, model, k, options.threads);
    report.timings.inference_s += seconds_since(t0);

    ReportRow row;
    row.setting = count ? "count=" + std::to_string(*count) : "count=all";
    if (!test.records.empty()) row.accuracy = pick_accuracies(batch, options.k_list);
    report.rows.push_back(std::move(row));
    if (!count) report.per_class = per_class_accuracy(batch.predictions, test);
  }
  return report;
}

ExperimentReport run_task_comparison(const CrModel& source_model,
                                     const FeatureBundle& target_train,
                                     const FeatureBundle& target_test,
                                     const EvalOptions& options) {
  const std::size_t k = max_k(options.k_list);

  ExperimentReport report;
  report.protocol = "task_comparison";
  report.seed = options.seed;
  report.k_list = options.k_list;
  report.parameters = "source=" + source_model.metadata().source_env +
                      " source_classes=" + std::to_string(source_model.size()) +
                      " train=" + target_train.domain_tag + " test=" + target_test.domain_tag +
                      " topk=" + join_k(options.k_list);

  BuildOptions build;
  build.threads = options.threads;
  auto t0 = Clock::now();
  const CrModel target = build_model(target_train, build);
  const CrModel joint = merge_models(source_model.empty() ? CrModel(target.shape()) : source_model,
                                     target);
  report.timings.build_s = seconds_since(t0);

  t0 = Clock::now();
  const BatchResult subset = classify_batch(target_test, target, k, options.threads);
  const BatchResult all = classify_batch(target_test, joint, k, options.threads);
  report.timings.inference_s = seconds_since(t0);

  for (std::size_t i = 0; i < target_test.records.size(); ++i) {
    const auto& truth = target_test.labels[target_test.records[i].class_id];
    const auto r_all = all.predictions[i].rank_of(truth);
    const auto r_sub = subset.predictions[i].rank_of(truth);
    if (r_all && (!r_sub || *r_sub > *r_all)) {
      throw std::logic_error("record " + std::to_string(i) +
                             " ranks its label higher over S+T than over T");
    }
  }

  ReportRow t_row{"T=>T", {}};
  ReportRow st_row{"T=>S+T", {}};
  if (!target_test.records.empty()) {
    t_row.accuracy = pick_accuracies(subset, options.k_list);
    st_row.accuracy = pick_accuracies(all, options.k_list);
  }
  report.rows.push_back(std::move(t_row));
  report.rows.push_back(std::move(st_row));
  report.per_class = per_class_accuracy(subset.predictions, target_test);
  return report;
}

std::pair<FeatureBundle, FeatureBundle> split_stratified(const FeatureBundle& bundle,
                                                         double train_fraction,
                                                         std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> members(bundle.labels.size());
  for (std::size_t i = 0; i < bundle.records.size(); ++i) {
    members[bundle.records[i].class_id].push_back(i);
  }
  std::vector<bool> to_train(bundle.records.size(), false);
  std::mt19937_64 rng(seed);
  for (auto& m : members) {
    const std::size_t n = m.size();
    if (n == 0) continue;
    auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::shuffle(m.begin(), m.end(), rng);
    for (std::size_t i = 0; i < n_train && i < n; ++i) to_train[m[i]] = true;
  }

  FeatureBundle train{bundle.shape, bundle.labels, {}, bundle.domain_tag + "/train"};
  FeatureBundle test{bundle.shape, bundle.labels, {}, bundle.domain_tag + "/test"};
  for (std::size_t i = 0; i < bundle.records.size(); ++i) {
    (to_train[i] ? train : test).records.push_back(bundle.records[i]);
  }
  return {std::move(train), std::move(test)};
}

void write_report_text(std::ostream& out, const ExperimentReport& report) {
  out << "# protocol=" << report.protocol << " seed=" << report.seed << ' '
      << report.parameters << '\n';
  out << "setting";
  for (std::size_t k : report.k_list) out << "\ttop-" << k;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.setting;
    if (row.accuracy.empty()) {
      for (std::size_t i = 0; i < report.k_list.size(); ++i) out << "\tN/A";
    }
    for (double a : row.accuracy) out << '\t' << fmt("%.4f", a);
    out << '\n';
  }
  const auto& pc = report.per_class;
  if (pc.accuracy.empty()) return;
  out << "\nper-class top-1: mean=" << fmt("%.4f", pc.mean) << " std=" << fmt("%.4f", pc.stddev)
      << " min=" << fmt("%.4f", pc.min) << " max=" << fmt("%.4f", pc.max) << '\n';
  for (const auto& [name, acc] : pc.accuracy) {
    out << name << '\t' << fmt("%.4f", acc) << '\t' << pc.support.at(name) << '\n';
  }
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "# protocol=" << report.protocol << " seed=" << report.seed << ' '
      << report.parameters << '\n';
  out << "setting";
  for (std::size_t k : report.k_list) out << ",top" << k;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.setting;
    if (row.accuracy.empty()) {
      for (std::size_t i = 0; i < report.k_list.size(); ++i) out << ",N/A";
    }
    for (double a : row.accuracy) out << ',' << fmt("%.6f", a);
    out << '\n';
  }
}

}  // namespace crl

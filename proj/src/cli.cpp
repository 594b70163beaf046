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

#include "crl/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "crl/analytics.hpp"
#include "crl/class_rep.hpp"
#include "crl/error.hpp"
#include "crl/evaluation.hpp"
#include "crl/feature_io.hpp"
#include "crl/inference.hpp"
#include "crl/pooling.hpp"

namespace crl::cli {

namespace {

// A data-side failure tied to one flag; rendered as "--flag 'path': what".
struct FlagError : std::runtime_error {
  FlagError(const std::string& flag, const std::string& what)
      : std::runtime_error(flag + ": " + what) {}
};

template <typename Fn>
auto with_context(const std::string& flag, const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw FlagError(flag + " '" + path + "'", e.what());
  }
}

FeatureBundle load_bundle_flag(const std::string& flag, const std::string& path) {
  return with_context(flag, path, [&] { return read_bundle(path); });
}

CrModel load_model_flag(const std::string& flag, const std::string& path) {
  return with_context(flag, path, [&] { return load_model(path); });
}

std::ofstream open_out(const std::string& flag, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FlagError(flag + " '" + path + "'", "cannot create file");
  return f;
}

std::uint64_t parse_u64(const std::string& flag, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw CLI::ValidationError(flag, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

// "2x3" -> (2, 3); "2" -> (2, 2).
std::pair<std::uint32_t, std::uint32_t> parse_pair(const std::string& flag,
                                                   const std::string& text) {
  const auto x = text.find_first_of("xX");
  const std::string a = text.substr(0, x);
  const std::string b = x == std::string::npos ? a : text.substr(x + 1);
  const auto va = parse_u64(flag, a);
  const auto vb = parse_u64(flag, b);
  if (va == 0 || vb == 0 || va > UINT32_MAX || vb > UINT32_MAX) {
    throw CLI::ValidationError(flag, "expected AxB with positive sides, got '" + text + "'");
  }
  return {static_cast<std::uint32_t>(va), static_cast<std::uint32_t>(vb)};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<std::size_t> parse_k_list(const std::string& flag, const std::string& text) {
  std::vector<std::size_t> ks;
  for (const auto& part : split_list(text)) {
    const auto k = parse_u64(flag, part);
    if (k == 0) throw CLI::ValidationError(flag, "k must be >= 1");
    ks.push_back(static_cast<std::size_t>(k));
  }
  if (ks.empty()) throw CLI::ValidationError(flag, "empty list");
  return ks;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

CrModel merge_all(CrModel base, const std::vector<std::string>& paths) {
  for (const auto& path : paths) {
    CrModel extra = load_model_flag("--merge", path);
    base = with_context("--merge", path, [&] { return merge_models(base, extra); });
  }
  return base;
}

struct Globals {
  unsigned threads = 0;
  int verbosity = 0;
};

struct SynthArgs {
  std::size_t classes = 0, per_class = 0;
  std::string shape, out, domain_tag = "synth", label_prefix = "class_";
  double sep = 6.0;
  std::uint64_t seed = 0;
};

struct BuildArgs {
  std::string features, out, pool, filter = "2x2", stride = "2x2", layer;
  std::optional<std::size_t> max_per_class;
};

struct InferArgs {
  std::string model, features, out;
  std::vector<std::string> merge;
  std::size_t topk = 1;
};

struct EvalArgs {
  std::string model, train, test, out;
  std::vector<std::string> merge;
  std::string counts = "1,2,3,4,5,6,7,8,9,10,all";
  std::string topk = "1,5";
  std::uint64_t seed = 0;
};

struct AnalyzeArgs {
  std::string model, model_b, out, histogram;
  std::string gcs = "mean";
  std::string thresholds = "0.05,0.3";
};

struct MergeArgs {
  std::vector<std::string> in;
  std::string out, prefix_b;
};

struct SplitArgs {
  std::string features, out_train, out_test;
  double ratio = 0.7;
  std::uint64_t seed = 0;
};

void cmd_synth(const SynthArgs& a, const Globals&, std::ostream& out) {
  Shape shape;
  try {
    shape = parse_shape(a.shape);
  } catch (const Error& e) {
    throw CLI::ValidationError("--shape", e.what());
  }
  FeatureBundle b = synth_bundle(a.classes, a.per_class, shape, a.sep, a.seed);
  b.domain_tag = a.domain_tag;
  for (std::size_t c = 0; c < b.labels.size(); ++c) b.labels[c] = a.label_prefix + std::to_string(c);
  with_context("--out", a.out, [&] {
    write_bundle(b, a.out);
    return 0;
  });
  out << "wrote " << b.records.size() << " records, " << b.labels.size() << " classes, dim "
      << b.dim() << " to " << a.out << '\n';
}

void cmd_build(const BuildArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  BuildOptions opts;
  opts.threads = g.threads;
  opts.max_per_class = a.max_per_class;
  opts.layer = a.layer;
  if (!a.pool.empty()) {
    PoolingSpec spec;
    try {
      spec.mode = parse_pool_mode(a.pool);
    } catch (const Error& e) {
      throw CLI::ValidationError("--pool", e.what());
    }
    std::tie(spec.filter_h, spec.filter_w) = parse_pair("--filter", a.filter);
    std::tie(spec.stride_h, spec.stride_w) = parse_pair("--stride", a.stride);
    opts.pooling = spec;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const FeatureBundle bundle = load_bundle_flag("--features", a.features);
  const auto t1 = std::chrono::steady_clock::now();
  const CrModel model = with_context("--features", a.features, [&] { return build_model(bundle, opts); });
  const auto t2 = std::chrono::steady_clock::now();
  with_context("--out", a.out, [&] {
    save_model(model, a.out);
    return 0;
  });
  out << "built " << model.size() << " class representatives, dim " << model.dim() << " ("
      << model.shape().str() << ") to " << a.out << '\n';
  if (g.verbosity > 0) {
    err << "timing: ingest " << std::chrono::duration<double>(t1 - t0).count() << "s, build "
        << std::chrono::duration<double>(t2 - t1).count() << "s\n";
  }
}

void cmd_infer(const InferArgs& a, const Globals& g, std::ostream& out) {
  CrModel model = merge_all(load_model_flag("--model", a.model), a.merge);
  const FeatureBundle bundle = load_bundle_flag("--features", a.features);
  if (a.topk == 0 || a.topk > model.size()) {
    throw CLI::ValidationError("--topk", "must lie in [1, " + std::to_string(model.size()) + "]");
  }
  const BatchResult result =
      with_context("--features", a.features, [&] { return classify_batch(bundle, model, a.topk, g.threads); });
  if (!a.out.empty()) {
    auto f = open_out("--out", a.out);
    write_predictions_csv(f, bundle, result.predictions);
  }
  out << "records: " << bundle.records.size() << '\n';
  for (std::size_t m = 1; m <= a.topk; ++m) {
    out << "top-" << m << ": "
        << (result.topk_accuracy.empty() ? std::string("N/A") : fixed(result.topk_accuracy[m - 1], 4))
        << '\n';
  }
}

void cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  EvalOptions opts;
  opts.k_list = parse_k_list("--topk", a.topk);
  opts.seed = a.seed;
  opts.threads = g.threads;
  std::vector<std::optional<std::size_t>> counts;
  for (const auto& part : split_list(a.counts)) {
    if (part == "all") {
      counts.emplace_back(std::nullopt);
    } else {
      const auto c = parse_u64("--counts", part);
      if (c == 0) throw CLI::ValidationError("--counts", "counts must be >= 1 or 'all'");
      counts.emplace_back(static_cast<std::size_t>(c));
    }
  }
  if (!a.merge.empty() && a.model.empty()) {
    throw CLI::ValidationError("--merge", "requires --model");
  }
  const FeatureBundle train = load_bundle_flag("--train", a.train);
  const FeatureBundle test = load_bundle_flag("--test", a.test);

  std::vector<ExperimentReport> reports;
  reports.push_back(with_context("--train", a.train, [&] { return run_instance_curve(train, test, counts, opts); }));
  if (!a.model.empty()) {
    const CrModel source = merge_all(load_model_flag("--model", a.model), a.merge);
    reports.push_back(
        with_context("--model", a.model, [&] { return run_task_comparison(source, train, test, opts); }));
  }

  auto text = open_out("--out", a.out);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) text << '\n';
    write_report_text(text, reports[i]);
    const std::string csv_path = a.out + "." + reports[i].protocol + ".csv";
    auto csv = open_out("--out", csv_path);
    write_report_csv(csv, reports[i]);
    write_report_text(out, reports[i]);
    if (g.verbosity > 0) {
      err << reports[i].protocol << " timing: build " << reports[i].timings.build_s
          << "s, inference " << reports[i].timings.inference_s << "s\n";
    }
  }
}

void cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
  GcsMode mode;
  try {
    mode = parse_gcs_mode(a.gcs);
  } catch (const Error& e) {
    throw CLI::ValidationError("--gcs", e.what());
  }
  TransferThresholds th;
  {
    const auto parts = split_list(a.thresholds);
    std::size_t used = 0;
    bool ok = parts.size() == 2;
    try {
      if (ok) {
        th.heterogeneous_max = std::stod(parts[0], &used);
        ok = used == parts[0].size();
        th.negative_min = std::stod(parts[1], &used);
        ok = ok && used == parts[1].size() && th.heterogeneous_max <= th.negative_min;
      }
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) throw CLI::ValidationError("--thresholds", "expected LOW,HIGH with LOW <= HIGH");
  }

  const CrModel ma = load_model_flag("--model", a.model);
  const DomainProfile pa = with_context("--model", a.model, [&] { return profile(ma, mode, g.threads); });
  std::optional<DomainProfile> pb;
  std::optional<KsReport> report;
  if (!a.model_b.empty()) {
    const CrModel mb = load_model_flag("--model-b", a.model_b);
    pb = with_context("--model-b", a.model_b, [&] { return profile(mb, mode, g.threads); });
    report = compare_domains(pa, *pb, th);
  }
  {
    auto f = open_out("--out", a.out);
    write_analysis_report(f, pa, pb ? &*pb : nullptr, report ? &*report : nullptr);
  }
  write_analysis_report(out, pa, pb ? &*pb : nullptr, report ? &*report : nullptr);
  if (!a.histogram.empty()) {
    auto f = open_out("--histogram", a.histogram);
    const std::vector<double> none;
    write_histogram_csv(f, pa.pair_similarities, pb ? pb->pair_similarities : none);
  }
}

void cmd_merge(const MergeArgs& a, std::ostream& out) {
  CrModel merged = load_model_flag("--in", a.in.front());
  for (std::size_t i = 1; i < a.in.size(); ++i) {
    CrModel next = load_model_flag("--in", a.in[i]);
    if (!a.prefix_b.empty()) next = rename_colliding(merged, next, a.prefix_b);
    merged = with_context("--in", a.in[i], [&] { return merge_models(merged, next); });
  }
  with_context("--out", a.out, [&] {
    save_model(merged, a.out);
    return 0;
  });
  out << "merged " << a.in.size() << " models into " << merged.size()
      << " class representatives at " << a.out << '\n';
}

void cmd_split(const SplitArgs& a, std::ostream& out) {
  if (!(a.ratio > 0.0 && a.ratio < 1.0)) {
    throw CLI::ValidationError("--ratio", "must lie strictly between 0 and 1");
  }
  const FeatureBundle bundle = load_bundle_flag("--features", a.features);
  auto [train, test] = split_stratified(bundle, a.ratio, a.seed);
  with_context("--out-train", a.out_train, [&] {
    write_bundle(train, a.out_train);
    return 0;
  });
  with_context("--out-test", a.out_test, [&] {
    write_bundle(test, a.out_test);
    return 0;
  });
  out << "split " << bundle.records.size() << " records into " << train.records.size()
      << " train / " << test.records.size() << " test\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-representative feature classification and transferability analysis", "crl"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "crl 1.0.0");

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0 = machine parallelism)")
      ->envname("CRL_THREADS");
  app.add_flag("-v,--verbose", g.verbosity, "Print timings and extra diagnostics");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a seeded synthetic feature bundle");
  s->add_option("--classes", synth.classes, "Number of classes")->required()->check(CLI::PositiveNumber);
  s->add_option("--per-class", synth.per_class, "Instances per class")->required()->check(CLI::PositiveNumber);
  s->add_option("--shape", synth.shape, "Grid shape HxWxC")->required();
  s->add_option("--sep", synth.sep, "Minimum distance between class means")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--domain-tag", synth.domain_tag, "Domain tag stored in the bundle");
  s->add_option("--label-prefix", synth.label_prefix, "Class names are <prefix><index>")
      ->capture_default_str();
  s->add_option("--out", synth.out, "Output bundle path")->required();

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a class-representative model from features");
  b->add_option("--features", build.features, "Input feature bundle")->required();
  b->add_option("--max-per-class", build.max_per_class, "Use only the first N records of each class")
      ->check(CLI::PositiveNumber);
  b->add_option("--pool", build.pool, "Pool instances before aggregation: avg, max or min");
  b->add_option("--filter", build.filter, "Pooling window FhxFw");
  b->add_option("--stride", build.stride, "Pooling stride ShxSw (or one number)");
  b->add_option("--layer", build.layer, "Layer id recorded in model metadata");
  b->add_option("--out", build.out, "Output model path")->required();

  InferArgs infer;
  auto* i = app.add_subcommand("infer", "Classify a feature bundle against a model");
  i->add_option("--model", infer.model, "Model file")->required();
  i->add_option("--merge", infer.merge, "Additional models scored jointly (repeatable)");
  i->add_option("--features", infer.features, "Feature bundle to classify")->required();
  i->add_option("--topk", infer.topk, "Number of ranked classes per record");
  i->add_option("--out", infer.out, "Prediction CSV path");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Run the instance-count curve and optional task comparison");
  e->add_option("--model", eval.model, "Source model; enables the T=>T vs T=>S+T comparison");
  e->add_option("--merge", eval.merge, "Models merged into the source model (repeatable)");
  e->add_option("--train", eval.train, "Training feature bundle")->required();
  e->add_option("--test", eval.test, "Test feature bundle")->required();
  e->add_option("--counts", eval.counts, "Instances per class for each curve row");
  e->add_option("--topk", eval.topk, "Comma-separated k values");
  e->add_option("--seed", eval.seed, "Seed recorded in the report header");
  e->add_option("--out", eval.out, "Text report path; CSVs are written beside it")->required();

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Similarity distribution and transferability statistics");
  an->add_option("--model", analyze.model, "Source model")->required();
  an->add_option("--model-b", analyze.model_b, "Target model to compare against");
  an->add_option("--gcs", analyze.gcs, "Group cosine similarity: mean or sum");
  an->add_option("--thresholds", analyze.thresholds, "Heterogeneous/negative KS thresholds");
  an->add_option("--histogram", analyze.histogram, "Optional histogram CSV path");
  an->add_option("--out", analyze.out, "Report path")->required();

  MergeArgs merge;
  auto* m = app.add_subcommand("merge", "Merge class-representative models");
  m->add_option("--in", merge.in, "Input model (repeat at least twice)")->required()->expected(1, -1);
  m->add_option("--prefix-b", merge.prefix_b, "Prefix for colliding class names of later models");
  m->add_option("--out", merge.out, "Output model path")->required();

  SplitArgs split;
  auto* sp = app.add_subcommand("split", "Stratified train/test split of a bundle");
  sp->add_option("--features", split.features, "Input bundle")->required();
  sp->add_option("--ratio", split.ratio, "Training fraction per class");
  sp->add_option("--seed", split.seed, "Shuffle seed");
  sp->add_option("--out-train", split.out_train, "Training bundle path")->required();
  sp->add_option("--out-test", split.out_test, "Test bundle path")->required();

  try {
    app.parse(argc, argv);
    if (m->parsed() && merge.in.size() < 2) {
      throw CLI::ValidationError("--in", "merge needs at least two input models");
    }
    if (s->parsed()) cmd_synth(synth, g, out);
    else if (b->parsed()) cmd_build(build, g, out, err);
    else if (i->parsed()) cmd_infer(infer, g, out);
    else if (e->parsed()) cmd_eval(eval, g, out, err);
    else if (an->parsed()) cmd_analyze(analyze, g, out);
    else if (m->parsed()) cmd_merge(merge, out);
    else if (sp->parsed()) cmd_split(split, out);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(ex, out, err);
      return kExitOk;
    }
    err << "crl: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const FlagError& ex) {
    err << "crl: " << ex.what() << '\n';
    return kExitData;
  } catch (const std::exception& ex) {
    err << "crl: " << ex.what() << '\n';
    return kExitData;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace crl::cli

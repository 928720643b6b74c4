#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shapval/dataset.hpp"
#include "shapval/harness.hpp"
#include "shapval/manifest.hpp"
#include "shapval/metrics.hpp"
#include "shapval/shapley.hpp"

namespace shapval {

// ---------------------------------------------------------------------------
// synth: generate a train/test pair and write it out.
// ---------------------------------------------------------------------------

struct SynthOptions {
  SynthConfig config;
  std::filesystem::path out_dir;
};

struct SynthResult {
  SynthData data;
  RunManifest manifest;
  std::vector<std::filesystem::path> written;
};

SynthResult run_synth(const SynthOptions& options);

// ---------------------------------------------------------------------------
// value: Shapley values of a training set under one or more metrics.
// ---------------------------------------------------------------------------

struct ValueOptions {
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::filesystem::path out_dir;
  std::vector<MetricKind> metrics = {MetricKind::accuracy};
  bool exact = false;
  TrainConfig train_config;
  SamplerConfig sampler;
  int threads = 1;
  std::vector<int> trace_ids;  // empty -> two per input class, seed-derived
};

struct ValueResult {
  std::vector<ShapleyVector> vectors;  // one per metric, in request order
  std::vector<ShapleyRun> runs;        // parallel to vectors; empty when exact
  std::vector<int> tracked_ids;
  RunManifest manifest;
  std::vector<std::filesystem::path> written;
};

ValueResult run_value(const ValueOptions& options);

// ---------------------------------------------------------------------------
// noise-experiment: flip labels at one or more levels, value the noisy data
// under each metric, and report how much noise the low-value tail captures.
// ---------------------------------------------------------------------------

struct NoiseExperimentOptions {
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::filesystem::path out_dir;
  std::vector<double> levels = {0.1, 0.2, 0.3};  // applied to both classes
  std::vector<MetricKind> metrics = {MetricKind::accuracy, MetricKind::recall,
                                     MetricKind::specificity};
  TrainConfig train_config;
  SamplerConfig sampler;         // per level i the seed becomes mix(seed, i)
  std::uint64_t noise_seed = 0;  // per level i: mix(noise_seed, i)
  std::vector<double> bottom_fractions = {0.3};  // the level itself is added
  int threads = 1;
};

struct LevelMetricResult {
  MetricKind metric = MetricKind::accuracy;
  ShapleyRun run;
  Ranking ranking;
  std::vector<DetectionReport> reports;  // one per bottom fraction, ascending
  std::vector<ClassMappingRow> mapping;
};

struct LevelResult {
  double level = 0.0;
  std::string tag;  // exp-I, exp-II, ... by position in `levels`
  NoisyData noisy;
  std::vector<LevelMetricResult> per_metric;
};

struct NoiseExperimentResult {
  std::vector<LevelResult> levels;
  RunManifest manifest;
  std::vector<std::filesystem::path> written;
};

NoiseExperimentResult run_noise_experiment(const NoiseExperimentOptions& options);

// ---------------------------------------------------------------------------
// report: post-hoc detection analysis of an existing value CSV against a
// noisy/clean dataset pair.
// ---------------------------------------------------------------------------

struct ReportOptions {
  std::filesystem::path sv_csv;
  std::filesystem::path noisy_csv;
  std::filesystem::path clean_csv;
  std::filesystem::path out_dir;
  MetricKind metric = MetricKind::accuracy;  // labels the outputs
  std::vector<double> bottom_fractions = {0.3};
};

struct ReportResult {
  std::vector<DetectionReport> reports;
  std::vector<ClassMappingRow> mapping;
  RunManifest manifest;
  std::vector<std::filesystem::path> written;
};

ReportResult run_report(const ReportOptions& options);

// ---------------------------------------------------------------------------
// Re-execution from a recorded manifest. out_dir and threads may be
// overridden; neither changes any computed number, so re-runs reproduce the
// recorded outputs byte for byte.
// ---------------------------------------------------------------------------

struct RerunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> threads;
};

struct RerunResult {
  std::string command;
  std::vector<std::filesystem::path> written;
};

RerunResult rerun_from_manifest(const std::filesystem::path& manifest_path,
                                const RerunOverrides& overrides = {});

// Roman numeral tag for a zero-based experiment index: 0 -> "exp-I".
std::string experiment_tag(std::size_t index);

}  // namespace shapval

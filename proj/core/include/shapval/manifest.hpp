#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shapval/harness.hpp"
#include "shapval/metrics.hpp"
#include "shapval/model.hpp"
#include "shapval/shapley.hpp"

namespace shapval {

// Everything needed to re-execute a run and reproduce its outputs bit for
// bit. Input paths are stored as given on the command line; relative paths
// resolve against the working directory of the re-run. Deliberately holds
// neither a wall-clock timestamp nor the worker count: results are
// independent of both, and two runs of the same manifest must produce
// byte-identical files, the manifest included.
struct RunManifest {
  std::string command;  // synth | value | noise-experiment | report
  std::string artifact;
  std::string version;

  // value and noise-experiment
  std::string train_csv;
  std::string test_csv;
  std::vector<MetricKind> metrics;
  bool exact = false;
  TrainConfig train_config;
  SamplerConfig sampler;
  std::vector<int> trace_ids;

  // synth
  SynthConfig synth;

  // noise-experiment
  std::vector<double> levels;
  std::vector<double> bottom_fractions;
  std::uint64_t noise_seed = 0;

  // report
  std::string sv_csv;
  std::string noisy_csv;
  std::string clean_csv;
  MetricKind report_metric = MetricKind::accuracy;

  // Files written by the run, relative to its output directory.
  std::vector<std::string> outputs;
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace shapval

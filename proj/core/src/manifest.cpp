#include "shapval/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "shapval/errors.hpp"
#include "shapval/io.hpp"
#include "shapval/version.hpp"

namespace shapval {

namespace {

using nlohmann::json;

json train_config_to_json(const TrainConfig& config) {
  json j;
  j["learning_rate"] = config.learning_rate;
  j["max_epochs"] = config.max_epochs;
  j["l2_penalty"] = config.l2_penalty;
  if (config.class_weight_positive) {
    j["class_weight_positive"] = *config.class_weight_positive;
  } else {
    j["class_weight_positive"] = "auto";
  }
  j["convergence_tol"] = config.convergence_tol;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig config;
  config.learning_rate = j.at("learning_rate").get<double>();
  config.max_epochs = j.at("max_epochs").get<int>();
  config.l2_penalty = j.at("l2_penalty").get<double>();
  const json& weight = j.at("class_weight_positive");
  if (weight.is_string()) {
    if (weight.get<std::string>() != "auto") {
      throw InputError("class_weight_positive must be a number or \"auto\"");
    }
    config.class_weight_positive.reset();
  } else {
    config.class_weight_positive = weight.get<double>();
  }
  config.convergence_tol = j.at("convergence_tol").get<double>();
  return config;
}

json sampler_to_json(const SamplerConfig& sampler) {
  json j;
  j["max_permutations"] = sampler.max_permutations;
  j["checkpoint_every"] = sampler.checkpoint_every;
  j["convergence_window"] = sampler.convergence_window;
  j["convergence_tol"] = sampler.convergence_tol;
  j["seed"] = sampler.seed;
  j["stop_on_convergence"] = sampler.stop_on_convergence;
  return j;
}

SamplerConfig sampler_from_json(const json& j) {
  SamplerConfig sampler;
  sampler.max_permutations = j.at("max_permutations").get<int>();
  sampler.checkpoint_every = j.at("checkpoint_every").get<int>();
  sampler.convergence_window = j.at("convergence_window").get<int>();
  sampler.convergence_tol = j.at("convergence_tol").get<double>();
  sampler.seed = j.at("seed").get<std::uint64_t>();
  sampler.stop_on_convergence = j.at("stop_on_convergence").get<bool>();
  return sampler;
}

json synth_to_json(const SynthConfig& config) {
  json j;
  j["n_positive"] = config.n_positive;
  j["n_negative"] = config.n_negative;
  j["dim"] = config.dim;
  j["class_separation"] = config.class_separation;
  j["seed"] = config.seed;
  return j;
}

SynthConfig synth_from_json(const json& j) {
  SynthConfig config;
  config.n_positive = j.at("n_positive").get<int>();
  config.n_negative = j.at("n_negative").get<int>();
  config.dim = j.at("dim").get<int>();
  config.class_separation = j.at("class_separation").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

json metrics_to_json(const std::vector<MetricKind>& metrics) {
  json j = json::array();
  for (const MetricKind kind : metrics) j.push_back(to_string(kind));
  return j;
}

std::vector<MetricKind> metrics_from_json(const json& j) {
  std::vector<MetricKind> metrics;
  for (const auto& entry : j) {
    metrics.push_back(metric_from_string(entry.get<std::string>()));
  }
  return metrics;
}

}  // namespace

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["artifact"] = manifest.artifact.empty() ? kArtifactName : manifest.artifact;
  j["version"] = manifest.version.empty() ? kArtifactVersion : manifest.version;
  j["command"] = manifest.command;

  if (manifest.command == "synth") {
    j["synth"] = synth_to_json(manifest.synth);
  } else if (manifest.command == "value") {
    j["train_csv"] = manifest.train_csv;
    j["test_csv"] = manifest.test_csv;
    j["metrics"] = metrics_to_json(manifest.metrics);
    j["exact"] = manifest.exact;
    j["train_config"] = train_config_to_json(manifest.train_config);
    j["sampler"] = sampler_to_json(manifest.sampler);
    j["trace_ids"] = manifest.trace_ids;
  } else if (manifest.command == "noise-experiment") {
    j["train_csv"] = manifest.train_csv;
    j["test_csv"] = manifest.test_csv;
    j["metrics"] = metrics_to_json(manifest.metrics);
    j["train_config"] = train_config_to_json(manifest.train_config);
    j["sampler"] = sampler_to_json(manifest.sampler);
    j["levels"] = manifest.levels;
    j["bottom_fractions"] = manifest.bottom_fractions;
    j["noise_seed"] = manifest.noise_seed;
  } else if (manifest.command == "report") {
    j["sv_csv"] = manifest.sv_csv;
    j["noisy_csv"] = manifest.noisy_csv;
    j["clean_csv"] = manifest.clean_csv;
    j["report_metric"] = to_string(manifest.report_metric);
    j["bottom_fractions"] = manifest.bottom_fractions;
  } else {
    throw InputError("unknown manifest command '" + manifest.command + "'");
  }
  j["outputs"] = manifest.outputs;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }

  RunManifest manifest;
  try {
    manifest.artifact = j.at("artifact").get<std::string>();
    manifest.version = j.at("version").get<std::string>();
    manifest.command = j.at("command").get<std::string>();

    if (manifest.command == "synth") {
      manifest.synth = synth_from_json(j.at("synth"));
    } else if (manifest.command == "value") {
      manifest.train_csv = j.at("train_csv").get<std::string>();
      manifest.test_csv = j.at("test_csv").get<std::string>();
      manifest.metrics = metrics_from_json(j.at("metrics"));
      manifest.exact = j.at("exact").get<bool>();
      manifest.train_config = train_config_from_json(j.at("train_config"));
      manifest.sampler = sampler_from_json(j.at("sampler"));
      manifest.trace_ids = j.at("trace_ids").get<std::vector<int>>();
    } else if (manifest.command == "noise-experiment") {
      manifest.train_csv = j.at("train_csv").get<std::string>();
      manifest.test_csv = j.at("test_csv").get<std::string>();
      manifest.metrics = metrics_from_json(j.at("metrics"));
      manifest.train_config = train_config_from_json(j.at("train_config"));
      manifest.sampler = sampler_from_json(j.at("sampler"));
      manifest.levels = j.at("levels").get<std::vector<double>>();
      manifest.bottom_fractions = j.at("bottom_fractions").get<std::vector<double>>();
      manifest.noise_seed = j.at("noise_seed").get<std::uint64_t>();
    } else if (manifest.command == "report") {
      manifest.sv_csv = j.at("sv_csv").get<std::string>();
      manifest.noisy_csv = j.at("noisy_csv").get<std::string>();
      manifest.clean_csv = j.at("clean_csv").get<std::string>();
      manifest.report_metric =
          metric_from_string(j.at("report_metric").get<std::string>());
      manifest.bottom_fractions = j.at("bottom_fractions").get<std::vector<double>>();
    } else {
      throw InputError("unknown manifest command '" + manifest.command + "'");
    }
    manifest.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return manifest;
}

}  // namespace shapval

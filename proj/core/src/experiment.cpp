#include "shapval/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include "shapval/errors.hpp"
#include "shapval/io.hpp"
#include "shapval/rng.hpp"
#include "shapval/version.hpp"

namespace shapval {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir.string() +
                  "': " + ec.message());
  }
}

// Default convergence-trace columns: up to two points per input class,
// drawn from a seed-derived stream so re-runs pick the same ids.
std::vector<int> pick_trace_ids(const Dataset& data, std::uint64_t seed) {
  std::vector<int> pos;
  std::vector<int> neg;
  for (const DataPoint& p : data.points()) {
    (p.label == Label::positive ? pos : neg).push_back(p.id);
  }
  rng::Stream stream(rng::mix(seed, rng::kTracePickStream));
  rng::shuffle(pos, stream);
  rng::shuffle(neg, stream);
  std::vector<int> out;
  for (std::size_t i = 0; i < pos.size() && i < 2; ++i) out.push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size() && i < 2; ++i) out.push_back(neg[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> sorted_fractions(std::vector<double> fractions) {
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()),
                  fractions.end());
  return fractions;
}

std::string roman(std::size_t value) {
  static constexpr std::pair<std::size_t, const char*> kTable[] = {
      {1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"}, {100, "C"},
      {90, "XC"},  {50, "L"},   {40, "XL"}, {10, "X"},   {9, "IX"},
      {5, "V"},    {4, "IV"},   {1, "I"}};
  std::string out;
  for (const auto& [step, digits] : kTable) {
    while (value >= step) {
      out += digits;
      value -= step;
    }
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<LevelResult>& levels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "experiment,noise_level,metric,bottom_fraction,bottom_size,"
         "captured_pos_truth,captured_neg_truth,captured_total,"
         "pos_truth_vacuous,neg_truth_vacuous\n";
  for (const LevelResult& level : levels) {
    for (const LevelMetricResult& mr : level.per_metric) {
      for (const DetectionReport& r : mr.reports) {
        out << level.tag << ',' << io::format_double(level.level) << ','
            << to_string(mr.metric) << ',' << io::format_double(r.bottom_fraction)
            << ',' << r.bottom_size << ',' << io::format_double(r.captured_pos_truth)
            << ',' << io::format_double(r.captured_neg_truth) << ','
            << io::format_double(r.captured_total) << ','
            << (r.pos_truth_vacuous ? 1 : 0) << ',' << (r.neg_truth_vacuous ? 1 : 0)
            << '\n';
      }
    }
  }
  out.flush();
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace

std::string experiment_tag(std::size_t index) { return "exp-" + roman(index + 1); }

SynthResult run_synth(const SynthOptions& options) {
  options.config.validate();
  SynthResult result;
  result.data = synth_gaussian(options.config);

  ensure_dir(options.out_dir);
  io::write_dataset_csv(options.out_dir / "train.csv", result.data.train);
  io::write_dataset_csv(options.out_dir / "test.csv", result.data.test);
  result.written = {options.out_dir / "train.csv", options.out_dir / "test.csv"};

  result.manifest.command = "synth";
  result.manifest.artifact = kArtifactName;
  result.manifest.version = kArtifactVersion;
  result.manifest.synth = options.config;
  result.manifest.outputs = {"train.csv", "test.csv"};
  save_manifest(options.out_dir / "manifest.json", result.manifest);
  result.written.push_back(options.out_dir / "manifest.json");
  return result;
}

ValueResult run_value(const ValueOptions& options) {
  if (options.metrics.empty()) throw InputError("need at least one metric");
  const Dataset train = io::read_dataset_csv(options.train_csv);
  const Dataset test = io::read_dataset_csv(options.test_csv);
  const UtilityEvaluator evaluator(train, test, options.train_config);

  ValueResult result;
  if (options.exact) {
    for (const MetricKind kind : options.metrics) {
      result.vectors.push_back(exact_shapley(evaluator, kind));
    }
  } else {
    result.runs = mc_shapley_multi(evaluator, options.metrics, options.sampler,
                                   options.threads);
    for (const ShapleyRun& run : result.runs) {
      result.vectors.push_back(run.estimates);
    }
    result.tracked_ids =
        options.trace_ids.empty()
            ? pick_trace_ids(train, options.sampler.seed)
            : Coalition::of(options.trace_ids).ids();  // sorts, rejects dups
  }

  ensure_dir(options.out_dir);
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < options.metrics.size(); ++i) {
    const std::string name =
        std::string("sv-") + to_string(options.metrics[i]) + ".csv";
    io::write_values_csv(options.out_dir / name, result.vectors[i], train);
    outputs.push_back(name);
    result.written.push_back(options.out_dir / name);
  }
  if (!options.exact) {
    for (std::size_t i = 0; i < options.metrics.size(); ++i) {
      const std::string name =
          std::string("trace-") + to_string(options.metrics[i]) + ".csv";
      io::write_trace_csv(options.out_dir / name, result.runs[i],
                          result.tracked_ids);
      outputs.push_back(name);
      result.written.push_back(options.out_dir / name);
    }
  }

  result.manifest.command = "value";
  result.manifest.artifact = kArtifactName;
  result.manifest.version = kArtifactVersion;
  result.manifest.train_csv = options.train_csv.string();
  result.manifest.test_csv = options.test_csv.string();
  result.manifest.metrics = options.metrics;
  result.manifest.exact = options.exact;
  result.manifest.train_config = options.train_config;
  result.manifest.sampler = options.sampler;
  result.manifest.trace_ids = result.tracked_ids;
  result.manifest.outputs = outputs;
  save_manifest(options.out_dir / "manifest.json", result.manifest);
  result.written.push_back(options.out_dir / "manifest.json");
  return result;
}

NoiseExperimentResult run_noise_experiment(const NoiseExperimentOptions& options) {
  if (options.levels.empty()) throw InputError("need at least one noise level");
  for (std::size_t i = 0; i < options.levels.size(); ++i) {
    for (std::size_t j = i + 1; j < options.levels.size(); ++j) {
      if (options.levels[i] == options.levels[j]) {
        throw InputError("duplicate noise level " +
                         io::format_double(options.levels[i]));
      }
    }
  }
  if (options.metrics.empty()) throw InputError("need at least one metric");
  const Dataset clean = io::read_dataset_csv(options.train_csv);
  const Dataset test = io::read_dataset_csv(options.test_csv);

  NoiseExperimentResult result;
  ensure_dir(options.out_dir);
  std::vector<std::string> outputs;
  const auto record = [&](const std::string& relative) {
    outputs.push_back(relative);
    result.written.push_back(options.out_dir / relative);
  };

  for (std::size_t i = 0; i < options.levels.size(); ++i) {
    const double level = options.levels[i];
    LevelResult lr;
    lr.level = level;
    lr.tag = experiment_tag(i);

    NoiseSpec spec;
    spec.level_positive = level;
    spec.level_negative = level;
    spec.seed = rng::mix(options.noise_seed, static_cast<std::uint64_t>(i));
    lr.noisy = inject_noise(clean, spec);

    const UtilityEvaluator evaluator(lr.noisy.data, test, options.train_config);
    SamplerConfig sampler = options.sampler;
    sampler.seed = rng::mix(options.sampler.seed, static_cast<std::uint64_t>(i));
    std::vector<ShapleyRun> runs =
        mc_shapley_multi(evaluator, options.metrics, sampler, options.threads);
    const std::vector<int> tracked = pick_trace_ids(lr.noisy.data, sampler.seed);

    std::vector<double> fractions = options.bottom_fractions;
    if (level > 0.0) fractions.push_back(level);
    fractions = sorted_fractions(std::move(fractions));

    const std::filesystem::path level_dir = options.out_dir / lr.tag;
    ensure_dir(level_dir);
    io::write_dataset_csv(level_dir / "noisy-train.csv", lr.noisy.data);
    record(lr.tag + "/noisy-train.csv");
    io::write_flips_csv(level_dir / "flips.csv", lr.noisy.flips);
    record(lr.tag + "/flips.csv");

    for (std::size_t c = 0; c < options.metrics.size(); ++c) {
      LevelMetricResult mr;
      mr.metric = options.metrics[c];
      mr.run = std::move(runs[c]);
      mr.ranking = rank_by_value(mr.run.estimates);
      for (const double fraction : fractions) {
        mr.reports.push_back(
            detection_report(mr.ranking, lr.noisy.flips, fraction));
      }
      mr.mapping =
          class_mapping_table(mr.ranking, mr.run.estimates, lr.noisy.data, clean);

      const std::string metric_name = to_string(mr.metric);
      io::write_values_csv(level_dir / ("sv-" + metric_name + ".csv"),
                           mr.run.estimates, lr.noisy.data);
      record(lr.tag + "/sv-" + metric_name + ".csv");
      io::write_trace_csv(level_dir / ("trace-" + metric_name + ".csv"), mr.run,
                          tracked);
      record(lr.tag + "/trace-" + metric_name + ".csv");
      io::write_detection_csv(level_dir / ("detection-" + metric_name + ".csv"),
                              mr.reports);
      record(lr.tag + "/detection-" + metric_name + ".csv");
      io::write_class_mapping_csv(
          level_dir / ("class-mapping-" + metric_name + ".csv"), mr.mapping);
      record(lr.tag + "/class-mapping-" + metric_name + ".csv");

      lr.per_metric.push_back(std::move(mr));
    }
    result.levels.push_back(std::move(lr));
  }

  write_summary_csv(options.out_dir / "summary.csv", result.levels);
  record("summary.csv");

  result.manifest.command = "noise-experiment";
  result.manifest.artifact = kArtifactName;
  result.manifest.version = kArtifactVersion;
  result.manifest.train_csv = options.train_csv.string();
  result.manifest.test_csv = options.test_csv.string();
  result.manifest.metrics = options.metrics;
  result.manifest.train_config = options.train_config;
  result.manifest.sampler = options.sampler;
  result.manifest.levels = options.levels;
  result.manifest.bottom_fractions = options.bottom_fractions;
  result.manifest.noise_seed = options.noise_seed;
  result.manifest.outputs = outputs;
  save_manifest(options.out_dir / "manifest.json", result.manifest);
  result.written.push_back(options.out_dir / "manifest.json");
  return result;
}

ReportResult run_report(const ReportOptions& options) {
  std::vector<std::pair<int, double>> values = io::read_values_csv(options.sv_csv);
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].first == values[i - 1].first) {
      throw InputError(options.sv_csv.string() + ": duplicate id " +
                       std::to_string(values[i].first));
    }
  }
  const Dataset noisy = io::read_dataset_csv(options.noisy_csv);
  const Dataset clean = io::read_dataset_csv(options.clean_csv);

  ShapleyVector sv;
  sv.values = std::move(values);
  sv.metric = options.metric;
  sv.method = ShapleyMethod::monte_carlo;

  ReportResult result;
  const Ranking ranking = rank_by_value(sv);
  const FlipRecord flips = derive_flips(noisy, clean);
  for (const double fraction : sorted_fractions(options.bottom_fractions)) {
    result.reports.push_back(detection_report(ranking, flips, fraction));
  }
  result.mapping = class_mapping_table(ranking, sv, noisy, clean);

  ensure_dir(options.out_dir);
  const std::string metric_name = to_string(options.metric);
  io::write_detection_csv(
      options.out_dir / ("detection-" + metric_name + ".csv"), result.reports);
  io::write_class_mapping_csv(
      options.out_dir / ("class-mapping-" + metric_name + ".csv"),
      result.mapping);
  result.written = {options.out_dir / ("detection-" + metric_name + ".csv"),
                    options.out_dir / ("class-mapping-" + metric_name + ".csv")};

  result.manifest.command = "report";
  result.manifest.artifact = kArtifactName;
  result.manifest.version = kArtifactVersion;
  result.manifest.sv_csv = options.sv_csv.string();
  result.manifest.noisy_csv = options.noisy_csv.string();
  result.manifest.clean_csv = options.clean_csv.string();
  result.manifest.report_metric = options.metric;
  result.manifest.bottom_fractions = options.bottom_fractions;
  result.manifest.outputs = {"detection-" + metric_name + ".csv",
                             "class-mapping-" + metric_name + ".csv"};
  save_manifest(options.out_dir / "manifest.json", result.manifest);
  result.written.push_back(options.out_dir / "manifest.json");
  return result;
}

RerunResult rerun_from_manifest(const std::filesystem::path& manifest_path,
                                const RerunOverrides& overrides) {
  const RunManifest manifest = load_manifest(manifest_path);
  // Without an explicit target the re-run lands next to the manifest, which
  // rewrites the original outputs with identical bytes.
  const std::filesystem::path out_dir =
      overrides.out_dir ? *overrides.out_dir : manifest_path.parent_path();

  RerunResult result;
  result.command = manifest.command;
  if (manifest.command == "synth") {
    SynthOptions options;
    options.config = manifest.synth;
    options.out_dir = out_dir;
    result.written = run_synth(options).written;
  } else if (manifest.command == "value") {
    ValueOptions options;
    options.train_csv = manifest.train_csv;
    options.test_csv = manifest.test_csv;
    options.out_dir = out_dir;
    options.metrics = manifest.metrics;
    options.exact = manifest.exact;
    options.train_config = manifest.train_config;
    options.sampler = manifest.sampler;
    options.threads = overrides.threads ? *overrides.threads : 1;
    options.trace_ids = manifest.trace_ids;
    result.written = run_value(options).written;
  } else if (manifest.command == "noise-experiment") {
    NoiseExperimentOptions options;
    options.train_csv = manifest.train_csv;
    options.test_csv = manifest.test_csv;
    options.out_dir = out_dir;
    options.levels = manifest.levels;
    options.metrics = manifest.metrics;
    options.train_config = manifest.train_config;
    options.sampler = manifest.sampler;
    options.noise_seed = manifest.noise_seed;
    options.bottom_fractions = manifest.bottom_fractions;
    options.threads = overrides.threads ? *overrides.threads : 1;
    result.written = run_noise_experiment(options).written;
  } else if (manifest.command == "report") {
    ReportOptions options;
    options.sv_csv = manifest.sv_csv;
    options.noisy_csv = manifest.noisy_csv;
    options.clean_csv = manifest.clean_csv;
    options.out_dir = out_dir;
    options.metric = manifest.report_metric;
    options.bottom_fractions = manifest.bottom_fractions;
    result.written = run_report(options).written;
  } else {
    throw InputError("unknown manifest command '" + manifest.command + "'");
  }
  return result;
}

}  // namespace shapval

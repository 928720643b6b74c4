// Command line front end: synth, value, noise-experiment, report, plus
// byte-identical re-execution of any recorded manifest.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shapval/errors.hpp"
#include "shapval/experiment.hpp"
#include "shapval/io.hpp"
#include "shapval/version.hpp"

namespace {

using namespace shapval;

// Exit codes: 0 success, 2 bad input (CLI or data), 3 numerical failure,
// 4 I/O failure, 1 anything else.
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;
constexpr int kExitOther = 1;

std::vector<MetricKind> parse_metrics(const std::vector<std::string>& names) {
  std::vector<MetricKind> kinds;
  kinds.reserve(names.size());
  for (const std::string& name : names) kinds.push_back(metric_from_string(name));
  return kinds;
}

void print_written(const std::vector<std::filesystem::path>& written) {
  for (const std::filesystem::path& path : written) {
    std::cout << "wrote " << path.string() << '\n';
  }
}

void print_convergence(const std::string& label, const ShapleyRun& run) {
  std::cout << label << ": " << run.estimates.n_permutations << " permutations";
  if (run.converged_at) {
    std::cout << ", converged at " << *run.converged_at;
  } else {
    std::cout << ", no convergence within the budget";
  }
  std::cout << '\n';
}

// In manifest mode every other flag must stay untouched; only the output
// directory and the worker count may be overridden.
void forbid_extras_with_manifest(const CLI::App* cmd) {
  for (const CLI::Option* option : cmd->get_options()) {
    if (option->count() == 0) continue;
    const std::string name = option->get_name();
    if (name == "--from-manifest" || name == "--out-dir" || name == "--threads" ||
        name == "--help") {
      continue;
    }
    throw InputError("--from-manifest cannot be combined with " + name);
  }
}

int rerun(const CLI::App* cmd, const std::string& manifest_path,
          const std::string& out_dir, int threads, bool threads_set) {
  forbid_extras_with_manifest(cmd);
  const RunManifest manifest = load_manifest(manifest_path);
  if (manifest.command != cmd->get_name()) {
    throw InputError("manifest records a '" + manifest.command +
                     "' run; use `shapval " + manifest.command +
                     " --from-manifest`");
  }
  RerunOverrides overrides;
  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (threads_set) overrides.threads = threads;
  const RerunResult result = rerun_from_manifest(manifest_path, overrides);
  print_written(result.written);
  return 0;
}

// ---------------------------------------------------------------------------
// Per-subcommand option bags. CLI11 writes into these; the run() methods
// validate whatever CLI11 cannot express and execute.
// ---------------------------------------------------------------------------

struct SamplerCli {
  SamplerConfig sampler;
  bool no_early_stop = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--permutations", sampler.max_permutations,
                    "Permutation budget; 0 means three per training point");
    cmd->add_option("--seed", sampler.seed, "Sampling seed");
    cmd->add_option("--checkpoint-every", sampler.checkpoint_every,
                    "Record running estimates every K permutations");
    cmd->add_option("--convergence-window", sampler.convergence_window,
                    "Checkpoints the convergence monitor inspects; 0 means one "
                    "per training point");
    cmd->add_option("--convergence-tol", sampler.convergence_tol,
                    "Estimate movement tolerated by the monitor, relative to "
                    "the spread of the values");
    cmd->add_flag("--no-early-stop", no_early_stop,
                  "Run the full budget even after convergence");
  }

  SamplerConfig resolved() const {
    SamplerConfig out = sampler;
    out.stop_on_convergence = !no_early_stop;
    return out;
  }
};

struct TrainCli {
  TrainConfig config;
  std::optional<double> class_weight;

  void attach(CLI::App* cmd) {
    cmd->add_option("--learning-rate", config.learning_rate,
                    "Gradient descent step size");
    cmd->add_option("--max-epochs", config.max_epochs,
                    "Upper bound on gradient descent epochs");
    cmd->add_option("--l2-penalty", config.l2_penalty,
                    "L2 penalty on the weights (never the bias)");
    cmd->add_option("--class-weight", class_weight,
                    "Positive-class loss weight; omit for max(1, #neg/#pos)");
    cmd->add_option("--fit-tol", config.convergence_tol,
                    "Stop fitting when the loss moves less than this");
  }

  TrainConfig resolved() const {
    TrainConfig out = config;
    out.class_weight_positive = class_weight;
    return out;
  }
};

struct SynthCli {
  SynthConfig config;
  std::string out_dir;
  std::string from_manifest;

  int run(const CLI::App* cmd) {
    if (!from_manifest.empty()) return rerun(cmd, from_manifest, out_dir, 0, false);
    if (out_dir.empty()) throw InputError("--out-dir is required");
    SynthOptions options;
    options.config = config;
    options.out_dir = out_dir;
    const SynthResult result = run_synth(options);
    std::cout << "train: " << result.data.train.size() << " points, test: "
              << result.data.test.size() << " points, dim "
              << result.data.train.dim() << '\n';
    print_written(result.written);
    return 0;
  }
};

struct ValueCli {
  std::string train_csv;
  std::string test_csv;
  std::string out_dir;
  std::vector<std::string> metric_names = {"accuracy"};
  bool exact = false;
  SamplerCli sampler;
  TrainCli train;
  int threads = 1;
  std::vector<int> trace_ids;
  std::string from_manifest;

  int run(const CLI::App* cmd) {
    if (!from_manifest.empty()) {
      return rerun(cmd, from_manifest, out_dir, threads,
                   cmd->count("--threads") > 0);
    }
    if (train_csv.empty() || test_csv.empty() || out_dir.empty()) {
      throw InputError("--train, --test and --out-dir are required");
    }
    ValueOptions options;
    options.train_csv = train_csv;
    options.test_csv = test_csv;
    options.out_dir = out_dir;
    options.metrics = parse_metrics(metric_names);
    options.exact = exact;
    options.train_config = train.resolved();
    options.sampler = sampler.resolved();
    options.threads = threads;
    options.trace_ids = trace_ids;
    const ValueResult result = run_value(options);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      print_convergence(to_string(result.vectors[i].metric), result.runs[i]);
    }
    print_written(result.written);
    return 0;
  }
};

struct NoiseCli {
  std::string train_csv;
  std::string test_csv;
  std::string out_dir;
  std::vector<double> levels = {0.1, 0.2, 0.3};
  std::vector<std::string> metric_names = {"accuracy", "recall", "specificity"};
  SamplerCli sampler;
  TrainCli train;
  std::uint64_t noise_seed = 0;
  std::vector<double> bottom_fractions = {0.3};
  int threads = 1;
  std::string from_manifest;

  int run(const CLI::App* cmd) {
    if (!from_manifest.empty()) {
      return rerun(cmd, from_manifest, out_dir, threads,
                   cmd->count("--threads") > 0);
    }
    if (train_csv.empty() || test_csv.empty() || out_dir.empty()) {
      throw InputError("--train, --test and --out-dir are required");
    }
    NoiseExperimentOptions options;
    options.train_csv = train_csv;
    options.test_csv = test_csv;
    options.out_dir = out_dir;
    options.levels = levels;
    options.metrics = parse_metrics(metric_names);
    options.train_config = train.resolved();
    options.sampler = sampler.resolved();
    options.noise_seed = noise_seed;
    options.bottom_fractions = bottom_fractions;
    options.threads = threads;
    const NoiseExperimentResult result = run_noise_experiment(options);
    for (const LevelResult& level : result.levels) {
      for (const LevelMetricResult& metric : level.per_metric) {
        print_convergence(level.tag + " level " + io::format_double(level.level) +
                              " " + to_string(metric.metric),
                          metric.run);
      }
    }
    print_written(result.written);
    return 0;
  }
};

struct ReportCli {
  std::string sv_csv;
  std::string noisy_csv;
  std::string clean_csv;
  std::string out_dir;
  std::string metric_name = "accuracy";
  std::vector<double> bottom_fractions = {0.3};
  std::string from_manifest;

  int run(const CLI::App* cmd) {
    if (!from_manifest.empty()) return rerun(cmd, from_manifest, out_dir, 0, false);
    if (sv_csv.empty() || noisy_csv.empty() || clean_csv.empty() ||
        out_dir.empty()) {
      throw InputError("--sv, --noisy, --clean and --out-dir are required");
    }
    ReportOptions options;
    options.sv_csv = sv_csv;
    options.noisy_csv = noisy_csv;
    options.clean_csv = clean_csv;
    options.out_dir = out_dir;
    options.metric = metric_from_string(metric_name);
    options.bottom_fractions = bottom_fractions;
    const ReportResult result = run_report(options);
    for (const DetectionReport& report : result.reports) {
      std::cout << "bottom " << io::format_double(report.bottom_fraction)
                << ": captured " << io::format_double(report.captured_total)
                << " of the flips\n";
    }
    print_written(result.written);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-point valuation of binary-classification training data"};
  app.set_version_flag("--version",
                       std::string(kArtifactName) + " " + kArtifactVersion);
  app.require_subcommand(1);

  SynthCli synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Generate a two-Gaussian train/test pair");
  synth_cmd->add_option("--n-positive", synth.config.n_positive,
                        "Positive training points");
  synth_cmd->add_option("--n-negative", synth.config.n_negative,
                        "Negative training points");
  synth_cmd->add_option("--dim", synth.config.dim, "Feature dimension");
  synth_cmd->add_option("--separation", synth.config.class_separation,
                        "Distance between the class means");
  synth_cmd->add_option("--seed", synth.config.seed, "Generator seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");
  synth_cmd->add_option("--from-manifest", synth.from_manifest,
                        "Re-execute a recorded synth manifest");

  ValueCli value;
  CLI::App* value_cmd = app.add_subcommand(
      "value", "Estimate per-point values of a training set");
  value_cmd->add_option("--train", value.train_csv, "Training CSV");
  value_cmd->add_option("--test", value.test_csv, "Test CSV");
  value_cmd->add_option("--out-dir", value.out_dir, "Output directory");
  value_cmd->add_option("--metric", value.metric_names,
                        "accuracy, recall or specificity; repeatable");
  value_cmd->add_flag("--exact", value.exact,
                      "Exhaustive enumeration instead of sampling");
  value.sampler.attach(value_cmd);
  value.train.attach(value_cmd);
  value_cmd->add_option("--threads", value.threads,
                        "Worker threads; never changes the results");
  value_cmd->add_option("--trace-id", value.trace_ids,
                        "Point id to trace; repeatable, default two per class");
  value_cmd->add_option("--from-manifest", value.from_manifest,
                        "Re-execute a recorded value manifest");

  NoiseCli noise;
  CLI::App* noise_cmd = app.add_subcommand(
      "noise-experiment",
      "Flip training labels at several levels and measure how well low "
      "values flag the flips");
  noise_cmd->add_option("--train", noise.train_csv, "Clean training CSV");
  noise_cmd->add_option("--test", noise.test_csv, "Test CSV");
  noise_cmd->add_option("--out-dir", noise.out_dir, "Output directory");
  noise_cmd->add_option("--level", noise.levels,
                        "Per-class flip fraction; repeatable");
  noise_cmd->add_option("--metric", noise.metric_names,
                        "accuracy, recall or specificity; repeatable");
  noise.sampler.attach(noise_cmd);
  noise.train.attach(noise_cmd);
  noise_cmd->add_option("--noise-seed", noise.noise_seed, "Label flip seed");
  noise_cmd->add_option("--bottom-fraction", noise.bottom_fractions,
                        "Tail size for the detection report; repeatable");
  noise_cmd->add_option("--threads", noise.threads,
                        "Worker threads; never changes the results");
  noise_cmd->add_option("--from-manifest", noise.from_manifest,
                        "Re-execute a recorded noise-experiment manifest");

  ReportCli report;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Detection analysis of an existing value CSV");
  report_cmd->add_option("--sv", report.sv_csv, "Value CSV (id,sv,input_label)");
  report_cmd->add_option("--noisy", report.noisy_csv,
                         "Dataset the values were computed on");
  report_cmd->add_option("--clean", report.clean_csv, "Ground-truth dataset");
  report_cmd->add_option("--out-dir", report.out_dir, "Output directory");
  report_cmd->add_option("--metric", report.metric_name,
                         "Label for the output files");
  report_cmd->add_option("--bottom-fraction", report.bottom_fractions,
                         "Tail size for the detection report; repeatable");
  report_cmd->add_option("--from-manifest", report.from_manifest,
                         "Re-execute a recorded report manifest");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return synth.run(synth_cmd);
    if (value_cmd->parsed()) return value.run(value_cmd);
    if (noise_cmd->parsed()) return noise.run(noise_cmd);
    if (report_cmd->parsed()) return report.run(report_cmd);
    return kExitOther;  // unreachable: a subcommand is required
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitOther;
  }
}

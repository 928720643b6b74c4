#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shapval/dataset.hpp"
#include "shapval/metrics.hpp"
#include "shapval/model.hpp"

namespace shapval {

enum class ShapleyMethod : std::uint8_t { exact, monte_carlo };
const char* to_string(ShapleyMethod method);

// Exact enumeration is refused above this player count unless the caller
// raises the cap explicitly (upper bound 25: the value table holds 2^N
// doubles).
inline constexpr int kDefaultExactCap = 16;
inline constexpr int kMaxExactCap = 25;

// Every sampled permutation must telescope: the sum of its marginal
// contributions has to reproduce V(D) - V(empty) to this tolerance, or the
// run aborts with NumericError.
inline constexpr double kTelescopeTolerance = 1e-9;

// Per-point values under one metric. `values` is sorted by id ascending.
struct ShapleyVector {
  std::vector<std::pair<int, double>> values;
  MetricKind metric = MetricKind::accuracy;
  ShapleyMethod method = ShapleyMethod::exact;
  int n_permutations = 0;  // 0 for exact results

  double value_of(int id) const;  // InputError when the id is absent
};

// Running estimates recorded after a fixed number of permutations.
// `estimates` is aligned with the ascending player id order of the run.
struct TraceCheckpoint {
  int permutation_count = 0;
  std::vector<double> estimates;
};

// Monte Carlo sampler controls.
//
// The sampler walks random permutations of the training points and averages
// each point's marginal utility. It stops at max_permutations, or earlier
// when the convergence monitor fires and stop_on_convergence is set. The
// monitor looks at the last `convergence_window` checkpoints and fires when
// no point's running estimate moved by more than convergence_tol times the
// current spread of the estimates. The default tolerance is calibrated so
// that runs on well-separated synthetic data settle within roughly two to
// three permutations per point: running means still drift by 10-25% of the
// spread per N-permutation window in that regime, so a tighter default would
// keep sampling long after the ranking has stabilised.
struct SamplerConfig {
  int max_permutations = 0;    // 0 -> three permutations per training point
  int checkpoint_every = 1;    // record a trace checkpoint every k permutations
  int convergence_window = 0;  // checkpoints considered by the monitor; 0 -> N
  double convergence_tol = 0.25;
  std::uint64_t seed = 0;
  bool stop_on_convergence = true;

  int resolved_max_permutations(int n_points) const;
  int resolved_window(int n_points) const;
  void validate() const;
  bool operator==(const SamplerConfig&) const = default;
};

// Result of one Monte Carlo sampling run for one metric.
struct ShapleyRun {
  ShapleyVector estimates;
  std::vector<int> marginal_counts;  // per point, aligned with estimates
  std::vector<TraceCheckpoint> trace;
  std::uint64_t seed = 0;
  std::optional<int> converged_at;   // first checkpoint where the monitor fired
  double telescope_gap_max = 0.0;    // worst per-permutation residual observed
};

// ---------------------------------------------------------------------------
// Game-level engines. Players are opaque ids; the characteristic function is
// a callback. The dataset-backed entry points below are thin wrappers.
// ---------------------------------------------------------------------------

// Value(s) of a coalition, one entry per channel; must return the same
// channel count for every call. Called with member ids sorted ascending.
using CoalitionValueFn =
    std::function<std::vector<double>(std::span<const int> member_ids)>;

struct GameRun {
  std::vector<int> player_ids;  // ascending
  std::vector<double> values;   // running means, aligned with player_ids
  std::vector<int> marginal_counts;
  std::vector<TraceCheckpoint> trace;
  std::uint64_t seed = 0;
  int permutations = 0;
  std::optional<int> converged_at;
  double telescope_gap_max = 0.0;
};

// Exact values by full subset enumeration. Players are 0..n-1; coalitions
// are bitmasks (bit i = player i present). O(2^n) value calls, O(n 2^n) sum.
std::vector<double> exact_shapley_game(
    int n_players, const std::function<double(std::uint32_t mask)>& value,
    int hard_cap = kDefaultExactCap);

// Monte Carlo estimates for all channels of a value function at once. Every
// channel shares the same permutation stream, so estimates across channels
// are directly comparable. Results are bit-identical for a given seed
// regardless of `threads`.
std::vector<GameRun> mc_shapley_game(std::vector<int> player_ids,
                                     const CoalitionValueFn& value,
                                     int n_channels,
                                     const SamplerConfig& sampler,
                                     int threads = 1);

// Permutation number `index` of the stream identified by `seed`, over the
// ascending id list. The sampler consumes exactly this sequence; exposing it
// lets tests re-derive any run independently.
Permutation permutation_for_index(const std::vector<int>& ids,
                                  std::uint64_t seed, std::uint64_t index);

// Pure re-evaluation of the convergence monitor on a recorded run.
bool has_converged(const GameRun& run, const SamplerConfig& sampler);
bool has_converged(const ShapleyRun& run, const SamplerConfig& sampler);

// ---------------------------------------------------------------------------
// Dataset-backed entry points.
// ---------------------------------------------------------------------------

ShapleyVector exact_shapley(const UtilityEvaluator& evaluator, MetricKind kind,
                            int hard_cap = kDefaultExactCap);
ShapleyVector exact_shapley(const Dataset& train, const Dataset& test,
                            MetricKind kind, const TrainConfig& config = {},
                            int hard_cap = kDefaultExactCap);

std::vector<ShapleyRun> mc_shapley_multi(const UtilityEvaluator& evaluator,
                                         std::span<const MetricKind> kinds,
                                         const SamplerConfig& sampler,
                                         int threads = 1);
ShapleyRun mc_shapley(const Dataset& train, const Dataset& test, MetricKind kind,
                      const TrainConfig& config, const SamplerConfig& sampler,
                      int threads = 1);

// Absolute efficiency residual |sum_i SV_i - (v_full - v_empty)|.
double efficiency_gap(const ShapleyVector& sv, Score v_full, Score v_empty);

}  // namespace shapval

#include "shapval/shapley.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "shapval/errors.hpp"
#include "shapval/rng.hpp"

namespace shapval {

const char* to_string(ShapleyMethod method) {
  return method == ShapleyMethod::exact ? "exact" : "monte-carlo";
}

double ShapleyVector::value_of(int id) const {
  const auto it = std::lower_bound(
      values.begin(), values.end(), id,
      [](const std::pair<int, double>& entry, int key) { return entry.first < key; });
  if (it == values.end() || it->first != id) {
    throw InputError("no value for point id " + std::to_string(id));
  }
  return it->second;
}

int SamplerConfig::resolved_max_permutations(int n_points) const {
  return max_permutations > 0 ? max_permutations : 3 * n_points;
}

int SamplerConfig::resolved_window(int n_points) const {
  return convergence_window > 0 ? convergence_window : n_points;
}

void SamplerConfig::validate() const {
  if (max_permutations < 0) throw InputError("max_permutations must be >= 0");
  if (checkpoint_every < 1) throw InputError("checkpoint_every must be >= 1");
  if (convergence_window < 0) throw InputError("convergence_window must be >= 0");
  if (!(convergence_tol > 0.0) || !std::isfinite(convergence_tol)) {
    throw InputError("convergence_tol must be a positive finite number");
  }
  // Both limits explicit: the monitor must be able to fire before the budget
  // runs out, otherwise the configuration is contradictory.
  if (max_permutations > 0 && convergence_window > 0 &&
      convergence_window * checkpoint_every >= max_permutations &&
      stop_on_convergence) {
    throw InputError(
        "convergence_window * checkpoint_every must stay below "
        "max_permutations for the monitor to be able to fire");
  }
}

namespace {

// Monitor predicate over the last `window` checkpoints: no per-point running
// mean may have moved by more than tol times the current estimate spread
// (floored to dodge division hazards on degenerate games).
bool window_converged(const std::vector<TraceCheckpoint>& trace, int window,
                      double tol) {
  if (window <= 0 || static_cast<int>(trace.size()) < window) return false;
  const std::vector<double>& last = trace.back().estimates;
  if (last.empty()) return false;
  const auto [mn_it, mx_it] = std::minmax_element(last.begin(), last.end());
  const double spread = std::max(*mx_it - *mn_it, 1e-12);

  const std::size_t begin = trace.size() - static_cast<std::size_t>(window);
  double worst = 0.0;
  for (std::size_t i = 0; i < last.size(); ++i) {
    double lo = trace[begin].estimates[i];
    double hi = lo;
    for (std::size_t k = begin + 1; k < trace.size(); ++k) {
      const double v = trace[k].estimates[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst < tol * spread;
}

// One permutation walk: incremental prefix evaluation, so a full pass costs
// exactly n value calls (the empty and full values are shared by all walks).
struct WalkResult {
  std::vector<double> marginals;  // channels * n, dense player order
  std::vector<double> gaps;       // per channel telescope residual
};

int dense_index(const std::vector<int>& ids, int id) {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  return static_cast<int>(it - ids.begin());
}

WalkResult walk_permutation(const std::vector<int>& ids, std::uint64_t seed,
                            std::uint64_t index, const CoalitionValueFn& value,
                            int channels, const std::vector<double>& v_empty,
                            const std::vector<double>& v_full) {
  const int n = static_cast<int>(ids.size());
  const Permutation perm = permutation_for_index(ids, seed, index);

  WalkResult out;
  out.marginals.assign(static_cast<std::size_t>(channels) * n, 0.0);
  out.gaps.assign(static_cast<std::size_t>(channels), 0.0);

  std::vector<int> prefix;
  prefix.reserve(n);
  std::vector<double> prev = v_empty;
  for (int step = 0; step < n; ++step) {
    const int id = perm.order()[static_cast<std::size_t>(step)];
    prefix.insert(std::lower_bound(prefix.begin(), prefix.end(), id), id);
    std::vector<double> vals = value(prefix);
    if (static_cast<int>(vals.size()) != channels) {
      throw InputError("coalition value function changed its channel count");
    }
    const int at = dense_index(ids, id);
    for (int c = 0; c < channels; ++c) {
      out.marginals[static_cast<std::size_t>(c) * n + at] = vals[c] - prev[c];
    }
    prev.swap(vals);
  }

  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += out.marginals[static_cast<std::size_t>(c) * n + i];
    }
    const double gap = std::abs(sum - (v_full[c] - v_empty[c]));
    if (gap > kTelescopeTolerance) {
      throw NumericError("permutation " + std::to_string(index) +
                         " violates the telescoping identity on channel " +
                         std::to_string(c) + " (gap " + std::to_string(gap) + ")");
    }
    out.gaps[static_cast<std::size_t>(c)] = gap;
  }
  return out;
}

std::vector<double> checked_value(const CoalitionValueFn& value,
                                  std::span<const int> members, int channels) {
  std::vector<double> v = value(members);
  if (static_cast<int>(v.size()) != channels) {
    throw InputError("coalition value function changed its channel count");
  }
  return v;
}

}  // namespace

Permutation permutation_for_index(const std::vector<int>& ids,
                                  std::uint64_t seed, std::uint64_t index) {
  // Counter-based stream: permutation j depends only on (seed, j), never on
  // which worker draws it. This is what makes thread counts irrelevant.
  rng::Stream stream(rng::mix(rng::mix(seed, rng::kPermutationStream), index));
  std::vector<int> order = ids;
  rng::shuffle(order, stream);
  return Permutation::of(std::move(order));
}

std::vector<double> exact_shapley_game(
    int n_players, const std::function<double(std::uint32_t)>& value,
    int hard_cap) {
  if (n_players < 1) throw InputError("exact enumeration needs at least one player");
  if (hard_cap < 1 || hard_cap > kMaxExactCap) {
    throw InputError("exact cap must lie in [1, " +
                     std::to_string(kMaxExactCap) + "]");
  }
  if (n_players > hard_cap) {
    throw InputError("exact enumeration over " + std::to_string(n_players) +
                     " players exceeds the cap of " + std::to_string(hard_cap) +
                     "; use the Monte Carlo sampler instead");
  }

  const std::uint32_t subsets = 1u << n_players;
  std::vector<double> v(subsets);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) v[mask] = value(mask);

  // weight[k] = 1 / (n * C(n-1, k)) -- the subset-size weighting of the
  // classic averaged-marginal formula.
  std::vector<double> weight(static_cast<std::size_t>(n_players));
  {
    std::uint64_t binom = 1;  // C(n-1, 0)
    for (int k = 0; k < n_players; ++k) {
      weight[static_cast<std::size_t>(k)] =
          1.0 / (static_cast<double>(n_players) * static_cast<double>(binom));
      binom = binom * static_cast<std::uint64_t>(n_players - 1 - k) /
              static_cast<std::uint64_t>(k + 1);
    }
  }

  std::vector<double> sv(static_cast<std::size_t>(n_players), 0.0);
  for (int i = 0; i < n_players; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(mask))] *
             (v[mask | bit] - v[mask]);
    }
    sv[static_cast<std::size_t>(i)] = acc;
  }
  return sv;
}

std::vector<GameRun> mc_shapley_game(std::vector<int> player_ids,
                                     const CoalitionValueFn& value,
                                     int n_channels,
                                     const SamplerConfig& sampler,
                                     int threads) {
  sampler.validate();
  if (n_channels < 1) throw InputError("need at least one value channel");
  std::sort(player_ids.begin(), player_ids.end());
  if (player_ids.empty()) throw InputError("need at least one player");
  if (std::adjacent_find(player_ids.begin(), player_ids.end()) !=
      player_ids.end()) {
    throw InputError("duplicate player id");
  }
  if (threads < 1) threads = 1;

  const int n = static_cast<int>(player_ids.size());
  const int max_perms = sampler.resolved_max_permutations(n);
  const int window = sampler.resolved_window(n);

  const std::vector<double> v_empty = checked_value(value, {}, n_channels);
  const std::vector<double> v_full = checked_value(value, player_ids, n_channels);

  std::vector<GameRun> runs(static_cast<std::size_t>(n_channels));
  for (auto& run : runs) {
    run.player_ids = player_ids;
    run.seed = sampler.seed;
  }
  std::vector<std::vector<double>> sums(
      static_cast<std::size_t>(n_channels),
      std::vector<double>(static_cast<std::size_t>(n), 0.0));

  int completed = 0;
  bool stop = false;

  // Reduction is strictly in permutation-index order; together with the
  // counter-based permutation stream this pins the result bits regardless of
  // how many workers produced the walks.
  auto reduce = [&](const WalkResult& walk) {
    ++completed;
    for (int c = 0; c < n_channels; ++c) {
      GameRun& run = runs[static_cast<std::size_t>(c)];
      auto& sum = sums[static_cast<std::size_t>(c)];
      for (int i = 0; i < n; ++i) {
        sum[static_cast<std::size_t>(i)] +=
            walk.marginals[static_cast<std::size_t>(c) * n + i];
      }
      run.telescope_gap_max =
          std::max(run.telescope_gap_max, walk.gaps[static_cast<std::size_t>(c)]);
    }
    if (completed % sampler.checkpoint_every != 0) return;
    for (int c = 0; c < n_channels; ++c) {
      GameRun& run = runs[static_cast<std::size_t>(c)];
      TraceCheckpoint cp;
      cp.permutation_count = completed;
      cp.estimates.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        cp.estimates[static_cast<std::size_t>(i)] =
            sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] /
            static_cast<double>(completed);
      }
      run.trace.push_back(std::move(cp));
      if (!run.converged_at &&
          window_converged(run.trace, window, sampler.convergence_tol)) {
        run.converged_at = completed;
      }
    }
    if (sampler.stop_on_convergence) {
      stop = std::all_of(runs.begin(), runs.end(),
                         [](const GameRun& r) { return r.converged_at.has_value(); });
    }
  };

  if (threads == 1) {
    for (int j = 0; j < max_perms && !stop; ++j) {
      reduce(walk_permutation(player_ids, sampler.seed, static_cast<std::uint64_t>(j),
                              value, n_channels, v_empty, v_full));
    }
  } else {
    const int chunk = std::max(threads * 4, 16);
    int next = 0;
    while (next < max_perms && !stop) {
      const int begin = next;
      const int end = std::min(begin + chunk, max_perms);
      std::vector<WalkResult> results(static_cast<std::size_t>(end - begin));
      std::atomic<int> cursor{begin};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (;;) {
            const int j = cursor.fetch_add(1, std::memory_order_relaxed);
            if (j >= end) return;
            try {
              results[static_cast<std::size_t>(j - begin)] = walk_permutation(
                  player_ids, sampler.seed, static_cast<std::uint64_t>(j), value,
                  n_channels, v_empty, v_full);
            } catch (...) {
              std::lock_guard<std::mutex> lock(failure_mutex);
              if (!failure) failure = std::current_exception();
              return;
            }
          }
        });
      }
      for (std::thread& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);
      for (int j = begin; j < end && !stop; ++j) {
        reduce(results[static_cast<std::size_t>(j - begin)]);
      }
      next = end;
    }
  }

  for (int c = 0; c < n_channels; ++c) {
    GameRun& run = runs[static_cast<std::size_t>(c)];
    run.permutations = completed;
    run.marginal_counts.assign(static_cast<std::size_t>(n), completed);
    run.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      run.values[static_cast<std::size_t>(i)] =
          sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] /
          static_cast<double>(completed);
    }
  }
  return runs;
}

bool has_converged(const GameRun& run, const SamplerConfig& sampler) {
  const int n = static_cast<int>(run.player_ids.size());
  return window_converged(run.trace, sampler.resolved_window(n),
                          sampler.convergence_tol);
}

bool has_converged(const ShapleyRun& run, const SamplerConfig& sampler) {
  const int n = static_cast<int>(run.estimates.values.size());
  return window_converged(run.trace, sampler.resolved_window(n),
                          sampler.convergence_tol);
}

ShapleyVector exact_shapley(const UtilityEvaluator& evaluator, MetricKind kind,
                            int hard_cap) {
  const std::vector<int>& ids = evaluator.train().ids();
  const int n = static_cast<int>(ids.size());
  if (n > hard_cap) {
    throw InputError("exact enumeration over " + std::to_string(n) +
                     " training points exceeds the cap of " +
                     std::to_string(hard_cap) +
                     "; use the Monte Carlo sampler instead");
  }
  const auto value = [&](std::uint32_t mask) {
    std::vector<int> members;
    members.reserve(static_cast<std::size_t>(std::popcount(mask)));
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) members.push_back(ids[static_cast<std::size_t>(i)]);
    }
    return metric_score(evaluator.coalition_confusion(members), kind).value();
  };
  const std::vector<double> sv = exact_shapley_game(n, value, hard_cap);

  ShapleyVector out;
  out.metric = kind;
  out.method = ShapleyMethod::exact;
  out.n_permutations = 0;
  out.values.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.values.emplace_back(ids[static_cast<std::size_t>(i)],
                            sv[static_cast<std::size_t>(i)]);
  }
  return out;
}

ShapleyVector exact_shapley(const Dataset& train, const Dataset& test,
                            MetricKind kind, const TrainConfig& config,
                            int hard_cap) {
  const UtilityEvaluator evaluator(train, test, config);
  return exact_shapley(evaluator, kind, hard_cap);
}

std::vector<ShapleyRun> mc_shapley_multi(const UtilityEvaluator& evaluator,
                                         std::span<const MetricKind> kinds,
                                         const SamplerConfig& sampler,
                                         int threads) {
  if (kinds.empty()) throw InputError("need at least one metric");
  for (std::size_t a = 0; a < kinds.size(); ++a) {
    for (std::size_t b = a + 1; b < kinds.size(); ++b) {
      if (kinds[a] == kinds[b]) {
        throw InputError(std::string("duplicate metric ") + to_string(kinds[a]));
      }
    }
  }

  const CoalitionValueFn value = [&](std::span<const int> members) {
    const ConfusionCounts counts = evaluator.coalition_confusion(members);
    std::vector<double> out;
    out.reserve(kinds.size());
    for (const MetricKind kind : kinds) {
      out.push_back(metric_score(counts, kind).value());
    }
    return out;
  };

  std::vector<GameRun> games =
      mc_shapley_game(evaluator.train().ids(), value,
                      static_cast<int>(kinds.size()), sampler, threads);

  std::vector<ShapleyRun> runs;
  runs.reserve(games.size());
  for (std::size_t c = 0; c < games.size(); ++c) {
    GameRun& game = games[c];
    ShapleyRun run;
    run.estimates.metric = kinds[c];
    run.estimates.method = ShapleyMethod::monte_carlo;
    run.estimates.n_permutations = game.permutations;
    run.estimates.values.reserve(game.player_ids.size());
    for (std::size_t i = 0; i < game.player_ids.size(); ++i) {
      run.estimates.values.emplace_back(game.player_ids[i], game.values[i]);
    }
    run.marginal_counts = std::move(game.marginal_counts);
    run.trace = std::move(game.trace);
    run.seed = game.seed;
    run.converged_at = game.converged_at;
    run.telescope_gap_max = game.telescope_gap_max;
    runs.push_back(std::move(run));
  }
  return runs;
}

ShapleyRun mc_shapley(const Dataset& train, const Dataset& test, MetricKind kind,
                      const TrainConfig& config, const SamplerConfig& sampler,
                      int threads) {
  const UtilityEvaluator evaluator(train, test, config);
  const MetricKind kinds[] = {kind};
  std::vector<ShapleyRun> runs = mc_shapley_multi(evaluator, kinds, sampler, threads);
  return std::move(runs.front());
}

double efficiency_gap(const ShapleyVector& sv, Score v_full, Score v_empty) {
  double sum = 0.0;
  for (const auto& [id, value] : sv.values) sum += value;
  return std::abs(sum - (v_full.value() - v_empty.value()));
}

}  // namespace shapval

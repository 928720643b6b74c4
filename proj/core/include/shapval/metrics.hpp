#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shapval/dataset.hpp"
#include "shapval/model.hpp"

namespace shapval {

enum class MetricKind : std::uint8_t { accuracy, recall, specificity };

inline constexpr std::array<MetricKind, 3> kAllMetrics = {
    MetricKind::accuracy, MetricKind::recall, MetricKind::specificity};

const char* to_string(MetricKind kind);
MetricKind metric_from_string(std::string_view text);

struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// A metric value, guaranteed finite and inside [0, 1].
class Score {
 public:
  explicit Score(double value);
  double value() const { return value_; }
  bool operator==(const Score&) const = default;

 private:
  double value_ = 0.0;
};

// Tally of model predictions over a non-empty test set.
ConfusionCounts confusion(const Model& model, const Dataset& test);

// accuracy = (tp+tn)/total, recall = tp/(tp+fn), specificity = tn/(tn+fp).
// A zero denominator (metric undefined on this test set) is an InputError.
Score metric_score(const ConfusionCounts& counts, MetricKind kind);

// Coalition utility: train on the coalition, score on a fixed test set.
// One confusion matrix is cached per coalition, so evaluating the same
// coalition under several metrics costs a single model fit. The cache is
// sharded and safe for concurrent use; entries are never evicted.
class UtilityEvaluator {
 public:
  // The test set must be non-empty, contain both classes, and match the
  // training set's feature dimension.
  UtilityEvaluator(Dataset train, Dataset test, TrainConfig config = {});

  // member_ids must be sorted ascending and refer to training points.
  ConfusionCounts coalition_confusion(std::span<const int> member_ids) const;
  ConfusionCounts coalition_confusion(const Coalition& coalition) const;

  Score utility(const Coalition& coalition, MetricKind kind) const;

  const Dataset& train() const { return train_; }
  const Dataset& test() const { return test_; }
  const TrainConfig& config() const { return config_; }

  // Observability for tests and benchmarks.
  std::uint64_t fit_count() const { return fits_.load(std::memory_order_relaxed); }
  std::size_t cache_entries() const;

 private:
  static constexpr std::size_t kShardCount = 64;

  struct KeyHash {
    std::size_t operator()(const std::vector<int>& key) const noexcept;
  };
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_map<std::vector<int>, ConfusionCounts, KeyHash> map;
  };

  ConfusionCounts evaluate_members(std::span<const int> member_ids) const;

  Dataset train_;
  Dataset test_;
  TrainConfig config_;
  mutable std::array<Shard, kShardCount> shards_;
  mutable std::atomic<std::uint64_t> fits_{0};
};

}  // namespace shapval

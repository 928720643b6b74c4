#include "shapval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapval/errors.hpp"

namespace shapval {

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::recall: return "recall";
    case MetricKind::specificity: return "specificity";
  }
  throw InputError("unknown metric kind");
}

MetricKind metric_from_string(std::string_view text) {
  if (text == "accuracy") return MetricKind::accuracy;
  if (text == "recall") return MetricKind::recall;
  if (text == "specificity") return MetricKind::specificity;
  throw InputError("unknown metric '" + std::string(text) +
                   "' (expected accuracy, recall or specificity)");
}

Score::Score(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw InputError("score must be a finite value in [0, 1]");
  }
}

ConfusionCounts confusion(const Model& model, const Dataset& test) {
  if (test.empty()) throw InputError("confusion counts need a non-empty test set");
  ConfusionCounts counts;
  for (const DataPoint& p : test.points()) {
    const Label predicted = model.predict(p.features);
    if (p.label == Label::positive) {
      (predicted == Label::positive ? counts.tp : counts.fn) += 1;
    } else {
      (predicted == Label::negative ? counts.tn : counts.fp) += 1;
    }
  }
  return counts;
}

Score metric_score(const ConfusionCounts& counts, MetricKind kind) {
  switch (kind) {
    case MetricKind::accuracy: {
      const long total = counts.total();
      if (total <= 0) throw InputError("accuracy is undefined on zero predictions");
      return Score(static_cast<double>(counts.tp + counts.tn) /
                   static_cast<double>(total));
    }
    case MetricKind::recall: {
      const long positives = counts.tp + counts.fn;
      if (positives <= 0) {
        throw InputError("recall is undefined without positive test points");
      }
      return Score(static_cast<double>(counts.tp) / static_cast<double>(positives));
    }
    case MetricKind::specificity: {
      const long negatives = counts.tn + counts.fp;
      if (negatives <= 0) {
        throw InputError("specificity is undefined without negative test points");
      }
      return Score(static_cast<double>(counts.tn) / static_cast<double>(negatives));
    }
  }
  throw InputError("unknown metric kind");
}

UtilityEvaluator::UtilityEvaluator(Dataset train, Dataset test, TrainConfig config)
    : train_(std::move(train)), test_(std::move(test)), config_(config) {
  config_.validate();
  if (train_.empty()) throw InputError("utility needs a non-empty training set");
  if (test_.empty()) throw InputError("utility needs a non-empty test set");
  if (test_.count(Label::positive) == 0 || test_.count(Label::negative) == 0) {
    throw InputError("test set must contain both classes");
  }
  if (train_.dim() != test_.dim()) {
    throw InputError("train dimension " + std::to_string(train_.dim()) +
                     " does not match test dimension " +
                     std::to_string(test_.dim()));
  }
}

std::size_t UtilityEvaluator::KeyHash::operator()(
    const std::vector<int>& key) const noexcept {
  // FNV-1a over the id bytes; ids are sorted so equal coalitions hash equal.
  std::size_t h = 1469598103934665603ULL;
  for (int id : key) {
    auto v = static_cast<std::uint32_t>(id);
    for (int byte = 0; byte < 4; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

ConfusionCounts UtilityEvaluator::evaluate_members(
    std::span<const int> member_ids) const {
  detail::FlatData flat;
  flat.d = train_.dim();
  flat.x.reserve(member_ids.size() * static_cast<std::size_t>(flat.d));
  flat.y.reserve(member_ids.size());
  for (int id : member_ids) {
    const DataPoint& p = train_.by_id(id);  // throws for unknown ids
    flat.push_row(p.features, p.label);
  }
  const Model model = detail::fit_flat(flat, config_);
  fits_.fetch_add(1, std::memory_order_relaxed);
  return confusion(model, test_);
}

ConfusionCounts UtilityEvaluator::coalition_confusion(
    std::span<const int> member_ids) const {
  if (!std::is_sorted(member_ids.begin(), member_ids.end())) {
    throw InputError("coalition member ids must be sorted ascending");
  }
  std::vector<int> key(member_ids.begin(), member_ids.end());
  Shard& shard = shards_[KeyHash{}(key) % kShardCount];
  {
    std::lock_guard<std::mutex> lock(shard.mutex);
    const auto it = shard.map.find(key);
    if (it != shard.map.end()) return it->second;
  }
  const ConfusionCounts counts = evaluate_members(member_ids);
  {
    std::lock_guard<std::mutex> lock(shard.mutex);
    // try_emplace: a concurrent duplicate evaluation never changes the value
    // already observed by other readers.
    shard.map.try_emplace(std::move(key), counts);
  }
  return counts;
}

ConfusionCounts UtilityEvaluator::coalition_confusion(
    const Coalition& coalition) const {
  return coalition_confusion(std::span<const int>(coalition.ids()));
}

Score UtilityEvaluator::utility(const Coalition& coalition, MetricKind kind) const {
  return metric_score(coalition_confusion(coalition), kind);
}

std::size_t UtilityEvaluator::cache_entries() const {
  std::size_t total = 0;
  for (const Shard& shard : shards_) {
    std::lock_guard<std::mutex> lock(shard.mutex);
    total += shard.map.size();
  }
  return total;
}

}  // namespace shapval

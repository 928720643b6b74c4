#include "shapval/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "shapval/errors.hpp"

namespace shapval {

const char* to_string(Label label) {
  return label == Label::positive ? "pos" : "neg";
}

Label label_from_string(std::string_view text) {
  if (text == "pos") return Label::positive;
  if (text == "neg") return Label::negative;
  throw InputError("unknown label '" + std::string(text) +
                   "' (expected 'pos' or 'neg')");
}

Dataset Dataset::from_records(std::vector<DataPoint> records) {
  if (records.empty()) throw InputError("dataset must contain at least one point");

  std::sort(records.begin(), records.end(),
            [](const DataPoint& a, const DataPoint& b) { return a.id < b.id; });

  const auto dim = records.front().features.size();
  if (dim == 0) throw InputError("feature vectors must have at least one dimension");

  Dataset out;
  out.dim_ = static_cast<int>(dim);
  out.ids_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DataPoint& p = records[i];
    if (i > 0 && p.id == records[i - 1].id) {
      throw InputError("duplicate point id " + std::to_string(p.id));
    }
    if (p.features.size() != dim) {
      throw InputError("point id " + std::to_string(p.id) + " has " +
                       std::to_string(p.features.size()) +
                       " features, expected " + std::to_string(dim));
    }
    for (double v : p.features) {
      if (!std::isfinite(v)) {
        throw InputError("point id " + std::to_string(p.id) +
                         " has a non-finite feature value");
      }
    }
    out.ids_.push_back(p.id);
  }
  out.points_ = std::move(records);
  return out;
}

bool Dataset::contains(int id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

const DataPoint& Dataset::by_id(int id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw InputError("unknown point id " + std::to_string(id));
  }
  return points_[static_cast<std::size_t>(it - ids_.begin())];
}

int Dataset::count(Label label) const {
  int n = 0;
  for (const DataPoint& p : points_) n += (p.label == label) ? 1 : 0;
  return n;
}

Dataset Dataset::subset(const Coalition& coalition) const {
  Dataset out;
  out.dim_ = dim_;
  out.points_.reserve(coalition.ids().size());
  out.ids_.reserve(coalition.ids().size());
  for (int id : coalition.ids()) {
    out.points_.push_back(by_id(id));  // throws for unknown members
    out.ids_.push_back(id);
  }
  return out;
}

Coalition Coalition::of(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  const auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) {
    throw InputError("duplicate id " + std::to_string(*dup) + " in coalition");
  }
  Coalition out;
  out.ids_ = std::move(ids);
  return out;
}

bool Coalition::contains(int id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

Coalition Coalition::with(int id) const {
  if (contains(id)) {
    throw InputError("id " + std::to_string(id) + " already in coalition");
  }
  Coalition out;
  out.ids_.reserve(ids_.size() + 1);
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  out.ids_.insert(out.ids_.end(), ids_.begin(), it);
  out.ids_.push_back(id);
  out.ids_.insert(out.ids_.end(), it, ids_.end());
  return out;
}

Permutation Permutation::of(std::vector<int> order) {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw InputError("duplicate id " + std::to_string(*dup) + " in permutation");
  }
  Permutation out;
  out.order_ = std::move(order);
  return out;
}

int Permutation::position_of(int id) const {
  const auto it = std::find(order_.begin(), order_.end(), id);
  if (it == order_.end()) {
    throw InputError("id " + std::to_string(id) + " not in permutation");
  }
  return static_cast<int>(it - order_.begin());
}

Coalition prefix_coalition(const Permutation& perm, int id) {
  const int pos = perm.position_of(id);
  return Coalition::of(std::vector<int>(perm.order().begin(),
                                        perm.order().begin() + pos));
}

}  // namespace shapval

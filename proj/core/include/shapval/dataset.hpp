#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace shapval {

// Binary class label. By convention the positive class is the minority class
// of interest (e.g. the pathological cases in a screening problem).
enum class Label : std::uint8_t { negative = 0, positive = 1 };

const char* to_string(Label label);
Label label_from_string(std::string_view text);
constexpr Label opposite(Label label) {
  return label == Label::positive ? Label::negative : Label::positive;
}

struct DataPoint {
  int id = 0;
  std::vector<double> features;
  Label label = Label::negative;

  bool operator==(const DataPoint&) const = default;
};

class Coalition;

// Immutable collection of feature vectors with binary labels. Points are
// held sorted by id so every downstream computation sees one canonical
// order regardless of how the records arrived.
class Dataset {
 public:
  Dataset() = default;

  // Validates and canonicalizes: ids unique, feature dimensions uniform and
  // at least 1, all features finite. Throws InputError otherwise.
  static Dataset from_records(std::vector<DataPoint> records);

  const std::vector<DataPoint>& points() const { return points_; }
  const std::vector<int>& ids() const { return ids_; }

  int size() const { return static_cast<int>(points_.size()); }
  bool empty() const { return points_.empty(); }
  int dim() const { return dim_; }

  bool contains(int id) const;
  const DataPoint& by_id(int id) const;  // InputError when absent
  int count(Label label) const;

  // Materializes the sub-dataset for a coalition; every member id must
  // exist. The result keeps this dataset's dimension even when empty.
  Dataset subset(const Coalition& coalition) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<DataPoint> points_;  // ascending id
  std::vector<int> ids_;           // ascending, parallel to points_
  int dim_ = 0;
};

// Set of point ids, stored sorted ascending.
class Coalition {
 public:
  Coalition() = default;

  // Sorts; duplicate ids are rejected with InputError.
  static Coalition of(std::vector<int> ids);

  const std::vector<int>& ids() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }
  bool empty() const { return ids_.empty(); }
  bool contains(int id) const;

  // The coalition extended by one id; rejects ids already present.
  Coalition with(int id) const;

  bool operator==(const Coalition&) const = default;

 private:
  std::vector<int> ids_;
};

// Total order over a set of point ids.
class Permutation {
 public:
  Permutation() = default;

  // Rejects duplicate ids.
  static Permutation of(std::vector<int> order);

  const std::vector<int>& order() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }

  // Zero-based position of an id; InputError when absent.
  int position_of(int id) const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> order_;
};

// Ids strictly preceding `id` in the permutation, as a coalition.
Coalition prefix_coalition(const Permutation& perm, int id);

}  // namespace shapval

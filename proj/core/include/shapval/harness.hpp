#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "shapval/dataset.hpp"
#include "shapval/shapley.hpp"

namespace shapval {

// Two-Gaussian synthetic problem: isotropic unit-variance clouds, the
// negative class centered at the origin and the positive class at
// class_separation along the first axis. The test split draws twice the
// per-class training counts from the same distributions.
struct SynthConfig {
  int n_positive = 100;
  int n_negative = 400;
  int dim = 16;
  double class_separation = 4.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SynthConfig&) const = default;
};

struct SynthData {
  Dataset train;
  Dataset test;
};

// Deterministic in (config): the train and test splits come from separate
// seed-derived streams, points are generated in id order. Train ids are
// 0..n-1 with positives first; test ids continue after the train range.
SynthData synth_gaussian(const SynthConfig& config);

// Which way a training label was flipped relative to the ground truth.
enum class FlipDirection : std::uint8_t {
  pos_to_neg,  // ground-truth positive recorded as negative
  neg_to_pos,  // ground-truth negative recorded as positive
};
const char* to_string(FlipDirection direction);

using FlipRecord = std::map<int, FlipDirection>;

struct NoiseSpec {
  double level_positive = 0.0;  // fraction of positive points to flip, [0, 1)
  double level_negative = 0.0;  // fraction of negative points to flip, [0, 1)
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const NoiseSpec&) const = default;
};

struct NoisyData {
  Dataset data;
  FlipRecord flips;
};

// Flips exactly floor(level * class_count) labels per class, chosen uniformly
// without replacement. Features and ids are untouched; only labels change.
NoisyData inject_noise(const Dataset& clean, const NoiseSpec& spec);

// Labels of `ids` toggled; everything else copied verbatim.
Dataset flip_labels(const Dataset& data, const std::vector<int>& ids);

// Reconstructs the flip record from a noisy/clean pair sharing the same ids.
FlipRecord derive_flips(const Dataset& noisy, const Dataset& clean);

// Point ids ordered by ascending value; ties broken by ascending id, so the
// ranking is a deterministic function of the value vector.
struct Ranking {
  std::vector<int> ids_ascending_value;
};
Ranking rank_by_value(const ShapleyVector& sv);

// How much of the injected noise sits in the low-value tail of a ranking.
struct DetectionReport {
  double bottom_fraction = 0.0;
  int bottom_size = 0;
  int flips_pos_truth_total = 0;     // pos_to_neg flips present overall
  int flips_neg_truth_total = 0;
  double captured_pos_truth = 0.0;   // fraction of pos_to_neg flips in the tail
  double captured_neg_truth = 0.0;
  double captured_total = 0.0;
  bool pos_truth_vacuous = false;    // no flips of that direction existed
  bool neg_truth_vacuous = false;
};

// bottom_fraction must lie in (0, 1]; the tail holds floor(fraction * N)
// ids. Directions without any flips report capture 1.0 and the vacuous flag.
DetectionReport detection_report(const Ranking& ranking, const FlipRecord& flips,
                                 double bottom_fraction);

// One row per ranked point: value-order position, the label the model saw,
// and the ground truth underneath it.
struct ClassMappingRow {
  int rank = 0;  // 1-based, least valuable first
  int id = 0;
  double value = 0.0;
  Label input_label = Label::negative;
  Label truth_label = Label::negative;
};

std::vector<ClassMappingRow> class_mapping_table(const Ranking& ranking,
                                                 const ShapleyVector& sv,
                                                 const Dataset& noisy,
                                                 const Dataset& clean);

}  // namespace shapval

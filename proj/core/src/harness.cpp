#include "shapval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "shapval/errors.hpp"
#include "shapval/rng.hpp"

namespace shapval {

namespace {

// floor(fraction * count) as pure integer intent: a tiny epsilon absorbs
// decimal-fraction representation error (0.3 * 100 evaluates to
// 29.999999999999996 in binary floating point, but the intended count is 30).
long floor_fraction(double fraction, long count) {
  return static_cast<long>(
      std::floor(fraction * static_cast<double>(count) + 1e-9));
}

std::vector<DataPoint> make_cloud(int n_positive, int n_negative, int dim,
                                  double separation, int first_id,
                                  rng::Stream& stream) {
  std::vector<DataPoint> points;
  points.reserve(static_cast<std::size_t>(n_positive + n_negative));
  int id = first_id;
  for (int i = 0; i < n_positive + n_negative; ++i, ++id) {
    DataPoint p;
    p.id = id;
    p.label = i < n_positive ? Label::positive : Label::negative;
    p.features.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      p.features[static_cast<std::size_t>(k)] = stream.next_gaussian();
    }
    if (p.label == Label::positive) p.features[0] += separation;
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_positive < 1) throw InputError("n_positive must be at least 1");
  if (n_negative < 1) throw InputError("n_negative must be at least 1");
  if (dim < 1) throw InputError("dim must be at least 1");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation)) {
    throw InputError("class_separation must be a non-negative finite number");
  }
}

SynthData synth_gaussian(const SynthConfig& config) {
  config.validate();
  rng::Stream train_stream(rng::mix(config.seed, rng::kSynthTrainStream));
  rng::Stream test_stream(rng::mix(config.seed, rng::kSynthTestStream));

  const int train_total = config.n_positive + config.n_negative;
  SynthData out;
  out.train = Dataset::from_records(
      make_cloud(config.n_positive, config.n_negative, config.dim,
                 config.class_separation, 0, train_stream));
  out.test = Dataset::from_records(
      make_cloud(2 * config.n_positive, 2 * config.n_negative, config.dim,
                 config.class_separation, train_total, test_stream));
  return out;
}

const char* to_string(FlipDirection direction) {
  return direction == FlipDirection::pos_to_neg ? "pos_to_neg" : "neg_to_pos";
}

void NoiseSpec::validate() const {
  const auto ok = [](double level) {
    return std::isfinite(level) && level >= 0.0 && level < 1.0;
  };
  if (!ok(level_positive) || !ok(level_negative)) {
    throw InputError("noise levels must lie in [0, 1)");
  }
}

NoisyData inject_noise(const Dataset& clean, const NoiseSpec& spec) {
  spec.validate();

  std::vector<int> pos_ids;
  std::vector<int> neg_ids;
  for (const DataPoint& p : clean.points()) {
    (p.label == Label::positive ? pos_ids : neg_ids).push_back(p.id);
  }
  const long k_pos =
      floor_fraction(spec.level_positive, static_cast<long>(pos_ids.size()));
  const long k_neg =
      floor_fraction(spec.level_negative, static_cast<long>(neg_ids.size()));

  // One stream, positives drawn first: the picks for a given (dataset, spec)
  // are reproducible byte for byte.
  rng::Stream stream(rng::mix(spec.seed, rng::kNoiseStream));
  rng::shuffle(pos_ids, stream);
  rng::shuffle(neg_ids, stream);

  NoisyData out;
  for (long i = 0; i < k_pos; ++i) {
    out.flips.emplace(pos_ids[static_cast<std::size_t>(i)],
                      FlipDirection::pos_to_neg);
  }
  for (long i = 0; i < k_neg; ++i) {
    out.flips.emplace(neg_ids[static_cast<std::size_t>(i)],
                      FlipDirection::neg_to_pos);
  }

  std::vector<DataPoint> points = clean.points();
  for (DataPoint& p : points) {
    if (out.flips.count(p.id) != 0) p.label = opposite(p.label);
  }
  out.data = Dataset::from_records(std::move(points));
  return out;
}

Dataset flip_labels(const Dataset& data, const std::vector<int>& ids) {
  std::unordered_set<int> target(ids.begin(), ids.end());
  if (target.size() != ids.size()) throw InputError("duplicate id in flip list");
  std::vector<DataPoint> points = data.points();
  std::size_t hit = 0;
  for (DataPoint& p : points) {
    if (target.count(p.id) != 0) {
      p.label = opposite(p.label);
      ++hit;
    }
  }
  if (hit != target.size()) {
    throw InputError("flip list contains ids absent from the dataset");
  }
  return Dataset::from_records(std::move(points));
}

FlipRecord derive_flips(const Dataset& noisy, const Dataset& clean) {
  if (noisy.ids() != clean.ids()) {
    throw InputError("noisy and clean datasets must share the same ids");
  }
  FlipRecord flips;
  for (const DataPoint& truth : clean.points()) {
    const DataPoint& seen = noisy.by_id(truth.id);
    if (seen.label == truth.label) continue;
    flips.emplace(truth.id, truth.label == Label::positive
                                ? FlipDirection::pos_to_neg
                                : FlipDirection::neg_to_pos);
  }
  return flips;
}

Ranking rank_by_value(const ShapleyVector& sv) {
  std::vector<std::pair<int, double>> entries = sv.values;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  Ranking out;
  out.ids_ascending_value.reserve(entries.size());
  for (const auto& [id, value] : entries) out.ids_ascending_value.push_back(id);
  return out;
}

DetectionReport detection_report(const Ranking& ranking, const FlipRecord& flips,
                                 double bottom_fraction) {
  if (!(bottom_fraction > 0.0) || bottom_fraction > 1.0 ||
      !std::isfinite(bottom_fraction)) {
    throw InputError("bottom_fraction must lie in (0, 1]");
  }
  const long n = static_cast<long>(ranking.ids_ascending_value.size());
  if (n == 0) throw InputError("ranking is empty");

  DetectionReport report;
  report.bottom_fraction = bottom_fraction;
  report.bottom_size = static_cast<int>(floor_fraction(bottom_fraction, n));

  std::unordered_set<int> bottom(
      ranking.ids_ascending_value.begin(),
      ranking.ids_ascending_value.begin() + report.bottom_size);

  int caught_pos = 0;
  int caught_neg = 0;
  for (const auto& [id, direction] : flips) {
    const bool in_bottom = bottom.count(id) != 0;
    if (direction == FlipDirection::pos_to_neg) {
      ++report.flips_pos_truth_total;
      caught_pos += in_bottom ? 1 : 0;
    } else {
      ++report.flips_neg_truth_total;
      caught_neg += in_bottom ? 1 : 0;
    }
  }

  report.pos_truth_vacuous = report.flips_pos_truth_total == 0;
  report.neg_truth_vacuous = report.flips_neg_truth_total == 0;
  report.captured_pos_truth =
      report.pos_truth_vacuous
          ? 1.0
          : static_cast<double>(caught_pos) / report.flips_pos_truth_total;
  report.captured_neg_truth =
      report.neg_truth_vacuous
          ? 1.0
          : static_cast<double>(caught_neg) / report.flips_neg_truth_total;
  const int total = report.flips_pos_truth_total + report.flips_neg_truth_total;
  report.captured_total =
      total == 0 ? 1.0 : static_cast<double>(caught_pos + caught_neg) / total;
  return report;
}

std::vector<ClassMappingRow> class_mapping_table(const Ranking& ranking,
                                                 const ShapleyVector& sv,
                                                 const Dataset& noisy,
                                                 const Dataset& clean) {
  if (noisy.ids() != clean.ids()) {
    throw InputError("noisy and clean datasets must share the same ids");
  }
  if (ranking.ids_ascending_value.size() != sv.values.size()) {
    throw InputError("ranking does not cover the value vector");
  }
  std::vector<ClassMappingRow> rows;
  rows.reserve(ranking.ids_ascending_value.size());
  int rank = 1;
  for (const int id : ranking.ids_ascending_value) {
    ClassMappingRow row;
    row.rank = rank++;
    row.id = id;
    row.value = sv.value_of(id);
    row.input_label = noisy.by_id(id).label;
    row.truth_label = clean.by_id(id).label;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shapval

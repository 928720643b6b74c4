#include <doctest.h>

#include <cmath>
#include <set>

#include "shapval/errors.hpp"
#include "shapval/harness.hpp"
#include "shapval/metrics.hpp"
#include "shapval/model.hpp"
#include "test_support.hpp"

using namespace shapval;
using testsup::one_d;

namespace {

double mean_feature(const Dataset& data, std::size_t column, Label label) {
  double sum = 0.0;
  int n = 0;
  for (const DataPoint& p : data.points()) {
    if (p.label != label) continue;
    sum += p.features[column];
    ++n;
  }
  return sum / n;
}

}  // namespace

TEST_CASE("synthetic generator shapes and identity layout") {
  SynthConfig config;
  config.n_positive = 30;
  config.n_negative = 70;
  config.dim = 5;
  config.seed = 2024;
  const SynthData data = synth_gaussian(config);

  CHECK(data.train.size() == 100);
  CHECK(data.test.size() == 200);
  CHECK(data.train.dim() == 5);
  CHECK(data.test.dim() == 5);
  CHECK(data.train.count(Label::positive) == 30);
  CHECK(data.train.count(Label::negative) == 70);
  CHECK(data.test.count(Label::positive) == 60);
  CHECK(data.test.count(Label::negative) == 140);

  // Train ids are 0..99 with positives first; test ids continue from 100.
  for (int i = 0; i < 100; ++i) {
    CHECK(data.train.points()[static_cast<std::size_t>(i)].id == i);
    const Label expect = i < 30 ? Label::positive : Label::negative;
    CHECK(data.train.points()[static_cast<std::size_t>(i)].label == expect);
  }
  CHECK(data.test.points().front().id == 100);
  CHECK(data.test.points().back().id == 299);
}

TEST_CASE("synthetic generator is deterministic and seed-sensitive") {
  SynthConfig config;
  config.seed = 7;
  const SynthData a = synth_gaussian(config);
  const SynthData b = synth_gaussian(config);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  config.seed = 8;
  const SynthData c = synth_gaussian(config);
  CHECK(!(a.train == c.train));
  // Train and test come from independent streams: identical sizes but
  // different draws.
  CHECK(a.train.points()[0].features != a.test.points()[0].features);
}

TEST_CASE("synthetic class clouds sit where configured") {
  SynthConfig config;
  config.n_positive = 400;
  config.n_negative = 400;
  config.dim = 3;
  config.class_separation = 4.0;
  config.seed = 99;
  const SynthData data = synth_gaussian(config);

  // Unit-variance Gaussians with 400 samples: the mean is within ~5 sigma of
  // its target (0.25) with huge margin.
  CHECK(std::abs(mean_feature(data.train, 0, Label::positive) - 4.0) < 0.5);
  CHECK(std::abs(mean_feature(data.train, 0, Label::negative)) < 0.5);
  CHECK(std::abs(mean_feature(data.train, 1, Label::positive)) < 0.5);
  CHECK(std::abs(mean_feature(data.train, 2, Label::negative)) < 0.5);
}

TEST_CASE("well-separated classes are nearly perfectly learnable") {
  SynthConfig config;
  config.n_positive = 50;
  config.n_negative = 150;
  config.dim = 8;
  config.class_separation = 6.0;
  config.seed = 31;
  const SynthData data = synth_gaussian(config);
  const Model model = fit(data.train);
  const Score acc = metric_score(confusion(model, data.test), MetricKind::accuracy);
  CHECK(acc.value() >= 0.98);
}

TEST_CASE("zero separation leaves nothing to learn") {
  // With identical clouds the best any classifier can do is the base rate.
  // Class weighting is pinned to 1 so the majority class wins ties.
  TrainConfig train_config;
  train_config.class_weight_positive = 1.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    SynthConfig config;
    config.n_positive = 40;
    config.n_negative = 160;
    config.dim = 4;
    config.class_separation = 0.0;
    config.seed = seed;
    const SynthData data = synth_gaussian(config);
    const Model model = fit(data.train, train_config);
    const Score acc =
        metric_score(confusion(model, data.test), MetricKind::accuracy);
    CHECK(acc.value() >= 0.70);
    CHECK(acc.value() <= 0.90);
  }
}

TEST_CASE("synthetic configuration validation") {
  SynthConfig config;
  config.n_positive = 0;
  CHECK_THROWS_AS(config.validate(), InputError);
  config = SynthConfig{};
  config.dim = 0;
  CHECK_THROWS_AS(config.validate(), InputError);
  config = SynthConfig{};
  config.class_separation = -1.0;
  CHECK_THROWS_AS(config.validate(), InputError);
  config = SynthConfig{};
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("noise injection flips exact per-class counts") {
  SynthConfig config;
  config.n_positive = 100;
  config.n_negative = 400;
  config.seed = 5;
  const Dataset clean = synth_gaussian(config).train;

  NoiseSpec spec;
  spec.level_positive = 0.1;
  spec.level_negative = 0.1;
  spec.seed = 17;
  const NoisyData noisy = inject_noise(clean, spec);

  int pos_to_neg = 0;
  int neg_to_pos = 0;
  for (const auto& [id, direction] : noisy.flips) {
    if (direction == FlipDirection::pos_to_neg) {
      ++pos_to_neg;
      CHECK(clean.by_id(id).label == Label::positive);
      CHECK(noisy.data.by_id(id).label == Label::negative);
    } else {
      ++neg_to_pos;
      CHECK(clean.by_id(id).label == Label::negative);
      CHECK(noisy.data.by_id(id).label == Label::positive);
    }
  }
  CHECK(pos_to_neg == 10);
  CHECK(neg_to_pos == 40);

  // Counts follow: totals preserved, ids and features untouched.
  CHECK(noisy.data.count(Label::positive) == 100 - 10 + 40);
  CHECK(noisy.data.ids() == clean.ids());
  for (const DataPoint& p : clean.points()) {
    CHECK(noisy.data.by_id(p.id).features == p.features);
    if (!noisy.flips.count(p.id)) CHECK(noisy.data.by_id(p.id).label == p.label);
  }
}

TEST_CASE("noise fraction floors avoid binary representation surprises") {
  // 0.3 * 100 evaluates below 30 in binary floating point; the flip count
  // must still be 30.
  SynthConfig config;
  config.n_positive = 100;
  config.n_negative = 400;
  config.seed = 6;
  const Dataset clean = synth_gaussian(config).train;

  NoiseSpec spec;
  spec.level_positive = 0.3;
  spec.level_negative = 0.3;
  spec.seed = 3;
  const NoisyData noisy = inject_noise(clean, spec);
  int pos_to_neg = 0;
  for (const auto& [id, direction] : noisy.flips) {
    if (direction == FlipDirection::pos_to_neg) ++pos_to_neg;
  }
  CHECK(pos_to_neg == 30);
  CHECK(static_cast<int>(noisy.flips.size()) == 30 + 120);
}

TEST_CASE("noise level zero and asymmetric levels") {
  const Dataset clean = one_d({{1.0, Label::positive},
                               {2.0, Label::positive},
                               {-1.0, Label::negative},
                               {-2.0, Label::negative},
                               {-3.0, Label::negative}});
  NoiseSpec spec;
  spec.seed = 1;
  const NoisyData untouched = inject_noise(clean, spec);
  CHECK(untouched.flips.empty());
  CHECK(untouched.data == clean);

  spec.level_positive = 0.5;
  spec.level_negative = 0.0;
  const NoisyData one_sided = inject_noise(clean, spec);
  CHECK(one_sided.flips.size() == 1);
  CHECK(one_sided.flips.begin()->second == FlipDirection::pos_to_neg);

  spec.level_positive = 0.999;  // floor(0.999 * 2) = 1
  const NoisyData capped = inject_noise(clean, spec);
  CHECK(capped.flips.size() == 1);

  NoiseSpec bad;
  bad.level_positive = 1.0;  // flipping every point is a degenerate request
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = NoiseSpec{};
  bad.level_negative = -0.1;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("noise injection is deterministic in the seed") {
  SynthConfig config;
  config.seed = 12;
  const Dataset clean = synth_gaussian(config).train;
  NoiseSpec spec;
  spec.level_positive = 0.2;
  spec.level_negative = 0.2;
  spec.seed = 8;
  const NoisyData a = inject_noise(clean, spec);
  const NoisyData b = inject_noise(clean, spec);
  CHECK(a.flips == b.flips);
  CHECK(a.data == b.data);
  spec.seed = 9;
  const NoisyData c = inject_noise(clean, spec);
  CHECK(a.flips != c.flips);
}

TEST_CASE("flip_labels applies an id list and derive_flips recovers it") {
  SynthConfig config;
  config.n_positive = 10;
  config.n_negative = 30;
  config.seed = 4;
  const Dataset clean = synth_gaussian(config).train;
  NoiseSpec spec;
  spec.level_positive = 0.2;
  spec.level_negative = 0.1;
  spec.seed = 2;
  const NoisyData noisy = inject_noise(clean, spec);

  std::vector<int> flipped_ids;
  for (const auto& [id, direction] : noisy.flips) flipped_ids.push_back(id);

  CHECK(flip_labels(clean, flipped_ids) == noisy.data);
  CHECK(derive_flips(noisy.data, clean) == noisy.flips);
  // Flipping twice restores the original.
  CHECK(flip_labels(noisy.data, flipped_ids) == clean);

  CHECK_THROWS_AS(flip_labels(clean, {99999}), InputError);
  CHECK_THROWS_AS(flip_labels(clean, {0, 0}), InputError);

  const Dataset other = synth_gaussian([] {
                          SynthConfig c;
                          c.n_positive = 3;
                          c.n_negative = 3;
                          c.seed = 1;
                          return c;
                        }()).train;
  CHECK_THROWS_AS(derive_flips(clean, other), InputError);
}

TEST_CASE("ranking sorts by value with id tie-break") {
  ShapleyVector sv;
  sv.values = {{1, 0.3}, {2, -0.1}, {3, 0.3}, {4, 0.0}};
  const Ranking ranking = rank_by_value(sv);
  CHECK(ranking.ids_ascending_value == std::vector<int>{2, 4, 1, 3});
}

TEST_CASE("detection report counts flipped points in the bottom slice") {
  // Ten points, four flipped; craft values so the bottom 30% = {11, 12, 13}.
  ShapleyVector sv;
  for (int i = 0; i < 10; ++i) {
    sv.values.push_back({10 + i, static_cast<double>(i)});
  }
  FlipRecord flips;
  flips[11] = FlipDirection::pos_to_neg;
  flips[12] = FlipDirection::neg_to_pos;
  flips[15] = FlipDirection::neg_to_pos;
  flips[19] = FlipDirection::pos_to_neg;

  const DetectionReport report = detection_report(rank_by_value(sv), flips, 0.3);
  CHECK(report.bottom_size == 3);
  CHECK(report.flips_pos_truth_total == 2);  // points whose true label was pos
  CHECK(report.flips_neg_truth_total == 2);
  CHECK(report.captured_pos_truth == doctest::Approx(0.5));  // id 11 of {11,19}
  CHECK(report.captured_neg_truth == doctest::Approx(0.5));  // id 12 of {12,15}
  CHECK(report.captured_total == doctest::Approx(0.5));
  CHECK(!report.pos_truth_vacuous);
  CHECK(!report.neg_truth_vacuous);
}

TEST_CASE("detection report marks vacuous directions") {
  ShapleyVector sv;
  for (int i = 0; i < 5; ++i) sv.values.push_back({i, static_cast<double>(i)});
  FlipRecord flips;
  flips[0] = FlipDirection::neg_to_pos;

  const DetectionReport report = detection_report(rank_by_value(sv), flips, 0.4);
  CHECK(report.flips_pos_truth_total == 0);
  CHECK(report.pos_truth_vacuous);
  CHECK(report.captured_pos_truth == 1.0);  // conventional value, flagged
  CHECK(!report.neg_truth_vacuous);
  CHECK(report.captured_neg_truth == 1.0);  // id 0 is in the bottom two
  CHECK(report.captured_total == 1.0);

  const DetectionReport empty_flips =
      detection_report(rank_by_value(sv), FlipRecord{}, 0.4);
  CHECK(empty_flips.pos_truth_vacuous);
  CHECK(empty_flips.neg_truth_vacuous);
}

TEST_CASE("detection slice size floors and domain checks") {
  ShapleyVector ten;
  for (int i = 0; i < 10; ++i) ten.values.push_back({i, static_cast<double>(i)});
  ShapleyVector seven;
  for (int i = 0; i < 7; ++i) seven.values.push_back({i, static_cast<double>(i)});
  FlipRecord flips;
  flips[0] = FlipDirection::pos_to_neg;

  CHECK(detection_report(rank_by_value(ten), flips, 0.3).bottom_size == 3);
  CHECK(detection_report(rank_by_value(seven), flips, 0.3).bottom_size == 2);
  CHECK(detection_report(rank_by_value(ten), flips, 1.0).bottom_size == 10);

  CHECK_THROWS_AS(detection_report(rank_by_value(ten), flips, 0.0), InputError);
  CHECK_THROWS_AS(detection_report(rank_by_value(ten), flips, 1.5), InputError);
  CHECK_THROWS_AS(detection_report(Ranking{}, flips, 0.5), InputError);
}

TEST_CASE("capture fractions grow with the slice") {
  ShapleyVector sv;
  for (int i = 0; i < 20; ++i) sv.values.push_back({i, std::sin(i * 1.7)});
  FlipRecord flips;
  for (int i = 0; i < 20; i += 3) {
    flips[i] = i % 2 ? FlipDirection::pos_to_neg : FlipDirection::neg_to_pos;
  }
  const Ranking ranking = rank_by_value(sv);
  double prev = -1.0;
  for (double fraction : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const DetectionReport report = detection_report(ranking, flips, fraction);
    CHECK(report.captured_total >= prev);
    prev = report.captured_total;
  }
  CHECK(prev == 1.0);  // the full slice captures everything
}

TEST_CASE("class mapping table pairs ranks with both label views") {
  const Dataset clean = one_d({{1.0, Label::positive},
                               {2.0, Label::positive},
                               {-1.0, Label::negative},
                               {-2.0, Label::negative}});
  const Dataset noisy = flip_labels(clean, {0});

  ShapleyVector sv;
  sv.values = {{0, -0.5}, {1, 0.2}, {2, 0.1}, {3, 0.4}};
  const std::vector<ClassMappingRow> table =
      class_mapping_table(rank_by_value(sv), sv, noisy, clean);
  REQUIRE(table.size() == 4);
  CHECK(table[0].rank == 1);
  CHECK(table[0].id == 0);
  CHECK(table[0].value == -0.5);
  CHECK(table[0].input_label == Label::negative);  // what the model saw
  CHECK(table[0].truth_label == Label::positive);  // what it really was
  CHECK(table[1].id == 2);
  CHECK(table[2].id == 1);
  CHECK(table[3].id == 3);
  CHECK(table[3].rank == 4);
  CHECK(table[3].input_label == table[3].truth_label);

  // A value vector covering fewer points yields a partial table; unknown ids
  // and mismatched dataset pairs are rejected.
  ShapleyVector short_sv;
  short_sv.values = {{0, 0.0}};
  CHECK(class_mapping_table(rank_by_value(short_sv), short_sv, noisy, clean)
            .size() == 1);

  ShapleyVector alien_sv;
  alien_sv.values = {{999, 0.0}};
  CHECK_THROWS_AS(
      class_mapping_table(rank_by_value(alien_sv), alien_sv, noisy, clean),
      InputError);

  Ranking mismatched;
  mismatched.ids_ascending_value = {0};
  CHECK_THROWS_AS(class_mapping_table(mismatched, sv, noisy, clean), InputError);

  const Dataset other = one_d({{1.0, Label::positive}, {-1.0, Label::negative}});
  CHECK_THROWS_AS(class_mapping_table(rank_by_value(sv), sv, noisy, other),
                  InputError);
}

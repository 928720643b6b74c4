#include <doctest.h>

#include <fstream>
#include <string>

#include "shapval/errors.hpp"
#include "shapval/harness.hpp"
#include "shapval/io.hpp"
#include "shapval/rng.hpp"
#include "test_support.hpp"

using namespace shapval;
using namespace shapval::io;
using testsup::one_d;
using testsup::slurp;
using testsup::TempDir;

namespace {

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dataset csv round-trips bit for bit") {
  SynthConfig config;
  config.n_positive = 8;
  config.n_negative = 12;
  config.dim = 3;
  config.seed = 21;
  const Dataset original = synth_gaussian(config).train;

  TempDir dir("shapval-io");
  const auto path = dir / "train.csv";
  write_dataset_csv(path, original);
  const Dataset reread = read_dataset_csv(path);
  CHECK(reread == original);

  // Serialization itself is stable.
  const std::string first = slurp(path);
  write_dataset_csv(path, reread);
  CHECK(slurp(path) == first);
}

TEST_CASE("dataset csv layout is the documented one") {
  const Dataset data = one_d({{0.5, Label::positive}, {-0.25, Label::negative}});
  TempDir dir("shapval-io");
  const auto path = dir / "tiny.csv";
  write_dataset_csv(path, data);
  CHECK(slurp(path) == "id,label,f0\n0,pos,0.5\n1,neg,-0.25\n");
}

TEST_CASE("dataset csv parser handles hand-written input") {
  TempDir dir("shapval-io");
  const auto path = dir / "hand.csv";
  spit(path,
       "id,label,f0,f1\n"
       "3,pos,1.5,-2e-3\n"
       "1,neg,0.0,4.25\n");
  const Dataset data = read_dataset_csv(path);
  CHECK(data.size() == 2);
  CHECK(data.ids() == std::vector<int>{1, 3});  // canonical ascending order
  CHECK(data.by_id(3).features == std::vector<double>{1.5, -0.002});
  CHECK(data.by_id(1).label == Label::negative);
}

TEST_CASE("dataset csv parser tolerates CRLF and a trailing newline") {
  TempDir dir("shapval-io");
  const auto path = dir / "crlf.csv";
  spit(path, "id,label,f0\r\n0,pos,1.0\r\n1,neg,-1.0\r\n");
  const Dataset data = read_dataset_csv(path);
  CHECK(data.size() == 2);
  CHECK(data.by_id(0).features == std::vector<double>{1.0});
}

TEST_CASE("dataset csv diagnostics name the row and column") {
  TempDir dir("shapval-io");

  const auto bad_header = dir / "header.csv";
  spit(bad_header, "id,label,x0\n0,pos,1.0\n");
  std::string msg = message_of([&] { read_dataset_csv(bad_header); });
  CHECK(msg.find("header") != std::string::npos);

  const auto bad_label = dir / "label.csv";
  spit(bad_label, "id,label,f0\n0,pos,1.0\n1,maybe,2.0\n");
  msg = message_of([&] { read_dataset_csv(bad_label); });
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("maybe") != std::string::npos);

  const auto bad_number = dir / "number.csv";
  spit(bad_number, "id,label,f0,f1\n0,pos,1.0,oops\n");
  msg = message_of([&] { read_dataset_csv(bad_number); });
  CHECK(msg.find("row 2") != std::string::npos);
  CHECK(msg.find("column 4") != std::string::npos);

  const auto ragged = dir / "ragged.csv";
  spit(ragged, "id,label,f0,f1\n0,pos,1.0\n");
  CHECK_THROWS_AS(read_dataset_csv(ragged), InputError);

  const auto dup = dir / "dup.csv";
  spit(dup, "id,label,f0\n0,pos,1.0\n0,neg,2.0\n");
  msg = message_of([&] { read_dataset_csv(dup); });
  CHECK(msg.find("dup.csv") != std::string::npos);

  const auto empty = dir / "empty.csv";
  spit(empty, "id,label,f0\n");
  CHECK_THROWS_AS(read_dataset_csv(empty), InputError);

  CHECK_THROWS_AS(read_dataset_csv(dir / "absent.csv"), IoError);
}

TEST_CASE("value csv round-trips and validates its header") {
  const Dataset train = one_d({{1.0, Label::positive},
                               {2.0, Label::positive},
                               {-1.0, Label::negative}});
  ShapleyVector sv;
  sv.values = {{0, 0.125}, {1, -0.0625}, {2, 1.0 / 3.0}};

  TempDir dir("shapval-io");
  const auto path = dir / "sv.csv";
  write_values_csv(path, sv, train);

  const std::string text = slurp(path);
  CHECK(text.find("id,sv,input_label\n") == 0);
  CHECK(text.find("0,0.125,pos\n") != std::string::npos);

  const std::vector<std::pair<int, double>> reread = read_values_csv(path);
  REQUIRE(reread.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(reread[i].first == sv.values[i].first);
    CHECK(reread[i].second == sv.values[i].second);  // exact round-trip
  }

  const auto bad = dir / "bad.csv";
  spit(bad, "id,value\n0,0.5\n");
  CHECK_THROWS_AS(read_values_csv(bad), InputError);
  CHECK_THROWS_AS(read_values_csv(dir / "absent.csv"), IoError);
}

TEST_CASE("trace csv lists checkpoints column per tracked id") {
  ShapleyRun run;
  run.estimates.values = {{4, 0.1}, {7, 0.2}, {9, 0.3}};
  TraceCheckpoint a;
  a.permutation_count = 5;
  a.estimates = {0.5, 0.25, 0.125};
  TraceCheckpoint b;
  b.permutation_count = 10;
  b.estimates = {0.375, 0.1875, 0.09375};
  run.trace = {a, b};

  TempDir dir("shapval-io");
  const auto path = dir / "trace.csv";
  write_trace_csv(path, run, {4, 9});
  CHECK(slurp(path) ==
        "permutation_count,sv_4,sv_9\n"
        "5,0.5,0.125\n"
        "10,0.375,0.09375\n");

  CHECK_THROWS_AS(write_trace_csv(path, run, {4, 5}), InputError);
}

TEST_CASE("flip csv is ordered by id with readable directions") {
  FlipRecord flips;
  flips[12] = FlipDirection::neg_to_pos;
  flips[3] = FlipDirection::pos_to_neg;

  TempDir dir("shapval-io");
  const auto path = dir / "flips.csv";
  write_flips_csv(path, flips);
  CHECK(slurp(path) ==
        "id,direction\n"
        "3,pos_to_neg\n"
        "12,neg_to_pos\n");
}

TEST_CASE("detection csv carries fractions and vacuity flags") {
  DetectionReport report;
  report.bottom_fraction = 0.3;
  report.bottom_size = 3;
  report.flips_pos_truth_total = 2;
  report.flips_neg_truth_total = 0;
  report.captured_pos_truth = 0.5;
  report.captured_neg_truth = 1.0;
  report.captured_total = 0.5;
  report.pos_truth_vacuous = false;
  report.neg_truth_vacuous = true;

  TempDir dir("shapval-io");
  const auto path = dir / "detection.csv";
  const std::vector<DetectionReport> reports = {report};
  write_detection_csv(path, reports);
  CHECK(slurp(path) ==
        "bottom_fraction,bottom_size,captured_pos_truth,captured_neg_truth,"
        "captured_total,pos_truth_vacuous,neg_truth_vacuous\n"
        "0.29999999999999999,3,0.5,1,0.5,0,1\n");
}

TEST_CASE("class mapping csv prints one row per rank") {
  ClassMappingRow row;
  row.rank = 1;
  row.id = 6;
  row.value = -0.5;
  row.input_label = Label::negative;
  row.truth_label = Label::positive;

  TempDir dir("shapval-io");
  const auto path = dir / "mapping.csv";
  const std::vector<ClassMappingRow> rows = {row};
  write_class_mapping_csv(path, rows);
  CHECK(slurp(path) ==
        "rank,id,sv,input_label,truth_label\n"
        "1,6,-0.5,neg,pos\n");
}

TEST_CASE("doubles print with full round-trip precision") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "-0");

  // parse(format(x)) == x bitwise over a spread of magnitudes.
  rng::Stream stream(424242);
  for (int i = 0; i < 200; ++i) {
    const double x = stream.next_gaussian() * std::pow(10.0, (i % 13) - 6);
    const std::string text = format_double(x);
    const double back = std::stod(text);
    CHECK(back == x);
  }
}

TEST_CASE("writes into an unwritable location raise IoError") {
  const Dataset data = one_d({{1.0, Label::positive}, {-1.0, Label::negative}});
  CHECK_THROWS_AS(write_dataset_csv("/nonexistent-dir/x.csv", data), IoError);
}

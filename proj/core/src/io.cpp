#include "shapval/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shapval/errors.hpp"

namespace shapval::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void bad_cell(const std::filesystem::path& path, std::size_t row,
                           std::size_t column, const std::string& what) {
  throw InputError(path.string() + ": row " + std::to_string(row) + ", column " +
                   std::to_string(column) + ": " + what);
}

int parse_int(const std::string& text, const std::filesystem::path& path,
              std::size_t row, std::size_t column) {
  int value = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    bad_cell(path, row, column, "expected an integer, got '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t row, std::size_t column) {
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    bad_cell(path, row, column, "expected a number, got '" + text + "'");
  }
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

// Strips one trailing carriage return so CRLF files parse like LF files.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(path.string() + ": missing header line");
  }
  chomp(line);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    throw InputError(path.string() +
                     ": header must start with 'id,label,f0,...'");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[k + 2] != "f" + std::to_string(k)) {
      bad_cell(path, 1, k + 3,
               "expected feature column 'f" + std::to_string(k) + "', got '" +
                   header[k + 2] + "'");
    }
  }

  std::vector<DataPoint> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    chomp(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError(path.string() + ": row " + std::to_string(row) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    DataPoint p;
    p.id = parse_int(fields[0], path, row, 1);
    try {
      p.label = label_from_string(fields[1]);
    } catch (const InputError& e) {
      bad_cell(path, row, 2, e.what());
    }
    p.features.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      p.features.push_back(parse_double(fields[k + 2], path, row, k + 3));
    }
    records.push_back(std::move(p));
  }
  if (records.empty()) {
    throw InputError(path.string() + ": no data rows");
  }
  try {
    return Dataset::from_records(std::move(records));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out = open_for_write(path);
  out << "id,label";
  for (int k = 0; k < data.dim(); ++k) out << ",f" << k;
  out << '\n';
  for (const DataPoint& p : data.points()) {
    out << p.id << ',' << to_string(p.label);
    for (const double v : p.features) out << ',' << format_double(v);
    out << '\n';
  }
  finish_write(out, path);
}

void write_values_csv(const std::filesystem::path& path, const ShapleyVector& sv,
                      const Dataset& train) {
  std::ofstream out = open_for_write(path);
  out << "id,sv,input_label\n";
  for (const auto& [id, value] : sv.values) {
    out << id << ',' << format_double(value) << ','
        << to_string(train.by_id(id).label) << '\n';
  }
  finish_write(out, path);
}

std::vector<std::pair<int, double>> read_values_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(path.string() + ": missing header line");
  }
  chomp(line);
  if (line != "id,sv,input_label") {
    throw InputError(path.string() + ": header must be 'id,sv,input_label'");
  }

  std::vector<std::pair<int, double>> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    chomp(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw InputError(path.string() + ": row " + std::to_string(row) +
                       ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    const int id = parse_int(fields[0], path, row, 1);
    const double value = parse_double(fields[1], path, row, 2);
    values.emplace_back(id, value);
  }
  if (values.empty()) throw InputError(path.string() + ": no data rows");
  return values;
}

void write_trace_csv(const std::filesystem::path& path, const ShapleyRun& run,
                     const std::vector<int>& tracked_ids) {
  // Map each tracked id to its dense column in the trace estimates.
  std::vector<std::size_t> columns;
  columns.reserve(tracked_ids.size());
  for (const int id : tracked_ids) {
    std::size_t at = run.estimates.values.size();
    for (std::size_t i = 0; i < run.estimates.values.size(); ++i) {
      if (run.estimates.values[i].first == id) {
        at = i;
        break;
      }
    }
    if (at == run.estimates.values.size()) {
      throw InputError("tracked id " + std::to_string(id) +
                       " is not part of the run");
    }
    columns.push_back(at);
  }

  std::ofstream out = open_for_write(path);
  out << "permutation_count";
  for (const int id : tracked_ids) out << ",sv_" << id;
  out << '\n';
  for (const TraceCheckpoint& cp : run.trace) {
    out << cp.permutation_count;
    for (const std::size_t at : columns) {
      out << ',' << format_double(cp.estimates[at]);
    }
    out << '\n';
  }
  finish_write(out, path);
}

void write_flips_csv(const std::filesystem::path& path, const FlipRecord& flips) {
  std::ofstream out = open_for_write(path);
  out << "id,direction\n";
  for (const auto& [id, direction] : flips) {
    out << id << ',' << to_string(direction) << '\n';
  }
  finish_write(out, path);
}

void write_detection_csv(const std::filesystem::path& path,
                         std::span<const DetectionReport> reports) {
  std::ofstream out = open_for_write(path);
  out << "bottom_fraction,bottom_size,captured_pos_truth,captured_neg_truth,"
         "captured_total,pos_truth_vacuous,neg_truth_vacuous\n";
  for (const DetectionReport& r : reports) {
    out << format_double(r.bottom_fraction) << ',' << r.bottom_size << ','
        << format_double(r.captured_pos_truth) << ','
        << format_double(r.captured_neg_truth) << ','
        << format_double(r.captured_total) << ',' << (r.pos_truth_vacuous ? 1 : 0)
        << ',' << (r.neg_truth_vacuous ? 1 : 0) << '\n';
  }
  finish_write(out, path);
}

void write_class_mapping_csv(const std::filesystem::path& path,
                             std::span<const ClassMappingRow> rows) {
  std::ofstream out = open_for_write(path);
  out << "rank,id,sv,input_label,truth_label\n";
  for (const ClassMappingRow& r : rows) {
    out << r.rank << ',' << r.id << ',' << format_double(r.value) << ','
        << to_string(r.input_label) << ',' << to_string(r.truth_label) << '\n';
  }
  finish_write(out, path);
}

}  // namespace shapval::io

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shapval/dataset.hpp"
#include "shapval/harness.hpp"
#include "shapval/shapley.hpp"

namespace shapval::io {

// Shortest decimal form that parses back to the identical double (%.17g,
// C locale). All CSV output funnels through this.
std::string format_double(double value);

// Dataset CSV: header `id,label,f0,...,f{d-1}`, labels `pos`/`neg`.
// Malformed input raises InputError naming row and column; unreadable or
// unwritable paths raise IoError.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

// Value CSV: header `id,sv,input_label`, rows ascending by id. The labels
// are taken from the training data the values were computed against.
void write_values_csv(const std::filesystem::path& path, const ShapleyVector& sv,
                      const Dataset& train);
std::vector<std::pair<int, double>> read_values_csv(const std::filesystem::path& path);

// Convergence trace: header `permutation_count,sv_<id>,...` for the tracked
// ids, one row per recorded checkpoint.
void write_trace_csv(const std::filesystem::path& path, const ShapleyRun& run,
                     const std::vector<int>& tracked_ids);

// Flip record: header `id,direction`.
void write_flips_csv(const std::filesystem::path& path, const FlipRecord& flips);

// Detection reports: one row per bottom fraction.
void write_detection_csv(const std::filesystem::path& path,
                         std::span<const DetectionReport> reports);

// Ranked value-vs-truth table: one row per point, least valuable first.
void write_class_mapping_csv(const std::filesystem::path& path,
                             std::span<const ClassMappingRow> rows);

}  // namespace shapval::io

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shapval/dataset.hpp"

namespace testsup {

inline shapval::DataPoint pt(int id, std::vector<double> features,
                             shapval::Label label) {
  shapval::DataPoint p;
  p.id = id;
  p.features = std::move(features);
  p.label = label;
  return p;
}

// One-dimensional dataset from (feature, label) pairs, ids counted up from
// first_id in pair order.
inline shapval::Dataset one_d(
    const std::vector<std::pair<double, shapval::Label>>& points,
    int first_id = 0) {
  std::vector<shapval::DataPoint> records;
  int id = first_id;
  for (const auto& [x, label] : points) records.push_back(pt(id++, {x}, label));
  return shapval::Dataset::from_records(std::move(records));
}

// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "shapval-test") {
    static std::atomic<unsigned> counter{0};
    const unsigned n = counter.fetch_add(1);
    dir_ = std::filesystem::temp_directory_path() /
           (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path operator/(const std::string& name) const {
    return dir_ / name;
  }

 private:
  std::filesystem::path dir_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

// Relative path -> exact bytes, for whole-directory comparisons.
inline std::map<std::string, std::string> dir_snapshot(
    const std::filesystem::path& root) {
  std::map<std::string, std::string> snapshot;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    snapshot[entry.path().lexically_relative(root).generic_string()] =
        slurp(entry.path());
  }
  return snapshot;
}

}  // namespace testsup

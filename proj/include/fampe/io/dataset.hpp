#pragma once

// Dataset directory: image files plus labels.csv with a `filename,label`
// header and one row per image.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/io/files.hpp"
#include "fampe/io/image.hpp"
#include "fampe/model/train.hpp"

namespace fampe::io {

struct DatasetEntry {
  std::string filename;
  std::size_t label = 0;
};

struct Dataset {
  std::vector<std::string> names;
  std::vector<model::LabeledSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

inline std::string labels_csv(const std::vector<DatasetEntry>& entries) {
  std::string out = "filename,label\n";
  for (const auto& e : entries) out += e.filename + "," + std::to_string(e.label) + "\n";
  return out;
}

inline std::vector<DatasetEntry> parse_labels_csv(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::string line;
  std::vector<DatasetEntry> entries;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "filename,label") continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
      throw Error(errc::format, what + " line " + std::to_string(line_no) + ": expected filename,label");
    }
    const std::string label = line.substr(comma + 1);
    if (label.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(errc::format, what + " line " + std::to_string(line_no) + ": label '" + label + "' is not a class index");
    }
    entries.push_back({line.substr(0, comma), static_cast<std::size_t>(std::stoull(label))});
  }
  return entries;
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(errc::not_found, "dataset directory '" + dir.string() + "' does not exist");
  const auto labels_path = dir / "labels.csv";
  if (!std::filesystem::exists(labels_path)) throw Error(errc::not_found, "dataset labels file '" + labels_path.string() + "' does not exist");
  Dataset ds;
  for (const auto& e : parse_labels_csv(read_text(labels_path), labels_path.string())) {
    Tensor img = read_image(dir / e.filename);
    if (!ds.samples.empty() && img.shape() != ds.samples.front().image.shape()) {
      throw Error(errc::shape_mismatch, "dataset image '" + e.filename + "' has shape " + shape_string(img.shape()) +
                                            ", expected " + shape_string(ds.samples.front().image.shape()));
    }
    ds.names.push_back(e.filename);
    ds.samples.push_back({std::move(img), e.label});
  }
  if (ds.samples.empty()) throw Error(errc::invalid_argument, "dataset '" + dir.string() + "' has no samples");
  return ds;
}

} // namespace fampe::io

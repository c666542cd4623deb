#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fampe/evaluation/report.hpp"

namespace fampe::evaluation {

struct ScoreRow {
  std::string sample_id;
  std::optional<double> alpha;  // empty for methods without an alpha
  double insertion = 0.0;
  double deletion = 0.0;
  std::optional<double> cutoff;
};

inline std::string score_csv(const std::vector<ScoreRow>& rows) {
  std::string out = "sample_id,alpha,insertion,deletion,cutoff\n";
  for (const auto& r : rows) {
    out += r.sample_id + ",";
    if (r.alpha) out += format_number(*r.alpha);
    out += "," + format_number(r.insertion) + "," + format_number(r.deletion) + ",";
    if (r.cutoff) out += format_number(*r.cutoff);
    out += "\n";
  }
  return out;
}

inline std::string summary_json(const std::string& method, const ScoreReport& report, const std::vector<double>& alpha_grid) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["mean_insertion"] = report.mean_insertion;
  j["mean_deletion"] = report.mean_deletion;
  j["n_samples"] = report.samples.size();
  j["alpha_grid"] = alpha_grid;
  return j.dump(2) + "\n";
}

} // namespace fampe::evaluation

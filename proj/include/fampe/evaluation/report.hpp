#pragma once

#include <charconv>
#include <optional>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/evaluation/insertion_deletion.hpp"

namespace fampe::evaluation {

/// Running mean that merges associatively; per-thread partials can be
/// combined in any grouping.
struct MeanAccumulator {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    ++count;
  }
  MeanAccumulator& merge(const MeanAccumulator& other) {
    sum += other.sum;
    count += other.count;
    return *this;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

struct AlphaBreakdown {
  std::vector<double> alphas;
  std::vector<double> mean_insertion;            // per alpha
  std::vector<double> mean_deletion;             // per alpha
  std::vector<double> insertion_best_frequency;  // % of samples whose max insertion is at this alpha
  std::vector<double> deletion_best_frequency;   // % of samples whose min deletion is at this alpha
  std::vector<std::size_t> best_insertion_index; // per sample
  std::vector<std::size_t> best_deletion_index;  // per sample
};

struct ScoreReport {
  std::vector<SampleScore> samples;
  double mean_insertion = 0.0;
  double mean_deletion = 0.0;
  std::optional<AlphaBreakdown> per_alpha;
};

inline ScoreReport aggregate_report(std::vector<SampleScore> samples) {
  if (samples.empty()) throw Error(errc::invalid_argument, "aggregate_report: no samples");
  MeanAccumulator ins, del;
  for (const auto& s : samples) {
    ins.add(s.insertion);
    del.add(s.deletion);
  }
  ScoreReport report;
  report.samples = std::move(samples);
  report.mean_insertion = ins.mean();
  report.mean_deletion = del.mean();
  return report;
}

/// `matrix[sample][alpha]`. Each sample contributes its max insertion and min
/// deletion over alpha; the first alpha wins ties.
inline ScoreReport aggregate_alpha_report(const std::vector<double>& alphas, const std::vector<std::vector<SampleScore>>& matrix) {
  if (matrix.empty()) throw Error(errc::invalid_argument, "aggregate_alpha_report: no samples");
  if (alphas.empty()) throw Error(errc::invalid_argument, "aggregate_alpha_report: empty alpha grid");
  const std::size_t A = alphas.size();
  AlphaBreakdown br;
  br.alphas = alphas;
  std::vector<MeanAccumulator> ins(A), del(A);
  std::vector<std::size_t> ins_hits(A, 0), del_hits(A, 0);
  std::vector<SampleScore> best;
  for (std::size_t s = 0; s < matrix.size(); ++s) {
    const auto& row = matrix[s];
    if (row.size() != A) {
      throw Error(errc::shape_mismatch, "aggregate_alpha_report: sample " + std::to_string(s) + " has " + std::to_string(row.size()) +
                                            " alpha scores, expected " + std::to_string(A));
    }
    std::size_t bi = 0, bd = 0;
    for (std::size_t a = 0; a < A; ++a) {
      ins[a].add(row[a].insertion);
      del[a].add(row[a].deletion);
      if (row[a].insertion > row[bi].insertion) bi = a;
      if (row[a].deletion < row[bd].deletion) bd = a;
    }
    ++ins_hits[bi];
    ++del_hits[bd];
    br.best_insertion_index.push_back(bi);
    br.best_deletion_index.push_back(bd);
    best.push_back({row[bi].insertion, row[bd].deletion});
  }
  const double n = static_cast<double>(matrix.size());
  for (std::size_t a = 0; a < A; ++a) {
    br.mean_insertion.push_back(ins[a].mean());
    br.mean_deletion.push_back(del[a].mean());
    br.insertion_best_frequency.push_back(100.0 * static_cast<double>(ins_hits[a]) / n);
    br.deletion_best_frequency.push_back(100.0 * static_cast<double>(del_hits[a]) / n);
  }
  ScoreReport report = aggregate_report(std::move(best));
  report.per_alpha = std::move(br);
  return report;
}

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// "cutoff alpha" lines, one per sample.
inline std::string emit_cutoff_alpha_scatter(const std::vector<std::pair<double, double>>& points) {
  std::string out;
  for (const auto& [cutoff, alpha] : points) out += format_number(cutoff) + " " + format_number(alpha) + "\n";
  return out;
}

} // namespace fampe::evaluation

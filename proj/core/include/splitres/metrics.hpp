#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/prediction.hpp"

namespace splitres {

// Link-level scores as fractions in [0, 1].
struct LenientScores {
  double recall = 0;
  double precision = 0;
  double f1 = 0;
  std::size_t matched_links = 0;
  std::size_t gold_links = 0;
  std::size_t predicted_links = 0;
};

// All evaluation functions require `pred` to cover exactly the gold split
// anaphors of `gold`; they throw std::invalid_argument otherwise.

// A predicted antecedent is correct iff its gold cluster is the cluster of a
// gold antecedent; each gold cluster is credited at most once per anaphor.
// Micro-averaged over links.
LenientScores lenient_scores(const PredictionSet& pred, const Corpus& gold);

// Per-anaphor recall and precision averaged over anaphors.
LenientScores macro_lenient_scores(const PredictionSet& pred, const Corpus& gold);

// Fraction of anaphors whose predicted cluster set equals the gold one.
double strict_accuracy(const PredictionSet& pred, const Corpus& gold);

struct CountRow {
  std::string label;  // "2" or "3+"
  std::size_t anaphors = 0;
  LenientScores lenient;
  double strict_accuracy = 0;
  bool empty() const { return anaphors == 0; }
};

// Groups anaphors by gold antecedent count: {2} and {3+}.
std::vector<CountRow> breakdown_by_count(const PredictionSet& pred, const Corpus& gold);

// Everything in percent.
struct MetricReport {
  double recall = 0;
  double precision = 0;
  double f1 = 0;
  double macro_recall = 0;
  double macro_precision = 0;
  double macro_f1 = 0;
  double strict_accuracy = 0;
  std::size_t anaphors = 0;
  std::size_t strict_correct = 0;
  std::size_t matched_links = 0;
  std::size_t gold_links = 0;
  std::size_t predicted_links = 0;
  std::vector<CountRow> by_count;  // fractions, converted on output
};

MetricReport evaluate_predictions(const PredictionSet& pred, const Corpus& gold,
                                  bool with_breakdown = false);

std::string report_to_json(const MetricReport& report, bool strict_only = false);

// Aligned table with lenient R/P/F1 and strict accuracy columns, one row per
// named system.
struct TableRow {
  std::string system;
  MetricReport report;
};
std::string report_table(const std::vector<TableRow>& rows, bool strict_only = false);
std::string breakdown_table(const MetricReport& report);

}  // namespace splitres

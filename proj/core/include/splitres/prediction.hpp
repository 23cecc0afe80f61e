#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace splitres {

// Antecedents predicted for one gold split anaphor, in selection order.
struct AnaphorPrediction {
  std::string doc_id;
  std::string anaphor;
  std::vector<std::string> antecedents;
  std::vector<double> scores;  // pair probabilities; empty for rule baselines

  friend bool operator==(const AnaphorPrediction&, const AnaphorPrediction&) = default;
};

using PredictionSet = std::vector<AnaphorPrediction>;

std::string prediction_to_json(const AnaphorPrediction& p);
AnaphorPrediction prediction_from_json(const std::string& line);

void save_predictions(const PredictionSet& predictions, const std::filesystem::path& path);
PredictionSet load_predictions(const std::filesystem::path& path);

}  // namespace splitres

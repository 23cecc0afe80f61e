#include "splitres/prediction.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace splitres {

std::string prediction_to_json(const AnaphorPrediction& p) {
  nlohmann::ordered_json j;
  j["doc_id"] = p.doc_id;
  j["anaphor"] = p.anaphor;
  j["antecedents"] = p.antecedents;
  j["scores"] = p.scores;
  return j.dump();
}

AnaphorPrediction prediction_from_json(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  AnaphorPrediction p;
  p.doc_id = j.at("doc_id").get<std::string>();
  p.anaphor = j.at("anaphor").get<std::string>();
  p.antecedents = j.at("antecedents").get<std::vector<std::string>>();
  if (auto it = j.find("scores"); it != j.end()) p.scores = it->get<std::vector<double>>();
  return p;
}

void save_predictions(const PredictionSet& predictions, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write predictions: " + path.string());
  for (const auto& p : predictions) out << prediction_to_json(p) << '\n';
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions: " + path.string());
  PredictionSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(prediction_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace splitres

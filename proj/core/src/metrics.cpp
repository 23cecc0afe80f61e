#include "splitres/metrics.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace splitres {

namespace {

// Per-anaphor outcome of matching predicted against gold clusters.
struct AnaphorOutcome {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;
  bool strict = false;
};

std::vector<AnaphorOutcome> outcomes(const PredictionSet& pred, const Corpus& gold) {
  std::map<std::pair<std::string, std::string>, const AnaphorPrediction*> by_key;
  for (const auto& p : pred) {
    if (!by_key.emplace(std::make_pair(p.doc_id, p.anaphor), &p).second) {
      throw std::invalid_argument("duplicate prediction for anaphor " + p.anaphor +
                                  " in document " + p.doc_id);
    }
  }

  std::vector<AnaphorOutcome> out;
  std::size_t used = 0;
  for (const auto& doc : gold.documents) {
    DocumentIndex index(doc);
    for (const auto& split : doc.split_anaphors) {
      auto it = by_key.find({doc.doc_id, split.anaphor});
      if (it == by_key.end()) {
        throw std::invalid_argument("missing prediction for anaphor " + split.anaphor +
                                    " in document " + doc.doc_id);
      }
      ++used;
      std::set<int> gold_clusters;
      for (const auto& a : split.antecedents) gold_clusters.insert(index.cluster_of(a));
      std::set<int> pred_clusters;
      for (const auto& a : it->second->antecedents) {
        if (!index.contains(a)) {
          throw std::invalid_argument("predicted antecedent " + a + " is not a mention of " +
                                      doc.doc_id);
        }
        pred_clusters.insert(index.cluster_of(a));
      }
      AnaphorOutcome o;
      o.gold = split.antecedents.size();
      o.predicted = it->second->antecedents.size();
      for (int c : pred_clusters) o.matched += gold_clusters.count(c);
      o.strict = pred_clusters == gold_clusters;
      out.push_back(o);
    }
  }
  if (used != by_key.size()) {
    throw std::invalid_argument("predictions include anaphors that are not gold split anaphors");
  }
  return out;
}

double harmonic(double r, double p) { return r + p > 0 ? 2 * r * p / (r + p) : 0.0; }

LenientScores micro(const std::vector<AnaphorOutcome>& items) {
  LenientScores s;
  for (const auto& o : items) {
    s.matched_links += o.matched;
    s.gold_links += o.gold;
    s.predicted_links += o.predicted;
  }
  s.recall = s.gold_links ? static_cast<double>(s.matched_links) / s.gold_links : 0.0;
  s.precision = s.predicted_links ? static_cast<double>(s.matched_links) / s.predicted_links : 0.0;
  s.f1 = harmonic(s.recall, s.precision);
  return s;
}

LenientScores macro(const std::vector<AnaphorOutcome>& items) {
  LenientScores s = micro(items);
  if (items.empty()) return s;
  double r = 0, p = 0;
  for (const auto& o : items) {
    r += o.gold ? static_cast<double>(o.matched) / o.gold : 0.0;
    p += o.predicted ? static_cast<double>(o.matched) / o.predicted : 0.0;
  }
  s.recall = r / items.size();
  s.precision = p / items.size();
  s.f1 = harmonic(s.recall, s.precision);
  return s;
}

double strict(const std::vector<AnaphorOutcome>& items) {
  if (items.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& o : items) correct += o.strict;
  return static_cast<double>(correct) / items.size();
}

}  // namespace

LenientScores lenient_scores(const PredictionSet& pred, const Corpus& gold) {
  return micro(outcomes(pred, gold));
}

LenientScores macro_lenient_scores(const PredictionSet& pred, const Corpus& gold) {
  return macro(outcomes(pred, gold));
}

double strict_accuracy(const PredictionSet& pred, const Corpus& gold) {
  return strict(outcomes(pred, gold));
}

std::vector<CountRow> breakdown_by_count(const PredictionSet& pred, const Corpus& gold) {
  std::vector<AnaphorOutcome> two, more;
  for (const auto& o : outcomes(pred, gold)) (o.gold <= 2 ? two : more).push_back(o);
  std::vector<CountRow> rows(2);
  rows[0].label = "2";
  rows[1].label = "3+";
  for (auto [row, items] : {std::pair{&rows[0], &two}, std::pair{&rows[1], &more}}) {
    row->anaphors = items->size();
    row->lenient = micro(*items);
    row->strict_accuracy = strict(*items);
  }
  return rows;
}

MetricReport evaluate_predictions(const PredictionSet& pred, const Corpus& gold,
                                  bool with_breakdown) {
  const auto items = outcomes(pred, gold);
  const LenientScores mi = micro(items);
  const LenientScores ma = macro(items);
  MetricReport r;
  r.recall = 100 * mi.recall;
  r.precision = 100 * mi.precision;
  r.f1 = 100 * mi.f1;
  r.macro_recall = 100 * ma.recall;
  r.macro_precision = 100 * ma.precision;
  r.macro_f1 = 100 * ma.f1;
  r.anaphors = items.size();
  for (const auto& o : items) r.strict_correct += o.strict;
  r.strict_accuracy = 100 * strict(items);
  r.matched_links = mi.matched_links;
  r.gold_links = mi.gold_links;
  r.predicted_links = mi.predicted_links;
  if (with_breakdown) r.by_count = breakdown_by_count(pred, gold);
  return r;
}

std::string report_to_json(const MetricReport& r, bool strict_only) {
  nlohmann::ordered_json j;
  if (!strict_only) {
    j["lenient"] = {{"recall", r.recall}, {"precision", r.precision}, {"f1", r.f1}};
    j["lenient_macro"] = {
        {"recall", r.macro_recall}, {"precision", r.macro_precision}, {"f1", r.macro_f1}};
  }
  j["strict"] = {{"accuracy", r.strict_accuracy}, {"correct", r.strict_correct}};
  j["anaphors"] = r.anaphors;
  if (!strict_only) {
    j["links"] = {
        {"matched", r.matched_links}, {"gold", r.gold_links}, {"predicted", r.predicted_links}};
  }
  if (!r.by_count.empty()) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.by_count) {
      nlohmann::ordered_json jr;
      jr["antecedents"] = row.label;
      jr["anaphors"] = row.anaphors;
      jr["empty"] = row.empty();
      if (!strict_only) jr["lenient_f1"] = 100 * row.lenient.f1;
      jr["strict_accuracy"] = 100 * row.strict_accuracy;
      jr["links"] = {{"matched", row.lenient.matched_links},
                     {"gold", row.lenient.gold_links},
                     {"predicted", row.lenient.predicted_links}};
      rows.push_back(std::move(jr));
    }
    j["by_count"] = std::move(rows);
  }
  return j.dump(2);
}

std::string report_table(const std::vector<TableRow>& rows, bool strict_only) {
  std::size_t width = 6;
  for (const auto& row : rows) width = std::max(width, row.system.size());
  std::string out;
  char buf[256];
  if (strict_only) {
    std::snprintf(buf, sizeof(buf), "%-*s | %8s\n", static_cast<int>(width), "", "Strict");
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-*s | %8s\n", static_cast<int>(width), "System", "Accuracy");
    out += buf;
    out += std::string(width, '-') + "-+---------\n";
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf), "%-*s | %8.1f\n", static_cast<int>(width), row.system.c_str(),
                    row.report.strict_accuracy);
      out += buf;
    }
    return out;
  }
  std::snprintf(buf, sizeof(buf), "%-*s | %-20s | %8s\n", static_cast<int>(width), "", "Lenient",
                "Strict");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-*s | %6s %6s %6s | %8s\n", static_cast<int>(width), "System",
                "R", "P", "F1", "Accuracy");
  out += buf;
  out += std::string(width, '-') + "-+----------------------+---------\n";
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s | %6.1f %6.1f %6.1f | %8.1f\n", static_cast<int>(width),
                  row.system.c_str(), row.report.recall, row.report.precision, row.report.f1,
                  row.report.strict_accuracy);
    out += buf;
  }
  return out;
}

std::string breakdown_table(const MetricReport& report) {
  std::string out = "Count | Anaphors | Lenient F1 | Strict\n";
  out += "------+----------+------------+-------\n";
  char buf[128];
  for (const auto& row : report.by_count) {
    if (row.empty()) {
      std::snprintf(buf, sizeof(buf), "%-5s | %8zu | %10s | %6s\n", row.label.c_str(), row.anaphors,
                    "(empty)", "-");
    } else {
      std::snprintf(buf, sizeof(buf), "%-5s | %8zu | %10.1f | %6.1f\n", row.label.c_str(),
                    row.anaphors, 100 * row.lenient.f1, 100 * row.strict_accuracy);
    }
    out += buf;
  }
  return out;
}

}  // namespace splitres

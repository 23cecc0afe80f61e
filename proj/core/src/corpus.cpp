#include "splitres/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace splitres {

using ojson = nlohmann::ordered_json;

std::string_view to_string(BridgingRelation relation) {
  switch (relation) {
    case BridgingRelation::kElementOf:
      return "element-of";
    case BridgingRelation::kElementOfInverse:
      return "element-of-inverse";
    case BridgingRelation::kOther:
      return "other";
  }
  return "other";
}

BridgingRelation parse_bridging_relation(std::string_view text) {
  if (text == "element-of") return BridgingRelation::kElementOf;
  if (text == "element-of-inverse") return BridgingRelation::kElementOfInverse;
  if (text == "other") return BridgingRelation::kOther;
  throw std::invalid_argument("unknown bridging relation: " + std::string(text));
}

std::string_view to_string(QualityTier tier) {
  switch (tier) {
    case QualityTier::kGold:
      return "gold";
    case QualityTier::kSilver:
      return "silver";
    case QualityTier::kNoisy:
      return "noisy";
  }
  return "gold";
}

const SplitAnaphor* Document::find_split(std::string_view anaphor) const {
  for (const auto& split : split_anaphors) {
    if (split.anaphor == anaphor) return &split;
  }
  return nullptr;
}

std::size_t Document::antecedent_link_count() const {
  std::size_t n = 0;
  for (const auto& split : split_anaphors) n += split.antecedents.size();
  return n;
}

std::size_t Corpus::anaphor_count() const {
  std::size_t n = 0;
  for (const auto& doc : documents) n += doc.split_anaphors.size();
  return n;
}

std::size_t Corpus::link_count() const {
  std::size_t n = 0;
  for (const auto& doc : documents) n += doc.antecedent_link_count();
  return n;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string join_violations(const std::string& doc_id,
                            const std::vector<std::string>& violations) {
  std::string out = "document " + doc_id + " is invalid:";
  for (const auto& v : violations) out += "\n  " + v;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::string doc_id, std::vector<std::string> violations)
    : std::runtime_error(join_violations(doc_id, violations)),
      doc_id_(std::move(doc_id)),
      violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// DocumentIndex

DocumentIndex::DocumentIndex(const Document& doc) : doc_(&doc) {
  const std::size_t n = doc.mentions.size();
  ids_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids_.emplace(doc.mentions[i].id, i);

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = doc.mentions[a];
    const auto& mb = doc.mentions[b];
    if (ma.start != mb.start) return ma.start < mb.start;
    return ma.end < mb.end;
  });
  rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) rank_[order_[r]] = r;

  cluster_.assign(n, -1);
  for (std::size_t c = 0; c < doc.clusters.size(); ++c) {
    for (const auto& id : doc.clusters[c]) {
      auto it = ids_.find(id);
      if (it != ids_.end() && cluster_[it->second] < 0) {
        cluster_[it->second] = static_cast<int>(c);
      }
    }
  }
}

bool DocumentIndex::contains(std::string_view id) const {
  return ids_.find(std::string(id)) != ids_.end();
}

std::size_t DocumentIndex::index_of(std::string_view id) const {
  auto it = ids_.find(std::string(id));
  if (it == ids_.end()) {
    throw std::out_of_range("unknown mention id '" + std::string(id) + "' in document " +
                            doc_->doc_id);
  }
  return it->second;
}

const Mention& DocumentIndex::mention(std::string_view id) const {
  return doc_->mentions[index_of(id)];
}

bool DocumentIndex::precedes(std::string_view a, std::string_view b) const {
  return rank_of(a) < rank_of(b);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_document(const Document& doc,
                                           const ValidationOptions& options) {
  std::vector<std::string> out;
  const auto n_tokens = static_cast<int>(doc.tokens.size());

  std::set<std::string> seen;
  for (const auto& m : doc.mentions) {
    if (!seen.insert(m.id).second) out.push_back("duplicate mention id: " + m.id);
    if (m.start < 0 || m.start > m.end || m.end >= n_tokens) {
      out.push_back("mention span out of range (0 <= start <= end < " +
                    std::to_string(n_tokens) + "): " + m.id);
    }
  }

  DocumentIndex index(doc);
  auto check_ref = [&](const std::string& id, const std::string& where) {
    if (!index.contains(id)) {
      out.push_back("unknown mention id referenced by " + where + ": " + id);
      return false;
    }
    return true;
  };

  std::vector<int> membership(doc.mentions.size(), 0);
  for (const auto& cluster : doc.clusters) {
    for (const auto& id : cluster) {
      if (check_ref(id, "clusters")) ++membership[index.index_of(id)];
    }
  }
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    if (membership[i] == 0) {
      out.push_back("mention must belong to exactly one cluster (found none): " +
                    doc.mentions[i].id);
    } else if (membership[i] > 1) {
      out.push_back("mention must belong to exactly one cluster (found " +
                    std::to_string(membership[i]) + "): " + doc.mentions[i].id);
    }
  }

  std::set<std::string> anaphors;
  for (const auto& split : doc.split_anaphors) {
    if (!anaphors.insert(split.anaphor).second) {
      out.push_back("duplicate split anaphor entry: " + split.anaphor);
    }
    const bool anaphor_ok = check_ref(split.anaphor, "split_anaphors");
    if (split.antecedents.size() < options.min_antecedents) {
      out.push_back("split anaphor must have ≥" + std::to_string(options.min_antecedents) +
                    " antecedents: " + split.anaphor);
    }
    std::set<int> clusters_seen;
    for (const auto& ante : split.antecedents) {
      if (!check_ref(ante, "split_anaphors[" + split.anaphor + "]")) continue;
      if (anaphor_ok && !index.precedes(ante, split.anaphor)) {
        out.push_back("antecedent must precede its anaphor in document order: " + ante +
                      " -> " + split.anaphor);
      }
      const int c = index.cluster_of(ante);
      if (c >= 0 && !clusters_seen.insert(c).second) {
        out.push_back("antecedents of one anaphor must lie in distinct clusters: " +
                      split.anaphor + " has " + ante + " in a repeated cluster");
      }
    }
  }

  for (const auto& link : doc.bridging) {
    check_ref(link.anaphor, "bridging");
    check_ref(link.antecedent, "bridging");
  }

  for (const auto& ann : doc.crowd) {
    check_ref(ann.anaphor, "crowd");
    if (ann.antecedents.empty()) {
      out.push_back("crowd annotation must have antecedents: " + ann.annotator + "/" +
                    ann.anaphor);
    }
    for (const auto& ante : ann.antecedents) check_ref(ante, "crowd");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON interchange

namespace {

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {"doc_id",         "tokens",   "mentions",
                                             "clusters",       "split_anaphors",
                                             "bridging",       "crowd"};
  return keys;
}

std::vector<std::string> string_list(const ojson& value, const char* what) {
  if (!value.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_string()) {
      throw std::invalid_argument(std::string(what) + " must contain strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

const ojson& required(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing key: ") + key);
  return *it;
}

}  // namespace

Document document_from_json(std::string_view line) {
  ojson obj;
  try {
    obj = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw std::invalid_argument("document must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed_keys().count(key)) throw std::invalid_argument("unexpected key: " + key);
  }

  try {
    Document doc;
    doc.doc_id = required(obj, "doc_id").get<std::string>();
    doc.tokens = string_list(required(obj, "tokens"), "tokens");

    for (const auto& m : required(obj, "mentions")) {
      doc.mentions.push_back(
          {m.at("id").get<std::string>(), m.at("start").get<int>(), m.at("end").get<int>()});
    }
    for (const auto& c : required(obj, "clusters")) {
      doc.clusters.push_back(string_list(c, "cluster"));
    }
    const auto& splits = required(obj, "split_anaphors");
    if (!splits.is_object()) throw std::invalid_argument("split_anaphors must be an object");
    for (const auto& [anaphor, antes] : splits.items()) {
      doc.split_anaphors.push_back({anaphor, string_list(antes, "split antecedents")});
    }
    if (auto it = obj.find("bridging"); it != obj.end()) {
      for (const auto& b : *it) {
        doc.bridging.push_back({b.at("anaphor").get<std::string>(),
                                b.at("antecedent").get<std::string>(),
                                parse_bridging_relation(b.at("relation").get<std::string>())});
      }
    }
    if (auto it = obj.find("crowd"); it != obj.end()) {
      for (const auto& c : *it) {
        doc.crowd.push_back({c.at("annotator").get<std::string>(),
                             c.at("anaphor").get<std::string>(),
                             string_list(c.at("antecedents"), "crowd antecedents")});
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

std::string document_to_json(const Document& doc) {
  ojson obj;
  obj["doc_id"] = doc.doc_id;
  obj["tokens"] = doc.tokens;
  ojson mentions = ojson::array();
  for (const auto& m : doc.mentions) {
    ojson jm;
    jm["id"] = m.id;
    jm["start"] = m.start;
    jm["end"] = m.end;
    mentions.push_back(std::move(jm));
  }
  obj["mentions"] = std::move(mentions);
  obj["clusters"] = doc.clusters.empty() ? ojson::array() : ojson(doc.clusters);
  ojson splits = ojson::object();
  for (const auto& s : doc.split_anaphors) splits[s.anaphor] = s.antecedents;
  obj["split_anaphors"] = std::move(splits);
  ojson bridging = ojson::array();
  for (const auto& b : doc.bridging) {
    ojson jb;
    jb["anaphor"] = b.anaphor;
    jb["antecedent"] = b.antecedent;
    jb["relation"] = std::string(to_string(b.relation));
    bridging.push_back(std::move(jb));
  }
  obj["bridging"] = std::move(bridging);
  ojson crowd = ojson::array();
  for (const auto& c : doc.crowd) {
    ojson jc;
    jc["annotator"] = c.annotator;
    jc["anaphor"] = c.anaphor;
    jc["antecedents"] = c.antecedents;
    crowd.push_back(std::move(jc));
  }
  obj["crowd"] = std::move(crowd);
  return obj.dump();
}

Corpus load_corpus(const std::filesystem::path& path, const ValidationOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());

  Corpus corpus;
  corpus.name = path.stem().string();
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Document doc;
    try {
      doc = document_from_json(line);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    auto violations = validate_document(doc, options);
    if (!ids.insert(doc.doc_id).second) {
      violations.push_back("duplicate doc_id in corpus: " + doc.doc_id);
    }
    if (!violations.empty()) throw ValidationError(doc.doc_id, std::move(violations));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path.string());
  for (const auto& doc : corpus.documents) out << document_to_json(doc) << '\n';
  if (!out) throw std::runtime_error("failed writing corpus file: " + path.string());
}

// ---------------------------------------------------------------------------
// Candidates and extension

std::vector<std::size_t> candidate_antecedents(const DocumentIndex& index,
                                               std::size_t anaphor_index,
                                               std::size_t window) {
  std::vector<std::size_t> out;
  const std::size_t rank = index.rank(anaphor_index);
  const std::size_t count = std::min(rank, window);
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) out.push_back(index.order()[rank - k]);
  return out;
}

std::vector<std::string> candidate_antecedents(const Document& doc, std::string_view anaphor,
                                               std::size_t window) {
  DocumentIndex index(doc);
  std::vector<std::string> out;
  for (std::size_t i : candidate_antecedents(index, index.index_of(anaphor), window)) {
    out.push_back(doc.mentions[i].id);
  }
  return out;
}

Document extend_anaphors(const Document& doc) {
  Document out = doc;
  DocumentIndex index(doc);
  std::set<std::string> known;
  for (const auto& s : doc.split_anaphors) known.insert(s.anaphor);

  for (const auto& split : doc.split_anaphors) {
    const int c = index.cluster_of(split.anaphor);
    if (c < 0) continue;
    std::size_t last_antecedent = 0;
    for (const auto& a : split.antecedents) {
      last_antecedent = std::max(last_antecedent, index.rank_of(a));
    }
    // Cluster-mates in document order, so the output does not depend on the
    // order ids are listed in the cluster.
    std::vector<std::string> mates = doc.clusters[c];
    std::sort(mates.begin(), mates.end(), [&](const auto& a, const auto& b) {
      return index.rank_of(a) < index.rank_of(b);
    });
    for (const auto& mate : mates) {
      if (mate == split.anaphor || known.count(mate)) continue;
      if (index.rank_of(mate) <= last_antecedent) continue;
      out.split_anaphors.push_back({mate, split.antecedents});
      known.insert(mate);
    }
  }
  return out;
}

}  // namespace splitres

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace splitres {

// A gold mention. Token indices are 0-based and inclusive at both ends.
struct Mention {
  std::string id;
  int start = 0;
  int end = 0;

  friend bool operator==(const Mention&, const Mention&) = default;
};

struct SplitAnaphor {
  std::string anaphor;
  std::vector<std::string> antecedents;

  friend bool operator==(const SplitAnaphor&, const SplitAnaphor&) = default;
};

enum class BridgingRelation { kElementOf, kElementOfInverse, kOther };

std::string_view to_string(BridgingRelation relation);
BridgingRelation parse_bridging_relation(std::string_view text);

struct BridgingLink {
  std::string anaphor;
  std::string antecedent;
  BridgingRelation relation = BridgingRelation::kOther;

  friend bool operator==(const BridgingLink&, const BridgingLink&) = default;
};

struct CrowdAnnotation {
  std::string annotator;
  std::string anaphor;
  std::vector<std::string> antecedents;

  friend bool operator==(const CrowdAnnotation&, const CrowdAnnotation&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<Mention> mentions;
  std::vector<std::vector<std::string>> clusters;
  // Kept in file order so that save(load(x)) reproduces x.
  std::vector<SplitAnaphor> split_anaphors;
  std::vector<BridgingLink> bridging;
  std::vector<CrowdAnnotation> crowd;

  const SplitAnaphor* find_split(std::string_view anaphor) const;
  std::size_t antecedent_link_count() const;

  friend bool operator==(const Document&, const Document&) = default;
};

enum class QualityTier { kGold, kSilver, kNoisy };

std::string_view to_string(QualityTier tier);

struct Corpus {
  std::string name;
  QualityTier quality_tier = QualityTier::kGold;
  std::vector<Document> documents;

  std::size_t anaphor_count() const;
  std::size_t link_count() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string doc_id, std::vector<std::string> violations);
  const std::string& doc_id() const { return doc_id_; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::string doc_id_;
  std::vector<std::string> violations_;
};

struct ValidationOptions {
  // Gold split-antecedent data needs at least two antecedents per anaphor.
  // Auxiliary corpora (element-of, single-coref) carry one-antecedent items.
  std::size_t min_antecedents = 2;
};

// Empty iff every document invariant holds. Each entry names the rule and
// the offending ids.
std::vector<std::string> validate_document(const Document& doc,
                                           const ValidationOptions& options = {});

// Parses one interchange-format JSON object. Throws std::invalid_argument.
Document document_from_json(std::string_view line);
std::string document_to_json(const Document& doc);

Corpus load_corpus(const std::filesystem::path& path,
                   const ValidationOptions& options = {});
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Precomputed lookups over a document: id -> index, document order, and
// cluster membership. Mentions are ordered by (start, end), then file order.
class DocumentIndex {
 public:
  explicit DocumentIndex(const Document& doc);

  const Document& doc() const { return *doc_; }
  std::size_t mention_count() const { return order_.size(); }

  bool contains(std::string_view id) const;
  // Index into doc.mentions. Throws std::out_of_range for unknown ids.
  std::size_t index_of(std::string_view id) const;
  const Mention& mention(std::string_view id) const;

  // Mention indices sorted in document order.
  const std::vector<std::size_t>& order() const { return order_; }
  // Position of a mention (by index into doc.mentions) in document order.
  std::size_t rank(std::size_t mention_index) const { return rank_[mention_index]; }
  std::size_t rank_of(std::string_view id) const { return rank_[index_of(id)]; }

  // Cluster number per mention index, -1 when the mention is in no cluster.
  int cluster(std::size_t mention_index) const { return cluster_[mention_index]; }
  int cluster_of(std::string_view id) const { return cluster_[index_of(id)]; }

  bool precedes(std::string_view a, std::string_view b) const;

 private:
  const Document* doc_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
  std::vector<int> cluster_;
};

inline constexpr std::size_t kDefaultCandidateWindow = 250;

// Up to `window` mentions preceding `anaphor` in document order, nearest
// first. Throws std::out_of_range for an unknown anaphor.
std::vector<std::string> candidate_antecedents(const Document& doc,
                                               std::string_view anaphor,
                                               std::size_t window = kDefaultCandidateWindow);
std::vector<std::size_t> candidate_antecedents(const DocumentIndex& index,
                                               std::size_t anaphor_index,
                                               std::size_t window = kDefaultCandidateWindow);

// Cluster-mates of a split anaphor that follow all of its antecedents become
// split anaphors with the same antecedent set. Existing entries are kept.
Document extend_anaphors(const Document& doc);

}  // namespace splitres

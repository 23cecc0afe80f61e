#include "splitres/aux_builders.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

namespace splitres {

std::string_view to_string(AuxSource source) {
  switch (source) {
    case AuxSource::kPdSilver:
      return "pd-silver";
    case AuxSource::kPdCrowd:
      return "pd-crowd";
    case AuxSource::kElementOf:
      return "element-of";
    case AuxSource::kSingleCoref:
      return "single-coref";
  }
  return "pd-silver";
}

AuxSource parse_aux_source(std::string_view text) {
  if (text == "silver" || text == "pd-silver") return AuxSource::kPdSilver;
  if (text == "crowd" || text == "pd-crowd") return AuxSource::kPdCrowd;
  if (text == "element-of") return AuxSource::kElementOf;
  if (text == "single-coref") return AuxSource::kSingleCoref;
  throw std::invalid_argument("unknown auxiliary corpus kind: " + std::string(text));
}

namespace {

Document stripped(const Document& doc) {
  Document out;
  out.doc_id = doc.doc_id;
  out.tokens = doc.tokens;
  out.mentions = doc.mentions;
  out.clusters = doc.clusters;
  return out;
}

// Keeps antecedents that precede the anaphor, one per gold cluster, in
// document order.
std::vector<std::string> learnable_antecedents(const DocumentIndex& index,
                                               const std::string& anaphor,
                                               std::vector<std::string> antecedents) {
  std::sort(antecedents.begin(), antecedents.end(), [&](const auto& a, const auto& b) {
    return index.rank_of(a) < index.rank_of(b);
  });
  std::vector<std::string> out;
  std::set<int> clusters;
  const std::size_t anaphor_rank = index.rank_of(anaphor);
  for (auto& a : antecedents) {
    if (index.rank_of(a) >= anaphor_rank) continue;
    const int c = index.cluster_of(a);
    if (c >= 0 && !clusters.insert(c).second) continue;
    if (std::find(out.begin(), out.end(), a) != out.end()) continue;
    out.push_back(std::move(a));
  }
  return out;
}

AuxCorpus finish(Corpus corpus, AuxSource source, QualityTier tier, std::string name) {
  AuxCorpus aux;
  corpus.quality_tier = tier;
  corpus.name = std::move(name);
  aux.link_count = corpus.link_count();
  aux.corpus = std::move(corpus);
  aux.source = source;
  return aux;
}

}  // namespace

AuxCorpus build_silver(const Corpus& pd) {
  Corpus out;
  for (const auto& doc : pd.documents) {
    if (doc.split_anaphors.empty()) continue;
    Document d = stripped(doc);
    d.split_anaphors = doc.split_anaphors;
    out.documents.push_back(std::move(d));
  }
  return finish(std::move(out), AuxSource::kPdSilver, QualityTier::kSilver, "pd-silver");
}

std::vector<std::string> majority_vote(std::span<const CrowdAnnotation> annotations,
                                       const DocumentIndex& index) {
  if (annotations.empty()) throw std::invalid_argument("majority_vote: no annotations");
  const std::string& anaphor = annotations.front().anaphor;

  // Each candidate set as sorted document ranks.
  std::map<std::vector<std::size_t>, std::size_t> votes;
  std::map<std::size_t, std::size_t> link_votes;
  for (const auto& ann : annotations) {
    if (ann.anaphor != anaphor) {
      throw std::invalid_argument("majority_vote: annotations for different anaphors (" +
                                  anaphor + ", " + ann.anaphor + ")");
    }
    std::vector<std::size_t> ranks;
    for (const auto& id : ann.antecedents) ranks.push_back(index.rank_of(id));
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    if (ranks.size() < 2) {
      throw std::invalid_argument("majority_vote: annotation by " + ann.annotator + " for " +
                                  anaphor + " has fewer than 2 antecedents");
    }
    ++votes[ranks];
    for (std::size_t r : ranks) ++link_votes[r];
  }

  auto link_total = [&](const std::vector<std::size_t>& set) {
    std::size_t total = 0;
    for (std::size_t r : set) total += link_votes[r];
    return total;
  };
  // True if `a` holds the earliest mention on which a and b differ.
  auto earlier = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) {
        ++i;
        ++j;
      } else {
        return a[i] < b[j];
      }
    }
    return i < a.size();
  };

  const std::vector<std::size_t>* best = nullptr;
  std::size_t best_votes = 0, best_links = 0;
  for (const auto& [set, count] : votes) {
    const std::size_t links = link_total(set);
    bool better = best == nullptr || count > best_votes ||
                  (count == best_votes &&
                   (links > best_links || (links == best_links && earlier(set, *best))));
    if (better) {
      best = &set;
      best_votes = count;
      best_links = links;
    }
  }

  std::vector<std::string> out;
  for (std::size_t r : *best) out.push_back(index.doc().mentions[index.order()[r]].id);
  return out;
}

AuxCorpus build_crowd(const Corpus& pd_raw) {
  if (std::none_of(pd_raw.documents.begin(), pd_raw.documents.end(),
                   [](const Document& d) { return !d.crowd.empty(); })) {
    throw std::invalid_argument("corpus " + pd_raw.name + " has no crowd annotation layer");
  }
  Corpus out;
  for (const auto& doc : pd_raw.documents) {
    DocumentIndex index(doc);
    // Split-antecedent annotations grouped per anaphor, anaphors in document order.
    std::map<std::size_t, std::vector<CrowdAnnotation>> per_anaphor;
    for (const auto& ann : doc.crowd) {
      std::set<std::string> distinct(ann.antecedents.begin(), ann.antecedents.end());
      if (distinct.size() < 2) continue;
      per_anaphor[index.rank_of(ann.anaphor)].push_back(ann);
    }
    Document d = stripped(doc);
    for (const auto& [rank, anns] : per_anaphor) {
      const std::string& anaphor = anns.front().anaphor;
      auto antecedents = learnable_antecedents(index, anaphor, majority_vote(anns, index));
      if (antecedents.empty()) continue;
      d.split_anaphors.push_back({anaphor, std::move(antecedents)});
    }
    if (!d.split_anaphors.empty()) out.documents.push_back(std::move(d));
  }
  return finish(std::move(out), AuxSource::kPdCrowd, QualityTier::kNoisy, "pd-crowd");
}

AuxCorpus build_element_of(const Corpus& src) {
  if (std::none_of(src.documents.begin(), src.documents.end(),
                   [](const Document& d) { return !d.bridging.empty(); })) {
    throw std::invalid_argument("corpus " + src.name + " has no bridging layer");
  }
  Corpus out;
  for (const auto& doc : src.documents) {
    DocumentIndex index(doc);
    std::map<std::size_t, std::pair<std::string, std::vector<std::string>>> per_anaphor;
    for (const auto& link : doc.bridging) {
      if (link.relation == BridgingRelation::kOther) continue;
      // Both directions keep the annotated anaphor -> antecedent orientation:
      // element-of links a singular anaphor to a plural antecedent, the
      // inverse a plural anaphor to a singular antecedent.
      auto& entry = per_anaphor[index.rank_of(link.anaphor)];
      entry.first = link.anaphor;
      entry.second.push_back(link.antecedent);
    }
    Document d = stripped(doc);
    for (auto& [rank, entry] : per_anaphor) {
      auto antecedents = learnable_antecedents(index, entry.first, std::move(entry.second));
      if (antecedents.empty()) continue;
      d.split_anaphors.push_back({entry.first, std::move(antecedents)});
    }
    if (!d.split_anaphors.empty()) out.documents.push_back(std::move(d));
  }
  return finish(std::move(out), AuxSource::kElementOf, QualityTier::kGold, "element-of");
}

AuxCorpus build_single_coref(const Corpus& src) {
  Corpus out;
  for (const auto& doc : src.documents) {
    DocumentIndex index(doc);
    std::map<std::size_t, SplitAnaphor> links;
    for (const auto& cluster : doc.clusters) {
      if (cluster.size() < 2) continue;
      std::vector<std::string> ordered = cluster;
      std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        return index.rank_of(a) < index.rank_of(b);
      });
      for (std::size_t k = 1; k < ordered.size(); ++k) {
        links[index.rank_of(ordered[k])] = SplitAnaphor{ordered[k], {ordered[k - 1]}};
      }
    }
    if (links.empty()) continue;
    Document d = stripped(doc);
    for (auto& [rank, link] : links) d.split_anaphors.push_back(std::move(link));
    out.documents.push_back(std::move(d));
  }
  return finish(std::move(out), AuxSource::kSingleCoref, QualityTier::kGold, "single-coref");
}

AuxCorpus build_aux(AuxSource source, const Corpus& src) {
  switch (source) {
    case AuxSource::kPdSilver:
      return build_silver(src);
    case AuxSource::kPdCrowd:
      return build_crowd(src);
    case AuxSource::kElementOf:
      return build_element_of(src);
    case AuxSource::kSingleCoref:
      return build_single_coref(src);
  }
  throw std::invalid_argument("unknown auxiliary source");
}

LinkQuality corpus_quality(const Corpus& aux, const Corpus& gold) {
  using Link = std::tuple<std::string, std::string, int>;
  std::unordered_map<std::string, const Document*> gold_docs;
  for (const auto& doc : gold.documents) gold_docs.emplace(doc.doc_id, &doc);

  std::set<Link> gold_links;
  for (const auto& doc : gold.documents) {
    DocumentIndex index(doc);
    for (const auto& split : doc.split_anaphors) {
      for (const auto& a : split.antecedents) {
        gold_links.emplace(doc.doc_id, split.anaphor, index.cluster_of(a));
      }
    }
  }

  std::set<Link> aux_links;
  for (const auto& doc : aux.documents) {
    auto it = gold_docs.find(doc.doc_id);
    if (it == gold_docs.end()) {
      throw std::invalid_argument("corpus_quality: document " + doc.doc_id +
                                  " is not in the gold corpus");
    }
    DocumentIndex index(*it->second);
    for (const auto& split : doc.split_anaphors) {
      if (!index.contains(split.anaphor)) {
        throw std::invalid_argument("corpus_quality: mention " + split.anaphor +
                                    " not found in gold document " + doc.doc_id);
      }
      for (const auto& a : split.antecedents) {
        if (!index.contains(a)) {
          throw std::invalid_argument("corpus_quality: mention " + a +
                                      " not found in gold document " + doc.doc_id);
        }
        aux_links.emplace(doc.doc_id, split.anaphor, index.cluster_of(a));
      }
    }
  }

  LinkQuality q;
  q.aux_links = aux_links.size();
  q.gold_links = gold_links.size();
  for (const auto& link : aux_links) q.matched_links += gold_links.count(link);
  if (q.aux_links == 0 && q.gold_links == 0) {
    q.recall = q.precision = q.f1 = 1.0;
    return q;
  }
  q.recall = q.gold_links ? static_cast<double>(q.matched_links) / q.gold_links : 0.0;
  q.precision = q.aux_links ? static_cast<double>(q.matched_links) / q.aux_links : 0.0;
  q.f1 = q.recall + q.precision > 0 ? 2 * q.recall * q.precision / (q.recall + q.precision) : 0.0;
  return q;
}

std::string quality_to_json(const LinkQuality& q) {
  nlohmann::ordered_json j;
  j["recall"] = q.recall;
  j["precision"] = q.precision;
  j["f1"] = q.f1;
  j["link_counts"] = {{"aux", q.aux_links}, {"gold", q.gold_links}, {"matched", q.matched_links}};
  return j.dump(2);
}

}  // namespace splitres

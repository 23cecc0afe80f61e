#include "splitres/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "splitres/hash.hpp"
#include "splitres/rng.hpp"

namespace splitres {

namespace {

constexpr std::array<const char*, 3> kCues = {"they", "both", "them"};

struct Entity {
  bool plural = false;
  std::string head;    // head token for singular entities, cue for plural
  std::string marker;  // plural entities only
  std::vector<std::size_t> mentions;
  std::vector<std::string> antecedents;  // plural entities only
};

struct GenMention {
  std::size_t entity = 0;
  bool determiner = false;
  std::string slot;  // filler or marker; singular mentions only
  bool plural = false;

  std::size_t width() const { return plural ? 2 : (determiner ? 3 : 2); }
};

std::string numbered(const char* prefix, std::size_t n) { return prefix + std::to_string(n); }

std::size_t draw_count(Rng& rng, const std::array<double, 4>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (u < weights[k]) return k + 2;
    u -= weights[k];
  }
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0) return k + 2;
  }
  return 2;
}

void check_config(const SyntheticConfig& c) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("infeasible synthetic config: " + why);
  };
  if (c.tokens_per_doc == 0) fail("tokens_per_doc must be positive");
  if (c.mention_density < 0 || !std::isfinite(c.mention_density)) {
    fail("mention_density must be non-negative");
  }
  const auto n = static_cast<std::size_t>(std::llround(c.mention_density * c.tokens_per_doc));
  if (3 * n > c.tokens_per_doc) {
    fail("more mentions than tokens can hold (" + std::to_string(n) + " mentions of up to 3 tokens in " +
         std::to_string(c.tokens_per_doc) + " tokens)");
  }
  for (double p : {c.split_anaphor_rate, c.coref_rate, c.plural_distractor_rate, c.bridging_rate,
                   c.crowd_accuracy}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("rates must lie in [0, 1]");
  }
  double total = 0;
  for (double w : c.antecedent_count_weights) {
    if (!(w >= 0.0)) fail("antecedent_count_weights must be non-negative");
    total += w;
  }
  if (c.split_anaphor_rate > 0 && total <= 0) fail("antecedent_count_weights sum to zero");
  if (c.split_anaphor_rate > 0 && c.marker_count == 0) fail("marker_count must be positive");
  if (c.filler_vocab == 0 || c.head_vocab == 0) fail("vocabularies must be non-empty");
}

Document generate_document(const SyntheticConfig& c, const std::string& doc_id) {
  Rng rng(mix_seed(c.seed, doc_id));
  const auto n_mentions =
      static_cast<std::size_t>(std::llround(c.mention_density * c.tokens_per_doc));

  std::vector<Entity> entities;
  std::vector<GenMention> mentions;
  std::vector<std::size_t> marker_pool(c.marker_count);
  std::iota(marker_pool.begin(), marker_pool.end(), std::size_t{0});
  rng.shuffle(marker_pool);
  std::size_t markers_used = 0;

  std::vector<std::size_t> head_pool(c.head_vocab);
  std::iota(head_pool.begin(), head_pool.end(), std::size_t{0});
  rng.shuffle(head_pool);
  std::size_t heads_used = 0;

  auto filler = [&] { return numbered("w", rng.below(c.filler_vocab)); };

  std::size_t pending_count = 0;
  bool pending_attempt = false;

  for (std::size_t i = 0; i < n_mentions; ++i) {
    bool attempt = pending_attempt || (c.split_anaphor_rate > 0 && rng.bernoulli(c.split_anaphor_rate));
    if (attempt) {
      if (pending_count == 0) pending_count = draw_count(rng, c.antecedent_count_weights);
      // Earlier singular mentions with a free slot, grouped by entity.
      std::map<std::size_t, std::vector<std::size_t>> eligible;
      for (std::size_t m = 0; m < mentions.size(); ++m) {
        const auto& gm = mentions[m];
        if (!gm.plural && gm.slot.rfind("mk", 0) != 0) eligible[gm.entity].push_back(m);
      }
      if (markers_used < marker_pool.size() && eligible.size() >= pending_count) {
        std::vector<std::size_t> clusters;
        for (const auto& [e, _] : eligible) clusters.push_back(e);
        rng.shuffle(clusters);
        clusters.resize(pending_count);

        Entity plural;
        plural.plural = true;
        plural.head = kCues[rng.below(kCues.size())];
        plural.marker = numbered("mk", marker_pool[markers_used++]);
        std::vector<std::size_t> chosen;
        for (std::size_t e : clusters) {
          const auto& options = eligible[e];
          const std::size_t m = options[rng.below(options.size())];
          mentions[m].slot = plural.marker;
          chosen.push_back(m);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t m : chosen) plural.antecedents.push_back(numbered("m", m));
        plural.mentions.push_back(i);
        entities.push_back(std::move(plural));
        mentions.push_back({entities.size() - 1, false, {}, true});
        pending_count = 0;
        pending_attempt = false;
        continue;
      }
      pending_attempt = true;
    }

    if (!entities.empty() && rng.bernoulli(c.coref_rate)) {
      const std::size_t e = rng.below(entities.size());
      entities[e].mentions.push_back(i);
      if (entities[e].plural) {
        mentions.push_back({e, false, {}, true});
      } else {
        mentions.push_back({e, rng.bernoulli(0.5), filler(), false});
      }
      continue;
    }

    if (c.plural_distractor_rate > 0 && markers_used < marker_pool.size() &&
        rng.bernoulli(c.plural_distractor_rate)) {
      Entity plural;
      plural.plural = true;
      plural.head = kCues[rng.below(kCues.size())];
      plural.marker = numbered("mk", marker_pool[markers_used++]);
      plural.mentions.push_back(i);
      entities.push_back(std::move(plural));
      mentions.push_back({entities.size() - 1, false, {}, true});
      continue;
    }

    Entity entity;
    entity.head = heads_used < head_pool.size() ? numbered("h", head_pool[heads_used++])
                                                : numbered("h", rng.below(c.head_vocab));
    entity.mentions.push_back(i);
    entities.push_back(std::move(entity));
    mentions.push_back({entities.size() - 1, rng.bernoulli(0.5), filler(), false});
  }

  // Lay out tokens: filler gaps between mentions.
  std::size_t mention_tokens = 0;
  for (const auto& m : mentions) mention_tokens += m.width();
  std::vector<std::size_t> gaps(mentions.size() + 1, 0);
  for (std::size_t f = mention_tokens; f < c.tokens_per_doc; ++f) ++gaps[rng.below(gaps.size())];

  Document doc;
  doc.doc_id = doc_id;
  for (std::size_t m = 0; m <= mentions.size(); ++m) {
    for (std::size_t g = 0; g < gaps[m]; ++g) doc.tokens.push_back(filler());
    if (m == mentions.size()) break;
    const auto& gm = mentions[m];
    const auto& entity = entities[gm.entity];
    const int start = static_cast<int>(doc.tokens.size());
    if (gm.plural) {
      doc.tokens.push_back(entity.head);
      doc.tokens.push_back(entity.marker);
    } else {
      if (gm.determiner) doc.tokens.push_back("the");
      doc.tokens.push_back(entity.head);
      doc.tokens.push_back(gm.slot);
    }
    doc.mentions.push_back({numbered("m", m), start, static_cast<int>(doc.tokens.size()) - 1});
  }

  for (const auto& entity : entities) {
    std::vector<std::string> ids;
    for (std::size_t m : entity.mentions) ids.push_back(numbered("m", m));
    doc.clusters.push_back(std::move(ids));
    if (entity.plural && !entity.antecedents.empty()) {
      doc.split_anaphors.push_back({numbered("m", entity.mentions.front()), entity.antecedents});
    }
  }

  DocumentIndex index(doc);
  for (const auto& split : doc.split_anaphors) {
    if (c.bridging_rate > 0 && rng.bernoulli(c.bridging_rate)) {
      for (const auto& a : split.antecedents) {
        doc.bridging.push_back({split.anaphor, a, BridgingRelation::kElementOfInverse});
      }
    }
    const std::size_t anaphor_rank = index.rank_of(split.anaphor);
    for (std::size_t k = 0; k < c.crowd_annotators; ++k) {
      CrowdAnnotation ann{numbered("p", k), split.anaphor, split.antecedents};
      if (!rng.bernoulli(c.crowd_accuracy)) {
        // Swap one antecedent for a preceding mention of an unused cluster.
        std::set<int> used;
        for (const auto& a : split.antecedents) used.insert(index.cluster_of(a));
        used.insert(index.cluster_of(split.anaphor));
        std::vector<std::size_t> distractors;
        for (std::size_t r = 0; r < anaphor_rank; ++r) {
          const std::size_t mi = index.order()[r];
          if (!used.count(index.cluster(mi))) distractors.push_back(mi);
        }
        if (!distractors.empty()) {
          ann.antecedents[rng.below(ann.antecedents.size())] =
              doc.mentions[distractors[rng.below(distractors.size())]].id;
        }
      }
      doc.crowd.push_back(std::move(ann));
    }
  }
  return doc;
}

}  // namespace

Corpus generate_synthetic(const SyntheticConfig& config) {
  check_config(config);
  Corpus corpus;
  corpus.name = config.doc_prefix;
  corpus.quality_tier = QualityTier::kGold;
  corpus.documents.reserve(config.num_docs);
  for (std::size_t d = 0; d < config.num_docs; ++d) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-%04zu", d);
    corpus.documents.push_back(generate_document(config, config.doc_prefix + suffix));
  }
  return corpus;
}

SyntheticConfig synthetic_config_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  SyntheticConfig c;
  c.num_docs = j.value("num_docs", c.num_docs);
  c.tokens_per_doc = j.value("tokens_per_doc", c.tokens_per_doc);
  c.mention_density = j.value("mention_density", c.mention_density);
  c.split_anaphor_rate = j.value("split_anaphor_rate", c.split_anaphor_rate);
  if (auto it = j.find("antecedent_count_weights"); it != j.end()) {
    if (it->is_object()) {
      c.antecedent_count_weights = {0, 0, 0, 0};
      for (const auto& [k, v] : it->items()) {
        const int count = std::stoi(k);
        if (count < 2 || count > 5) {
          throw std::invalid_argument("antecedent counts must lie in 2..5, got " + k);
        }
        c.antecedent_count_weights[count - 2] = v.get<double>();
      }
    } else {
      const auto w = it->get<std::vector<double>>();
      if (w.size() != 4) throw std::invalid_argument("antecedent_count_weights needs 4 entries");
      std::copy(w.begin(), w.end(), c.antecedent_count_weights.begin());
    }
  }
  c.coref_rate = j.value("coref_rate", c.coref_rate);
  c.plural_distractor_rate = j.value("plural_distractor_rate", c.plural_distractor_rate);
  c.filler_vocab = j.value("filler_vocab", c.filler_vocab);
  c.head_vocab = j.value("head_vocab", c.head_vocab);
  c.marker_count = j.value("marker_count", c.marker_count);
  c.bridging_rate = j.value("bridging_rate", c.bridging_rate);
  c.crowd_annotators = j.value("crowd_annotators", c.crowd_annotators);
  c.crowd_accuracy = j.value("crowd_accuracy", c.crowd_accuracy);
  c.seed = j.value("seed", c.seed);
  c.doc_prefix = j.value("doc_prefix", c.doc_prefix);
  return c;
}

std::string synthetic_config_to_json(const SyntheticConfig& c) {
  nlohmann::ordered_json j;
  j["num_docs"] = c.num_docs;
  j["tokens_per_doc"] = c.tokens_per_doc;
  j["mention_density"] = c.mention_density;
  j["split_anaphor_rate"] = c.split_anaphor_rate;
  nlohmann::ordered_json w;
  for (std::size_t k = 0; k < 4; ++k) w[std::to_string(k + 2)] = c.antecedent_count_weights[k];
  j["antecedent_count_weights"] = w;
  j["coref_rate"] = c.coref_rate;
  j["plural_distractor_rate"] = c.plural_distractor_rate;
  j["filler_vocab"] = c.filler_vocab;
  j["head_vocab"] = c.head_vocab;
  j["marker_count"] = c.marker_count;
  j["bridging_rate"] = c.bridging_rate;
  j["crowd_annotators"] = c.crowd_annotators;
  j["crowd_accuracy"] = c.crowd_accuracy;
  j["seed"] = c.seed;
  j["doc_prefix"] = c.doc_prefix;
  return j.dump(2);
}

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats s;
  s.documents = corpus.documents.size();
  for (const auto& doc : corpus.documents) {
    s.tokens += doc.tokens.size();
    s.mentions += doc.mentions.size();
    s.clusters += doc.clusters.size();
    for (const auto& c : doc.clusters) s.non_singleton_clusters += c.size() > 1;
    s.split_anaphors += doc.split_anaphors.size();
    for (const auto& split : doc.split_anaphors) {
      s.antecedent_links += split.antecedents.size();
      ++s.antecedent_histogram[split.antecedents.size()];
    }
    s.bridging_links += doc.bridging.size();
    s.crowd_annotations += doc.crowd.size();
  }
  return s;
}

std::string stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["documents"] = s.documents;
  j["tokens"] = s.tokens;
  j["mentions"] = s.mentions;
  j["clusters"] = s.clusters;
  j["non_singleton_clusters"] = s.non_singleton_clusters;
  j["split_anaphors"] = s.split_anaphors;
  j["antecedent_links"] = s.antecedent_links;
  j["bridging_links"] = s.bridging_links;
  j["crowd_annotations"] = s.crowd_annotations;
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.antecedent_histogram) h[std::to_string(k)] = v;
  j["antecedent_histogram"] = h;
  return j.dump(2);
}

std::string stats_to_text(const CorpusStats& s) {
  std::ostringstream out;
  out << "documents        " << s.documents << '\n'
      << "tokens           " << s.tokens << '\n'
      << "mentions         " << s.mentions << '\n'
      << "clusters         " << s.clusters << " (" << s.non_singleton_clusters
      << " non-singleton)\n"
      << "split anaphors   " << s.split_anaphors << '\n'
      << "antecedent links " << s.antecedent_links << '\n'
      << "bridging links   " << s.bridging_links << '\n'
      << "crowd labels     " << s.crowd_annotations << '\n'
      << "antecedents per anaphor:\n";
  for (const auto& [k, v] : s.antecedent_histogram) {
    char line[64];
    const double pct = s.split_anaphors ? 100.0 * v / s.split_anaphors : 0.0;
    std::snprintf(line, sizeof(line), "  %zu: %6zu  (%5.1f%%)\n", k, v, pct);
    out << line;
  }
  return out.str();
}

}  // namespace splitres

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/params.hpp"

namespace splitres {

enum class ProviderKind { kTrainableLookup, kStaticLookup, kPrecomputedContextual, kCharConv };

std::string_view to_string(ProviderKind kind);

// Maps every token position of a document to a fixed-dimension vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual ProviderKind kind() const = 0;
  virtual std::size_t dim() const = 0;

  // tokens x dim()
  virtual Matrix forward(const Document& doc) const = 0;
  // Accumulates parameter gradients given d(loss)/d(output). Frozen
  // providers ignore it.
  virtual void backward(const Document& doc, const Matrix& grad) { (void)doc, (void)grad; }
};

// Word list with index 0 reserved for unknown words.
class Vocabulary {
 public:
  Vocabulary() : words_{"<unk>"} {}
  explicit Vocabulary(const std::vector<std::string>& words);

  static Vocabulary from_corpora(const std::vector<const Corpus*>& corpora);

  std::size_t size() const { return words_.size(); }
  std::size_t id(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
};

class TrainableLookup : public EmbeddingProvider {
 public:
  TrainableLookup(ParameterStore& store, const Vocabulary& vocab, std::size_t dim, Rng& rng);

  ProviderKind kind() const override { return ProviderKind::kTrainableLookup; }
  std::size_t dim() const override { return dim_; }
  Matrix forward(const Document& doc) const override;
  void backward(const Document& doc, const Matrix& grad) override;

 private:
  Vocabulary vocab_;
  std::size_t dim_;
  Parameter* table_;
};

// Frozen vectors read from a text file. Out-of-vocabulary tokens share one
// trained unknown vector.
class StaticLookup : public EmbeddingProvider {
 public:
  StaticLookup(ParameterStore& store, const std::filesystem::path& path);

  ProviderKind kind() const override { return ProviderKind::kStaticLookup; }
  std::size_t dim() const override { return dim_; }
  Matrix forward(const Document& doc) const override;
  void backward(const Document& doc, const Matrix& grad) override;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> ids_;
  Matrix table_;
  Parameter* unknown_;
};

// Frozen per-token vectors loaded from JSONL sidecars, one object per
// document: {"doc_id": ..., "vectors": [[...], ...]}. A document must be
// covered token for token.
class PrecomputedContextual : public EmbeddingProvider {
 public:
  PrecomputedContextual(const std::vector<std::string>& paths, std::size_t dim);

  ProviderKind kind() const override { return ProviderKind::kPrecomputedContextual; }
  std::size_t dim() const override { return dim_; }
  Matrix forward(const Document& doc) const override;

  void add_document(const std::string& doc_id, Matrix vectors);
  bool covers(const Document& doc) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Matrix> vectors_;
};

// Byte-level character convolution: embeddings, one filter bank per width,
// rectifier, max-pool over positions.
class CharConv : public EmbeddingProvider {
 public:
  CharConv(ParameterStore& store, std::size_t char_dim, std::vector<std::size_t> widths,
           std::size_t filters, Rng& rng);

  ProviderKind kind() const override { return ProviderKind::kCharConv; }
  std::size_t dim() const override { return widths_.size() * filters_; }
  Matrix forward(const Document& doc) const override;
  void backward(const Document& doc, const Matrix& grad) override;

  RowVector encode_token(std::string_view token) const;

 private:
  Matrix char_matrix(std::string_view token) const;

  std::size_t char_dim_;
  std::vector<std::size_t> widths_;
  std::size_t filters_;
  std::size_t max_width_;
  Parameter* chars_;
  std::vector<Parameter*> kernels_;
  std::vector<Parameter*> biases_;
};

}  // namespace splitres

#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "splitres/corpus.hpp"
#include "splitres/embeddings.hpp"
#include "splitres/lstm.hpp"
#include "splitres/model_config.hpp"
#include "splitres/params.hpp"

namespace splitres {

inline constexpr std::size_t kBucketCount = 9;

// [1], [2], [3], [4], [5-7], [8-15], [16-31], [32-63], [64+] -> 0..8.
// Throws std::invalid_argument for width < 1.
std::size_t width_bucket(std::size_t width);
// Same table over the number of mentions between anaphor and candidate.
std::size_t distance_bucket(std::size_t distance);

// Normalised attention weights softmax(alpha[begin..end]).
Vector attention_weights(const Vector& alpha, Eigen::Index begin, Eigen::Index end);

// Attention-weighted head of the span [begin, end] over token rows of
// `tokens`, given per-token attention logits `alpha`.
Vector head_attention(Eigen::Index begin, Eigen::Index end, const Matrix& tokens,
                      const Vector& alpha);

struct MentionRepr {
  Vector vector;  // [x_start; x_end; head; width embedding]
  Vector head;
  std::size_t width_bucket = 0;
};

MentionRepr mention_repr(Eigen::Index begin, Eigen::Index end, const Matrix& tokens,
                         const Vector& alpha, const Matrix& width_table);

// Token and mention encoder: providers -> BiLSTM -> span representations.
class MentionEncoder {
 public:
  struct Tape {
    Matrix provider_input;  // T x sum(provider dims)
    BiLstm::Tape lstm;
    Matrix tokens;  // T x token_dim
    Vector alpha;   // T
    std::vector<Vector> weights;  // per mention (doc.mentions order)
  };

  MentionEncoder(const ModelConfig& config, const Vocabulary& vocab, ParameterStore& store,
                 Rng& rng);
  // Uses the given providers instead of building them from the config.
  MentionEncoder(std::vector<std::unique_ptr<EmbeddingProvider>> providers,
                 const ModelConfig& config, ParameterStore& store, Rng& rng);

  std::size_t token_dim() const { return static_cast<std::size_t>(lstm_->output_dim()); }
  std::size_t mention_dim() const { return 3 * token_dim() + width_dim_; }
  const std::vector<std::unique_ptr<EmbeddingProvider>>& providers() const { return providers_; }
  // Width of the concatenated provider outputs fed to the context layer.
  std::size_t provider_dim() const;

  // Per-token representations x_t. Throws std::runtime_error when a provider
  // returns a shape different from its declared dimension.
  Matrix embed_tokens(const Document& doc, Tape* tape = nullptr) const;

  // Attention logits alpha_t for every token.
  Vector attention_logits(const Matrix& tokens) const;

  // Rows follow doc.mentions.
  Matrix encode_mentions(const Document& doc, Tape* tape = nullptr) const;

  // Accumulates gradients for d(loss)/d(mention rows).
  void backward(const Document& doc, const Tape& tape, const Matrix& d_mentions);

  const Matrix& width_table() const { return width_->value; }

 private:
  void build_layers(const ModelConfig& config, ParameterStore& store, Rng& rng);

  std::vector<std::unique_ptr<EmbeddingProvider>> providers_;
  std::unique_ptr<BiLstm> lstm_;
  Parameter* attention_w_;  // token_dim x 1
  Parameter* attention_b_;  // 1 x 1
  Parameter* width_;        // kBucketCount x width_dim
  std::size_t width_dim_;
};

}  // namespace splitres

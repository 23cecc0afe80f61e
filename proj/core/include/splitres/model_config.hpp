#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace splitres {

// Architecture settings. Defaults follow the usual configuration of the
// span-ranking coreference baseline; tests and desk-scale runs shrink them.
struct ModelConfig {
  // Trainable word lookup (0 disables it).
  std::size_t word_dim = 64;

  // Character convolution over UTF-8 bytes (0 filters disables it).
  std::size_t char_dim = 8;
  std::vector<std::size_t> char_widths = {3, 4, 5};
  std::size_t char_filters = 50;

  // Frozen word vectors in whitespace-separated text form ("word v1 ... vd").
  std::string static_embeddings;

  // Frozen precomputed contextual vectors (JSONL sidecars).
  std::vector<std::string> contextual_embeddings;
  std::size_t contextual_dim = 0;

  // Bidirectional context layer, hidden units per direction.
  std::size_t lstm_hidden = 200;

  std::size_t width_dim = 20;
  std::size_t distance_dim = 20;

  // Pair scorer: `ffnn_layers` rectified hidden layers, scalar output.
  std::size_t ffnn_hidden = 150;
  std::size_t ffnn_layers = 2;

  std::size_t window = 250;

  // Train on every mention (non-anaphors target the dummy antecedent) or on
  // split anaphors only.
  bool train_all_mentions = true;
};

}  // namespace splitres

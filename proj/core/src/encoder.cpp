#include "splitres/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace splitres {

std::size_t width_bucket(std::size_t width) {
  if (width < 1) throw std::invalid_argument("width_bucket: width must be at least 1");
  if (width <= 4) return width - 1;
  std::size_t bucket = 2;
  while (width > 1 && bucket < 64) {
    width >>= 1;
    ++bucket;
  }
  // floor(log2(w)) + 2 for w >= 5
  return std::min<std::size_t>(bucket, kBucketCount - 1);
}

std::size_t distance_bucket(std::size_t distance) {
  if (distance < 1) throw std::invalid_argument("distance_bucket: distance must be at least 1");
  return width_bucket(distance);
}

Vector attention_weights(const Vector& alpha, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index n = end - begin + 1;
  Vector w = alpha.segment(begin, n);
  w.array() -= w.maxCoeff();
  w = w.array().exp();
  w /= w.sum();
  return w;
}

Vector head_attention(Eigen::Index begin, Eigen::Index end, const Matrix& tokens,
                      const Vector& alpha) {
  const Vector w = attention_weights(alpha, begin, end);
  return tokens.middleRows(begin, end - begin + 1).transpose() * w;
}

MentionRepr mention_repr(Eigen::Index begin, Eigen::Index end, const Matrix& tokens,
                         const Vector& alpha, const Matrix& width_table) {
  const Eigen::Index d = tokens.cols();
  MentionRepr m;
  m.head = head_attention(begin, end, tokens, alpha);
  m.width_bucket = width_bucket(static_cast<std::size_t>(end - begin + 1));
  m.vector.resize(3 * d + width_table.cols());
  m.vector << tokens.row(begin).transpose(), tokens.row(end).transpose(), m.head,
      width_table.row(static_cast<Eigen::Index>(m.width_bucket)).transpose();
  return m;
}

MentionEncoder::MentionEncoder(const ModelConfig& config, const Vocabulary& vocab,
                               ParameterStore& store, Rng& rng) {
  if (config.word_dim > 0) {
    providers_.push_back(std::make_unique<TrainableLookup>(store, vocab, config.word_dim, rng));
  }
  if (!config.static_embeddings.empty()) {
    providers_.push_back(std::make_unique<StaticLookup>(store, config.static_embeddings));
  }
  if (!config.contextual_embeddings.empty()) {
    providers_.push_back(std::make_unique<PrecomputedContextual>(config.contextual_embeddings,
                                                                 config.contextual_dim));
  }
  if (config.char_filters > 0 && !config.char_widths.empty()) {
    providers_.push_back(std::make_unique<CharConv>(store, config.char_dim, config.char_widths,
                                                    config.char_filters, rng));
  }
  build_layers(config, store, rng);
}

MentionEncoder::MentionEncoder(std::vector<std::unique_ptr<EmbeddingProvider>> providers,
                               const ModelConfig& config, ParameterStore& store, Rng& rng)
    : providers_(std::move(providers)) {
  build_layers(config, store, rng);
}

void MentionEncoder::build_layers(const ModelConfig& config, ParameterStore& store, Rng& rng) {
  if (providers_.empty()) throw std::invalid_argument("encoder needs at least one embedding provider");
  if (config.lstm_hidden == 0) throw std::invalid_argument("lstm_hidden must be positive");
  lstm_ = std::make_unique<BiLstm>(store, "lstm", static_cast<Eigen::Index>(provider_dim()),
                                   static_cast<Eigen::Index>(config.lstm_hidden), rng);
  attention_w_ = &store.add("attention.w", lstm_->output_dim(), 1);
  attention_b_ = &store.add("attention.b", 1, 1);
  init_glorot(*attention_w_, rng);
  width_dim_ = config.width_dim;
  width_ = &store.add("embed.width", kBucketCount, static_cast<Eigen::Index>(width_dim_));
  init_uniform(*width_, 0.1, rng);
}

std::size_t MentionEncoder::provider_dim() const {
  std::size_t d = 0;
  for (const auto& p : providers_) d += p->dim();
  return d;
}

Matrix MentionEncoder::embed_tokens(const Document& doc, Tape* tape) const {
  const auto T = static_cast<Eigen::Index>(doc.tokens.size());
  Matrix input(T, static_cast<Eigen::Index>(provider_dim()));
  Eigen::Index col = 0;
  for (const auto& p : providers_) {
    Matrix block = p->forward(doc);
    if (block.rows() != T || block.cols() != static_cast<Eigen::Index>(p->dim())) {
      throw std::runtime_error(std::string(to_string(p->kind())) + " provider returned " +
                               std::to_string(block.rows()) + "x" + std::to_string(block.cols()) +
                               " for document " + doc.doc_id + ", expected " +
                               std::to_string(T) + "x" + std::to_string(p->dim()));
    }
    input.middleCols(col, block.cols()) = block;
    col += block.cols();
  }
  Matrix tokens = lstm_->forward(input, tape ? &tape->lstm : nullptr);
  if (tape) tape->provider_input = std::move(input);
  return tokens;
}

Vector MentionEncoder::attention_logits(const Matrix& tokens) const {
  Vector alpha = tokens * attention_w_->value.col(0);
  alpha.array() += attention_b_->value(0, 0);
  return alpha;
}

Matrix MentionEncoder::encode_mentions(const Document& doc, Tape* tape) const {
  Tape local;
  Tape& tp = tape ? *tape : local;
  tp.tokens = embed_tokens(doc, &tp);
  tp.alpha = attention_logits(tp.tokens);
  tp.weights.clear();
  tp.weights.reserve(doc.mentions.size());

  const Eigen::Index d = tp.tokens.cols();
  Matrix out(static_cast<Eigen::Index>(doc.mentions.size()),
             static_cast<Eigen::Index>(mention_dim()));
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto& m = doc.mentions[i];
    const auto row = static_cast<Eigen::Index>(i);
    Vector w = attention_weights(tp.alpha, m.start, m.end);
    out.block(row, 0, 1, d) = tp.tokens.row(m.start);
    out.block(row, d, 1, d) = tp.tokens.row(m.end);
    out.block(row, 2 * d, 1, d) =
        (tp.tokens.middleRows(m.start, m.end - m.start + 1).transpose() * w).transpose();
    out.block(row, 3 * d, 1, static_cast<Eigen::Index>(width_dim_)) = width_->value.row(
        static_cast<Eigen::Index>(width_bucket(static_cast<std::size_t>(m.end - m.start + 1))));
    tp.weights.push_back(std::move(w));
  }
  return out;
}

void MentionEncoder::backward(const Document& doc, const Tape& tape, const Matrix& d_mentions) {
  const Eigen::Index d = tape.tokens.cols();
  Matrix d_tokens = Matrix::Zero(tape.tokens.rows(), d);
  Vector d_alpha = Vector::Zero(tape.tokens.rows());

  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto& m = doc.mentions[i];
    const auto row = d_mentions.row(static_cast<Eigen::Index>(i));
    d_tokens.row(m.start) += row.segment(0, d);
    d_tokens.row(m.end) += row.segment(d, d);
    width_->grad.row(static_cast<Eigen::Index>(
        width_bucket(static_cast<std::size_t>(m.end - m.start + 1)))) +=
        row.segment(3 * d, static_cast<Eigen::Index>(width_dim_));

    const Vector d_head = row.segment(2 * d, d).transpose();
    const Vector& w = tape.weights[i];
    const Eigen::Index n = m.end - m.start + 1;
    const Vector s = tape.tokens.middleRows(m.start, n) * d_head;  // d_head . x_t
    const double mean = w.dot(s);
    d_tokens.middleRows(m.start, n) += w * d_head.transpose();
    d_alpha.segment(m.start, n) += w.cwiseProduct((s.array() - mean).matrix());
  }

  attention_w_->grad.col(0) += tape.tokens.transpose() * d_alpha;
  attention_b_->grad(0, 0) += d_alpha.sum();
  d_tokens += d_alpha * attention_w_->value.col(0).transpose();

  const Matrix d_input = lstm_->backward(tape.provider_input, tape.lstm, d_tokens);
  Eigen::Index col = 0;
  for (auto& p : providers_) {
    const auto dim = static_cast<Eigen::Index>(p->dim());
    p->backward(doc, d_input.middleCols(col, dim));
    col += dim;
  }
}

}  // namespace splitres

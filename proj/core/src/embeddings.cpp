#include "splitres/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace splitres {

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kTrainableLookup:
      return "trainable-lookup";
    case ProviderKind::kStaticLookup:
      return "static-lookup";
    case ProviderKind::kPrecomputedContextual:
      return "precomputed-contextual";
    case ProviderKind::kCharConv:
      return "char-conv";
  }
  return "trainable-lookup";
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  if (words.empty() || words.front() != "<unk>") {
    words_.push_back("<unk>");
  }
  for (const auto& w : words) words_.push_back(w);
  for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], i);
}

Vocabulary Vocabulary::from_corpora(const std::vector<const Corpus*>& corpora) {
  std::set<std::string> words;
  for (const Corpus* corpus : corpora) {
    for (const auto& doc : corpus->documents) words.insert(doc.tokens.begin(), doc.tokens.end());
  }
  words.erase("<unk>");
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
}

std::size_t Vocabulary::id(std::string_view word) const {
  if (ids_.empty()) return 0;
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// TrainableLookup

TrainableLookup::TrainableLookup(ParameterStore& store, const Vocabulary& vocab, std::size_t dim,
                                 Rng& rng)
    : vocab_(vocab), dim_(dim) {
  table_ = &store.add("embed.word", static_cast<Eigen::Index>(vocab.size()),
                      static_cast<Eigen::Index>(dim));
  init_uniform(*table_, 0.1, rng);
}

Matrix TrainableLookup::forward(const Document& doc) const {
  Matrix out(static_cast<Eigen::Index>(doc.tokens.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = table_->value.row(
        static_cast<Eigen::Index>(vocab_.id(doc.tokens[t])));
  }
  return out;
}

void TrainableLookup::backward(const Document& doc, const Matrix& grad) {
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    table_->grad.row(static_cast<Eigen::Index>(vocab_.id(doc.tokens[t]))) +=
        grad.row(static_cast<Eigen::Index>(t));
  }
}

// ---------------------------------------------------------------------------
// StaticLookup

StaticLookup::StaticLookup(ParameterStore& store, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open static embeddings: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (dim_ == 0) dim_ = values.size();
    if (values.size() != dim_ || dim_ == 0) {
      throw std::runtime_error("static embeddings " + path.string() + " line " +
                               std::to_string(line_no) + ": expected " + std::to_string(dim_) +
                               " values, got " + std::to_string(values.size()));
    }
    if (ids_.emplace(word, rows.size()).second) rows.push_back(std::move(values));
  }
  table_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      table_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  unknown_ = &store.add("embed.static_unk", 1, static_cast<Eigen::Index>(dim_));
}

Matrix StaticLookup::forward(const Document& doc) const {
  Matrix out(static_cast<Eigen::Index>(doc.tokens.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    auto it = ids_.find(doc.tokens[t]);
    out.row(static_cast<Eigen::Index>(t)) =
        it == ids_.end() ? RowVector(unknown_->value.row(0))
                         : RowVector(table_.row(static_cast<Eigen::Index>(it->second)));
  }
  return out;
}

void StaticLookup::backward(const Document& doc, const Matrix& grad) {
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    if (!ids_.count(doc.tokens[t])) unknown_->grad.row(0) += grad.row(static_cast<Eigen::Index>(t));
  }
}

// ---------------------------------------------------------------------------
// PrecomputedContextual

PrecomputedContextual::PrecomputedContextual(const std::vector<std::string>& paths,
                                             std::size_t dim)
    : dim_(dim) {
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open contextual embeddings: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const auto& rows = j.at("vectors");
        Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim_));
        for (std::size_t t = 0; t < rows.size(); ++t) {
          const auto& row = rows[t];
          if (row.size() != dim_) {
            throw std::runtime_error("token " + std::to_string(t) + " has dimension " +
                                     std::to_string(row.size()) + ", declared " +
                                     std::to_string(dim_));
          }
          for (std::size_t c = 0; c < dim_; ++c) {
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = row[c].get<double>();
          }
        }
        add_document(j.at("doc_id").get<std::string>(), std::move(m));
      } catch (const std::exception& e) {
        throw std::runtime_error("contextual embeddings " + path + " line " +
                                 std::to_string(line_no) + ": " + e.what());
      }
    }
  }
}

void PrecomputedContextual::add_document(const std::string& doc_id, Matrix vectors) {
  if (static_cast<std::size_t>(vectors.cols()) != dim_) {
    throw std::invalid_argument("contextual vectors for " + doc_id + " have dimension " +
                                std::to_string(vectors.cols()) + ", declared " +
                                std::to_string(dim_));
  }
  vectors_[doc_id] = std::move(vectors);
}

bool PrecomputedContextual::covers(const Document& doc) const {
  auto it = vectors_.find(doc.doc_id);
  return it != vectors_.end() &&
         static_cast<std::size_t>(it->second.rows()) == doc.tokens.size();
}

Matrix PrecomputedContextual::forward(const Document& doc) const {
  auto it = vectors_.find(doc.doc_id);
  if (it == vectors_.end()) {
    throw std::runtime_error("no contextual embeddings for document " + doc.doc_id);
  }
  if (static_cast<std::size_t>(it->second.rows()) != doc.tokens.size()) {
    throw std::runtime_error("contextual embeddings for " + doc.doc_id + " cover " +
                             std::to_string(it->second.rows()) + " of " +
                             std::to_string(doc.tokens.size()) + " tokens");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// CharConv

CharConv::CharConv(ParameterStore& store, std::size_t char_dim, std::vector<std::size_t> widths,
                   std::size_t filters, Rng& rng)
    : char_dim_(char_dim), widths_(std::move(widths)), filters_(filters) {
  if (widths_.empty()) throw std::invalid_argument("char convolution needs filter widths");
  max_width_ = *std::max_element(widths_.begin(), widths_.end());
  chars_ = &store.add("embed.char", 256, static_cast<Eigen::Index>(char_dim_));
  init_uniform(*chars_, 0.1, rng);
  for (std::size_t w : widths_) {
    const std::string suffix = std::to_string(w);
    kernels_.push_back(&store.add("charconv.w" + suffix, static_cast<Eigen::Index>(w * char_dim_),
                                  static_cast<Eigen::Index>(filters_)));
    init_glorot(*kernels_.back(), rng);
    biases_.push_back(&store.add("charconv.b" + suffix, 1, static_cast<Eigen::Index>(filters_)));
  }
}

// Character embeddings, zero-padded to at least the widest filter.
Matrix CharConv::char_matrix(std::string_view token) const {
  const std::size_t len = std::max(token.size(), max_width_);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(char_dim_));
  for (std::size_t i = 0; i < token.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) =
        chars_->value.row(static_cast<unsigned char>(token[i]));
  }
  return m;
}

namespace {

// Row i holds the flattened window chars[i .. i+width).
Matrix windows(const Matrix& chars, std::size_t width) {
  const Eigen::Index n = chars.rows() - static_cast<Eigen::Index>(width) + 1;
  const Eigen::Index d = chars.cols();
  Matrix out(n, static_cast<Eigen::Index>(width) * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < width; ++k) {
      out.block(i, static_cast<Eigen::Index>(k) * d, 1, d) = chars.row(i + static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

}  // namespace

RowVector CharConv::encode_token(std::string_view token) const {
  const Matrix chars = char_matrix(token);
  RowVector out(static_cast<Eigen::Index>(dim()));
  for (std::size_t k = 0; k < widths_.size(); ++k) {
    Matrix act = windows(chars, widths_[k]) * kernels_[k]->value;
    act.rowwise() += biases_[k]->value.row(0);
    out.segment(static_cast<Eigen::Index>(k * filters_), static_cast<Eigen::Index>(filters_)) =
        act.colwise().maxCoeff().cwiseMax(0.0);
  }
  return out;
}

Matrix CharConv::forward(const Document& doc) const {
  Matrix out(static_cast<Eigen::Index>(doc.tokens.size()), static_cast<Eigen::Index>(dim()));
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = encode_token(doc.tokens[t]);
  }
  return out;
}

void CharConv::backward(const Document& doc, const Matrix& grad) {
  const auto d = static_cast<Eigen::Index>(char_dim_);
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const std::string& token = doc.tokens[t];
    const Matrix chars = char_matrix(token);
    for (std::size_t k = 0; k < widths_.size(); ++k) {
      const std::size_t width = widths_[k];
      const Matrix win = windows(chars, width);
      Matrix act = win * kernels_[k]->value;
      act.rowwise() += biases_[k]->value.row(0);
      for (std::size_t f = 0; f < filters_; ++f) {
        const double g = grad(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k * filters_ + f));
        if (g == 0.0) continue;
        Eigen::Index best;
        const double peak = act.col(static_cast<Eigen::Index>(f)).maxCoeff(&best);
        if (peak <= 0.0) continue;
        const auto fi = static_cast<Eigen::Index>(f);
        kernels_[k]->grad.col(fi) += g * win.row(best).transpose();
        biases_[k]->grad(0, fi) += g;
        const Vector dwin = g * kernels_[k]->value.col(fi);
        for (std::size_t j = 0; j < width; ++j) {
          const std::size_t pos = static_cast<std::size_t>(best) + j;
          if (pos >= token.size()) break;
          chars_->grad.row(static_cast<unsigned char>(token[pos])) +=
              dwin.segment(static_cast<Eigen::Index>(j) * d, d).transpose();
        }
      }
    }
  }
}

}  // namespace splitres

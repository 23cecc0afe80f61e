#pragma once

#include <string>

#include "splitres/params.hpp"

namespace splitres {

// Single-direction LSTM over a sequence (rows of the input matrix). Gate
// layout in the stacked weights is input, forget, output, candidate.
class Lstm {
 public:
  struct Tape {
    Matrix gates;   // T x 4H, post-activation
    Matrix cells;   // T x H
    Matrix tanh_c;  // T x H
    Matrix hidden;  // T x H
  };

  Lstm(ParameterStore& store, const std::string& prefix, Eigen::Index input_dim,
       Eigen::Index hidden_dim, Rng& rng);

  Eigen::Index hidden_dim() const { return hidden_; }

  // Processes rows last-to-first when `reverse` is set; output row t is the
  // state after reading input row t either way.
  Matrix forward(const Matrix& input, bool reverse, Tape* tape) const;
  // Returns d(loss)/d(input) and accumulates parameter gradients.
  Matrix backward(const Matrix& input, const Tape& tape, const Matrix& d_hidden, bool reverse);

 private:
  Eigen::Index hidden_;
  Parameter* w_input_;   // D x 4H
  Parameter* w_hidden_;  // H x 4H
  Parameter* bias_;      // 1 x 4H
};

// Forward and backward LSTMs; row t of the output is [forward_t, backward_t].
class BiLstm {
 public:
  struct Tape {
    Lstm::Tape forward;
    Lstm::Tape backward;
  };

  BiLstm(ParameterStore& store, const std::string& prefix, Eigen::Index input_dim,
         Eigen::Index hidden_dim, Rng& rng);

  Eigen::Index output_dim() const { return 2 * forward_.hidden_dim(); }
  Matrix forward(const Matrix& input, Tape* tape) const;
  Matrix backward(const Matrix& input, const Tape& tape, const Matrix& d_output);

 private:
  Lstm forward_;
  Lstm backward_;
};

}  // namespace splitres

#include "splitres/lstm.hpp"

#include <cmath>

namespace splitres {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Lstm::Lstm(ParameterStore& store, const std::string& prefix, Eigen::Index input_dim,
           Eigen::Index hidden_dim, Rng& rng)
    : hidden_(hidden_dim) {
  w_input_ = &store.add(prefix + ".w_input", input_dim, 4 * hidden_dim);
  w_hidden_ = &store.add(prefix + ".w_hidden", hidden_dim, 4 * hidden_dim);
  bias_ = &store.add(prefix + ".bias", 1, 4 * hidden_dim);
  init_glorot(*w_input_, rng);
  init_glorot(*w_hidden_, rng);
  // Forget-gate bias of one.
  bias_->value.block(0, hidden_dim, 1, hidden_dim).setOnes();
}

Matrix Lstm::forward(const Matrix& input, bool reverse, Tape* tape) const {
  const Eigen::Index T = input.rows();
  const Eigen::Index H = hidden_;
  Matrix pre = input * w_input_->value;
  pre.rowwise() += bias_->value.row(0);

  Matrix hidden(T, H);
  Tape local;
  Tape& tp = tape ? *tape : local;
  tp.gates.resize(T, 4 * H);
  tp.cells.resize(T, H);
  tp.tanh_c.resize(T, H);

  RowVector h = RowVector::Zero(H);
  RowVector c = RowVector::Zero(H);
  for (Eigen::Index step = 0; step < T; ++step) {
    const Eigen::Index t = reverse ? T - 1 - step : step;
    RowVector z = pre.row(t) + h * w_hidden_->value;
    for (Eigen::Index k = 0; k < 3 * H; ++k) z(k) = sigmoid(z(k));
    for (Eigen::Index k = 3 * H; k < 4 * H; ++k) z(k) = std::tanh(z(k));
    c = z.segment(H, H).cwiseProduct(c) + z.segment(0, H).cwiseProduct(z.segment(3 * H, H));
    RowVector tc = c.array().tanh();
    h = z.segment(2 * H, H).cwiseProduct(tc);
    tp.gates.row(t) = z;
    tp.cells.row(t) = c;
    tp.tanh_c.row(t) = tc;
    hidden.row(t) = h;
  }
  tp.hidden = hidden;
  return hidden;
}

Matrix Lstm::backward(const Matrix& input, const Tape& tape, const Matrix& d_hidden,
                      bool reverse) {
  const Eigen::Index T = input.rows();
  const Eigen::Index H = hidden_;
  Matrix d_pre(T, 4 * H);
  RowVector dh_next = RowVector::Zero(H);
  RowVector dc_next = RowVector::Zero(H);

  for (Eigen::Index step = T - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? T - 1 - step : step;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    const bool has_prev = step > 0;

    const auto gates = tape.gates.row(t);
    const auto i = gates.segment(0, H).array();
    const auto f = gates.segment(H, H).array();
    const auto o = gates.segment(2 * H, H).array();
    const auto g = gates.segment(3 * H, H).array();
    const auto tc = tape.tanh_c.row(t).array();

    const RowVector dh = d_hidden.row(t) + dh_next;
    const Eigen::ArrayXXd dh_a = dh.array();
    Eigen::ArrayXXd dc = dc_next.array() + dh_a * o * (1.0 - tc * tc);
    RowVector c_prev = has_prev ? RowVector(tape.cells.row(prev)) : RowVector::Zero(H);

    RowVector dz(4 * H);
    dz.segment(0, H) = (dc * g * i * (1.0 - i)).matrix();
    dz.segment(H, H) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
    dz.segment(2 * H, H) = (dh_a * tc * o * (1.0 - o)).matrix();
    dz.segment(3 * H, H) = (dc * i * (1.0 - g * g)).matrix();
    d_pre.row(t) = dz;

    if (has_prev) {
      w_hidden_->grad += tape.hidden.row(prev).transpose() * dz;
    }
    dh_next = dz * w_hidden_->value.transpose();
    dc_next = (dc * f).matrix();
  }

  w_input_->grad += input.transpose() * d_pre;
  bias_->grad.row(0) += d_pre.colwise().sum();
  return d_pre * w_input_->value.transpose();
}

BiLstm::BiLstm(ParameterStore& store, const std::string& prefix, Eigen::Index input_dim,
               Eigen::Index hidden_dim, Rng& rng)
    : forward_(store, prefix + ".fwd", input_dim, hidden_dim, rng),
      backward_(store, prefix + ".bwd", input_dim, hidden_dim, rng) {}

Matrix BiLstm::forward(const Matrix& input, Tape* tape) const {
  const Eigen::Index H = forward_.hidden_dim();
  Matrix out(input.rows(), 2 * H);
  out.leftCols(H) = forward_.forward(input, false, tape ? &tape->forward : nullptr);
  out.rightCols(H) = backward_.forward(input, true, tape ? &tape->backward : nullptr);
  return out;
}

Matrix BiLstm::backward(const Matrix& input, const Tape& tape, const Matrix& d_output) {
  const Eigen::Index H = forward_.hidden_dim();
  Matrix d_input = forward_.backward(input, tape.forward, d_output.leftCols(H), false);
  d_input += backward_.backward(input, tape.backward, d_output.rightCols(H), true);
  return d_input;
}

}  // namespace splitres

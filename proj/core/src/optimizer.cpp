#include "splitres/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace splitres {

Adam::Adam(ParameterStore& store, OptimizerConfig config, std::size_t total_steps)
    : store_(&store), config_(config) {
  if (!(config_.learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (config_.clip_norm < 0) throw std::invalid_argument("clip norm must be non-negative");
  reset(total_steps);
}

void Adam::reset(std::size_t total_steps) {
  total_ = total_steps;
  t_ = 0;
  m_.clear();
  v_.clear();
  for (const auto& p : store_->all()) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

double Adam::learning_rate() const {
  if (total_ == 0) return config_.learning_rate;
  const double progress = std::min(1.0, static_cast<double>(t_) / static_cast<double>(total_));
  const double fraction = 1.0 - (1.0 - config_.final_lr_fraction) * progress;
  return config_.learning_rate * fraction;
}

double Adam::step() {
  const double norm = store_->grad_norm();
  if (config_.clip_norm > 0 && norm > config_.clip_norm) store_->scale_grad(config_.clip_norm / norm);

  const double lr = learning_rate();
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  std::size_t k = 0;
  for (auto& p : store_->all()) {
    Matrix& m = m_[k];
    Matrix& v = v_[k];
    ++k;
    m = config_.beta1 * m + (1 - config_.beta1) * p.grad;
    v = config_.beta2 * v + (1 - config_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.eps);
  }
  store_->zero_grad();
  return norm;
}

}  // namespace splitres

#include "splitres/params.hpp"

#include <cmath>
#include <stdexcept>

namespace splitres {

Parameter& ParameterStore::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter: " + name);
  params_.push_back({std::move(name), Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)});
  return params_.back();
}

bool ParameterStore::contains(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return true;
  }
  return false;
}

Parameter& ParameterStore::get(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no such parameter: " + std::string(name));
}

const Parameter& ParameterStore::get(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no such parameter: " + std::string(name));
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

double ParameterStore::grad_norm() const {
  double sq = 0;
  for (const auto& p : params_) sq += p.grad.squaredNorm();
  return std::sqrt(sq);
}

void ParameterStore::scale_grad(double factor) {
  for (auto& p : params_) p.grad *= factor;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void init_glorot(Parameter& p, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  init_uniform(p, limit, rng);
}

void init_uniform(Parameter& p, double scale, Rng& rng) {
  for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) p.value(r, c) = rng.uniform(-scale, scale);
  }
}

}  // namespace splitres

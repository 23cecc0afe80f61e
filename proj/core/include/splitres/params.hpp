#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "splitres/rng.hpp"

namespace splitres {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// A named trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns every trainable parameter of a model. Insertion order is stable and
// defines serialisation order. Addresses stay valid while the store lives.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  // Zero-initialised. Throws std::invalid_argument on duplicate names.
  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  bool contains(std::string_view name) const;
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;

  std::deque<Parameter>& all() { return params_; }
  const std::deque<Parameter>& all() const { return params_; }

  void zero_grad();
  double grad_norm() const;
  void scale_grad(double factor);
  std::size_t scalar_count() const;

 private:
  std::deque<Parameter> params_;
};

// Glorot/Xavier uniform over the matrix's fan-in and fan-out.
void init_glorot(Parameter& p, Rng& rng);
void init_uniform(Parameter& p, double scale, Rng& rng);

}  // namespace splitres

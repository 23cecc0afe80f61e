#pragma once

#include <cstddef>
#include <vector>

#include "splitres/params.hpp"

namespace splitres {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Global gradient-norm clip; 0 disables clipping.
  double clip_norm = 5.0;
  // Learning rate decays linearly to this fraction of its start value.
  double final_lr_fraction = 0.0;
};

// Adam with a linearly decaying learning rate and global-norm clipping.
class Adam {
 public:
  Adam(ParameterStore& store, OptimizerConfig config, std::size_t total_steps);

  const OptimizerConfig& config() const { return config_; }
  std::size_t steps_taken() const { return t_; }
  std::size_t total_steps() const { return total_; }

  double learning_rate() const;

  // Clips, applies one update from the accumulated gradients and zeroes them.
  // Returns the gradient norm before clipping.
  double step();

  // Clears moment estimates and the step counter.
  void reset(std::size_t total_steps);

 private:
  ParameterStore* store_;
  OptimizerConfig config_;
  std::size_t total_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace splitres

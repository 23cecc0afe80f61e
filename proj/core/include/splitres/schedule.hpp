#pragma once

#include <cstddef>
#include <vector>

#include "splitres/rng.hpp"

namespace splitres {

enum class CorpusChoice { kMain, kAux };

// Fixed main-corpus probability of the concatenation strategy.
inline constexpr double kConcatMainProbability = 0.5;

// Independent Bernoulli draw with p_main = 0.5.
CorpusChoice concat_next(Rng& rng);

// p_main(t) = t / T, clamped to 1 for t > T. T = 0 gives 1.
double annealing_p_main(std::size_t t, std::size_t total);

CorpusChoice annealing_next(std::size_t t, std::size_t total, Rng& rng);

// Uniform document order without replacement; reshuffles at every epoch
// boundary.
class EpochSampler {
 public:
  EpochSampler(std::size_t size, Rng& rng);

  std::size_t size() const { return order_.size(); }
  std::size_t epoch() const { return epoch_; }
  std::size_t next();

 private:
  void reshuffle();

  Rng* rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::size_t epoch_ = 0;
};

}  // namespace splitres

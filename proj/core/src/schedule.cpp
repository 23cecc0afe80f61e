#include "splitres/schedule.hpp"

#include <numeric>
#include <stdexcept>

namespace splitres {

CorpusChoice concat_next(Rng& rng) {
  return rng.bernoulli(kConcatMainProbability) ? CorpusChoice::kMain : CorpusChoice::kAux;
}

double annealing_p_main(std::size_t t, std::size_t total) {
  if (total == 0 || t >= total) return 1.0;
  return static_cast<double>(t) / static_cast<double>(total);
}

CorpusChoice annealing_next(std::size_t t, std::size_t total, Rng& rng) {
  return rng.bernoulli(annealing_p_main(t, total)) ? CorpusChoice::kMain : CorpusChoice::kAux;
}

EpochSampler::EpochSampler(std::size_t size, Rng& rng) : rng_(&rng), order_(size) {
  if (size == 0) throw std::invalid_argument("cannot sample from an empty corpus");
  reshuffle();
}

void EpochSampler::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  rng_->shuffle(order_);
  pos_ = 0;
}

std::size_t EpochSampler::next() {
  if (pos_ == order_.size()) {
    ++epoch_;
    reshuffle();
  }
  return order_[pos_++];
}

}  // namespace splitres

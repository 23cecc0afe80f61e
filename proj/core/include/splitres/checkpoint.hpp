#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "splitres/model.hpp"
#include "splitres/model_config.hpp"

namespace splitres {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_config_to_json(const ModelConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(std::string_view json);

// Hash of the canonical JSON form of an arbitrary configuration string.
std::string config_hash(std::string_view canonical_json);

struct CheckpointInfo {
  std::string config_hash;
  std::size_t step = 0;
  std::string stage;
};

void save_checkpoint(const CorefModel& model, const CheckpointInfo& info,
                     const std::filesystem::path& path);

// Rebuilds the model from the stored config and vocabulary, then restores
// every parameter. Throws CheckpointError on format or shape mismatch.
std::unique_ptr<CorefModel> load_checkpoint(const std::filesystem::path& path,
                                            CheckpointInfo* info = nullptr);

// Copies parameters into an existing model. Names and shapes must match
// exactly.
void restore_parameters(CorefModel& model, const std::filesystem::path& path,
                        CheckpointInfo* info = nullptr);

// In-memory parameter copy between two models of identical shape.
void copy_parameters(const CorefModel& from, CorefModel& to);

}  // namespace splitres

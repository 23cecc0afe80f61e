#include "splitres/checkpoint.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "splitres/hash.hpp"

namespace splitres {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "splitres-checkpoint";

ordered_json config_json(const ModelConfig& c) {
  ordered_json j;
  j["word_dim"] = c.word_dim;
  j["char_dim"] = c.char_dim;
  j["char_widths"] = c.char_widths;
  j["char_filters"] = c.char_filters;
  j["static_embeddings"] = c.static_embeddings;
  j["contextual_embeddings"] = c.contextual_embeddings;
  j["contextual_dim"] = c.contextual_dim;
  j["lstm_hidden"] = c.lstm_hidden;
  j["width_dim"] = c.width_dim;
  j["distance_dim"] = c.distance_dim;
  j["ffnn_hidden"] = c.ffnn_hidden;
  j["ffnn_layers"] = c.ffnn_layers;
  j["window"] = c.window;
  j["train_all_mentions"] = c.train_all_mentions;
  return j;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

void restore_from(CorefModel& model, const ordered_json& j) {
  const auto& params = j.at("params");
  std::set<std::string> seen;
  for (auto& p : model.params().all()) {
    if (!params.contains(p.name)) throw CheckpointError("checkpoint lacks parameter " + p.name);
    const auto& e = params.at(p.name);
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw CheckpointError("dimension mismatch for " + p.name + ": checkpoint " +
                            std::to_string(rows) + "x" + std::to_string(cols) + ", model " +
                            std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    }
    const auto& data = e.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw CheckpointError("wrong value count for " + p.name);
    }
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) p.value(r, c) = data[static_cast<std::size_t>(k++)].get<double>();
    }
    p.grad.setZero();
    seen.insert(p.name);
  }
  for (const auto& item : params.items()) {
    if (!seen.count(item.key())) throw CheckpointError("unexpected parameter " + item.key());
  }
}

void fill_info(const ordered_json& j, CheckpointInfo* info) {
  if (!info) return;
  info->config_hash = j.value("config_hash", "");
  info->step = j.value("step", std::size_t{0});
  info->stage = j.value("stage", "");
}

void check_header(const ordered_json& j, const std::filesystem::path& path) {
  if (j.value("format", "") != kFormat) throw CheckpointError(path.string() + " is not a checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version in " + path.string());
  }
}

}  // namespace

std::string model_config_to_json(const ModelConfig& config) { return config_json(config).dump(); }

ModelConfig model_config_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("model config must be a JSON object");
  ModelConfig c;
  const ordered_json known = config_json(c);
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw std::invalid_argument("unknown model config key: " + item.key());
    }
  }
  try {
    read_field(j, "word_dim", c.word_dim);
    read_field(j, "char_dim", c.char_dim);
    read_field(j, "char_widths", c.char_widths);
    read_field(j, "char_filters", c.char_filters);
    read_field(j, "static_embeddings", c.static_embeddings);
    read_field(j, "contextual_embeddings", c.contextual_embeddings);
    read_field(j, "contextual_dim", c.contextual_dim);
    read_field(j, "lstm_hidden", c.lstm_hidden);
    read_field(j, "width_dim", c.width_dim);
    read_field(j, "distance_dim", c.distance_dim);
    read_field(j, "ffnn_hidden", c.ffnn_hidden);
    read_field(j, "ffnn_layers", c.ffnn_layers);
    read_field(j, "window", c.window);
    read_field(j, "train_all_mentions", c.train_all_mentions);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad model config value: ") + e.what());
  }
  if (c.lstm_hidden == 0) throw std::invalid_argument("lstm_hidden must be positive");
  if (c.window == 0) throw std::invalid_argument("window must be positive");
  return c;
}

std::string config_hash(std::string_view canonical_json) { return hex64(fnv1a64(canonical_json)); }

void save_checkpoint(const CorefModel& model, const CheckpointInfo& info,
                     const std::filesystem::path& path) {
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = info.config_hash;
  j["step"] = info.step;
  j["stage"] = info.stage;
  j["model"] = config_json(model.config());
  j["vocabulary"] = model.vocabulary().words();
  ordered_json params = ordered_json::object();
  for (const auto& p : model.params().all()) {
    ordered_json e;
    e["rows"] = p.value.rows();
    e["cols"] = p.value.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(p.value.size()));
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) data.push_back(p.value(r, c));
    }
    e["data"] = std::move(data);
    params[p.name] = std::move(e);
  }
  j["params"] = std::move(params);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

std::unique_ptr<CorefModel> load_checkpoint(const std::filesystem::path& path,
                                            CheckpointInfo* info) {
  const ordered_json j = read_json(path);
  check_header(j, path);
  ModelConfig config;
  try {
    config = model_config_from_json(j.at("model").dump());
  } catch (const std::exception& e) {
    throw CheckpointError("bad model config in " + path.string() + ": " + e.what());
  }
  auto model = std::make_unique<CorefModel>(
      config, Vocabulary(j.at("vocabulary").get<std::vector<std::string>>()), 0);
  restore_from(*model, j);
  fill_info(j, info);
  return model;
}

void restore_parameters(CorefModel& model, const std::filesystem::path& path,
                        CheckpointInfo* info) {
  const ordered_json j = read_json(path);
  check_header(j, path);
  restore_from(model, j);
  fill_info(j, info);
}

void copy_parameters(const CorefModel& from, CorefModel& to) {
  const auto& src = from.params().all();
  auto& dst = to.params().all();
  if (src.size() != dst.size()) throw CheckpointError("parameter count mismatch");
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (src[k].name != dst[k].name || src[k].value.rows() != dst[k].value.rows() ||
        src[k].value.cols() != dst[k].value.cols()) {
      throw CheckpointError("dimension mismatch for " + dst[k].name);
    }
    dst[k].value = src[k].value;
  }
}

}  // namespace splitres

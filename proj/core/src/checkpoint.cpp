#include "proxpool/checkpoint.hpp"

#include "proxpool/errors.hpp"
#include "json_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace proxpool {

using nlohmann::json;

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json params = json::object();
  for (const auto& [name, p] : ckpt.net.params) params[name] = detail::matrix_to_json(p.value);
  json doc = {
      {"format", "proxpool-checkpoint"},
      {"version", kCheckpointVersion},
      {"model", detail::model_config_to_json(ckpt.net.config)},
      {"meta",
       {{"dataset", ckpt.meta.dataset},
        {"split_seed", ckpt.meta.split_seed},
        {"selected_epoch", ckpt.meta.selected_epoch}}},
      {"adam_step", ckpt.net.params.step},
      {"params", params},
  };
  return doc.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError("checkpoint", 0, e.what());
  }
  if (doc.value("format", "") != "proxpool-checkpoint") {
    throw FormatError("checkpoint", 0, "not a proxpool checkpoint");
  }
  const int version = doc.value("version", 0);
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint", 0, "unsupported checkpoint version " + std::to_string(version));
  }
  try {
    Checkpoint ckpt;
    ckpt.net.config = detail::model_config_from_json(doc.at("model"));
    ckpt.net.config.validate();
    const json& meta = doc.at("meta");
    ckpt.meta.dataset = meta.at("dataset").get<std::string>();
    ckpt.meta.split_seed = meta.at("split_seed").get<std::uint64_t>();
    ckpt.meta.selected_epoch = meta.at("selected_epoch").get<std::size_t>();
    for (const auto& [name, value] : doc.at("params").items()) {
      ckpt.net.params.add(name, detail::matrix_from_json(value));
    }
    ckpt.net.params.step = doc.at("adam_step").get<std::int64_t>();

    const ProxPoolNet reference = init_network(ckpt.net.config, 0);
    for (const auto& [name, p] : reference.params) {
      const Matrix& got = ckpt.net.params.value(name);
      if (got.rows() != p.value.rows() || got.cols() != p.value.cols()) {
        throw FormatError("checkpoint", 0, "parameter '" + name + "' has the wrong shape");
      }
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw FormatError("checkpoint", 0, e.what());
  } catch (const ContractError& e) {
    throw FormatError("checkpoint", 0, e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string(), "cannot write checkpoint");
  out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), "cannot open checkpoint");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace proxpool

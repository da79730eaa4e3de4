#include "stylecodec/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "stylecodec/errors.hpp"

namespace stylecodec {

using nlohmann::json;

TrainConfig paper_scale_config() {
  TrainConfig cfg;
  cfg.image_size = 128;
  cfg.c_ch = 64;
  cfg.s_ch = 32;
  cfg.batch_size = 300;
  return cfg;
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out, bool& seen) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("malformed config: bad value for key '") + key + "'");
  }
  seen = true;
}

}  // namespace

TrainConfig parse_config(const std::string& text) {
  TrainConfig cfg;

  // An empty (or whitespace-only) file selects the defaults.
  bool blank = true;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
      break;
    }
  if (blank) return cfg;

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("malformed config: top level must be an object");

  static const std::vector<std::string> known = {
      "schema_version", "image_size",      "c_ch",          "s_ch",
      "lambda_s",       "lambda_c",        "lambda_tri",    "lambda_cycle",
      "margin_content", "margin_style",    "lr_initial",    "lr_decay_factor",
      "lr_decay_every", "batch_size",      "epochs",        "seed",
      "descriptor_weights_path"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("malformed config: unknown key '" + it.key() + "'");
  }

  bool seen = false;
  read_key(j, "schema_version", cfg.schema_version, seen);
  if (seen && cfg.schema_version != 1)
    throw SchemaError("unsupported config schema_version " + std::to_string(cfg.schema_version));
  read_key(j, "image_size", cfg.image_size, seen);
  read_key(j, "c_ch", cfg.c_ch, seen);
  read_key(j, "s_ch", cfg.s_ch, seen);
  read_key(j, "lambda_s", cfg.lambda_s, seen);
  read_key(j, "lambda_c", cfg.lambda_c, seen);
  read_key(j, "lambda_tri", cfg.lambda_tri, seen);
  read_key(j, "lambda_cycle", cfg.lambda_cycle, seen);
  read_key(j, "margin_content", cfg.margin_content, seen);
  read_key(j, "margin_style", cfg.margin_style, seen);
  read_key(j, "lr_initial", cfg.lr_initial, seen);
  read_key(j, "lr_decay_factor", cfg.lr_decay_factor, seen);
  read_key(j, "lr_decay_every", cfg.lr_decay_every, seen);
  read_key(j, "batch_size", cfg.batch_size, seen);
  read_key(j, "epochs", cfg.epochs, seen);
  read_key(j, "seed", cfg.seed, seen);
  if (j.contains("descriptor_weights_path") && !j["descriptor_weights_path"].is_null()) {
    std::string p;
    bool s2 = false;
    read_key(j, "descriptor_weights_path", p, s2);
    cfg.descriptor_weights_path = p;
  }

  validate_config(cfg);
  return cfg;
}

void validate_config(const TrainConfig& cfg) {
  std::vector<std::string> faults;
  if (cfg.image_size <= 0 || cfg.image_size % 8 != 0)
    faults.push_back("image_size must be a positive multiple of 8");
  if (cfg.c_ch < 1) faults.push_back("c_ch must be >= 1");
  if (cfg.s_ch < 1) faults.push_back("s_ch must be >= 1");
  if (cfg.lambda_s < 0) faults.push_back("lambda_s must be >= 0");
  if (cfg.lambda_c < 0) faults.push_back("lambda_c must be >= 0");
  if (cfg.lambda_tri < 0) faults.push_back("lambda_tri must be >= 0");
  if (cfg.lambda_cycle < 0) faults.push_back("lambda_cycle must be >= 0");
  if (cfg.margin_content < 0) faults.push_back("margin_content must be >= 0");
  if (cfg.margin_style < 0) faults.push_back("margin_style must be >= 0");
  if (!(cfg.lr_initial > 0)) faults.push_back("lr_initial must be > 0");
  if (!(cfg.lr_decay_factor > 0 && cfg.lr_decay_factor < 1))
    faults.push_back("lr_decay_factor must be in (0,1)");
  if (cfg.lr_decay_every < 1) faults.push_back("lr_decay_every must be >= 1");
  if (cfg.batch_size < 2) faults.push_back("batch_size must be >= 2");
  if (cfg.epochs < 0) faults.push_back("epochs must be >= 0");
  if (!faults.empty()) {
    std::string msg = "invalid config:";
    for (const auto& f : faults) msg += " " + f + ";";
    throw ValidationError(msg);
  }
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const TrainConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["image_size"] = cfg.image_size;
  j["c_ch"] = cfg.c_ch;
  j["s_ch"] = cfg.s_ch;
  j["lambda_s"] = cfg.lambda_s;
  j["lambda_c"] = cfg.lambda_c;
  j["lambda_tri"] = cfg.lambda_tri;
  j["lambda_cycle"] = cfg.lambda_cycle;
  j["margin_content"] = cfg.margin_content;
  j["margin_style"] = cfg.margin_style;
  j["lr_initial"] = cfg.lr_initial;
  j["lr_decay_factor"] = cfg.lr_decay_factor;
  j["lr_decay_every"] = cfg.lr_decay_every;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  if (cfg.descriptor_weights_path)
    j["descriptor_weights_path"] = *cfg.descriptor_weights_path;
  else
    j["descriptor_weights_path"] = nullptr;
  return j.dump(2);
}

void save_config(const TrainConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << dump_config(cfg) << "\n";
}

}  // namespace stylecodec

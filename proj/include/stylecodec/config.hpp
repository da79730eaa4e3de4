#ifndef STYLECODEC_CONFIG_HPP_
#define STYLECODEC_CONFIG_HPP_

#include <optional>
#include <string>

namespace stylecodec {

/// Every training hyperparameter in one validated record. Defaults are the
/// published ones where a published value exists; shapes default to the
/// desk-scale preset (32x32 images, 16/8 code channels).
struct TrainConfig {
  int schema_version = 1;
  int image_size = 32;
  int c_ch = 16;
  int s_ch = 8;
  double lambda_s = 1.0;
  double lambda_c = 1.0;
  double lambda_tri = 1.0;
  double lambda_cycle = 0.01;
  double margin_content = 1.0;
  double margin_style = 5.0;
  double lr_initial = 5e-4;
  double lr_decay_factor = 0.2;
  int lr_decay_every = 30;
  int batch_size = 16;
  int epochs = 100;
  long long seed = 1;
  std::optional<std::string> descriptor_weights_path;

  bool operator==(const TrainConfig&) const = default;
};

/// Paper-scale preset: 128x128 images, 64/32 code channels, batch 300.
TrainConfig paper_scale_config();

/// Parses a JSON config file. Every key is optional; unknown keys and wrong
/// value types raise ConfigError naming the key, invariant violations raise
/// ValidationError listing every violation. An empty file means "all
/// defaults".
TrainConfig load_config(const std::string& path);

/// Parses config text (same rules as load_config).
TrainConfig parse_config(const std::string& text);

/// Throws ValidationError listing every violated invariant.
void validate_config(const TrainConfig& cfg);

/// Canonical JSON serialization; parse(dump(cfg)) == cfg.
std::string dump_config(const TrainConfig& cfg);

void save_config(const TrainConfig& cfg, const std::string& path);

}  // namespace stylecodec

#endif  // STYLECODEC_CONFIG_HPP_

#ifndef STYLECODEC_DESCRIPTOR_HPP_
#define STYLECODEC_DESCRIPTOR_HPP_

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "stylecodec/nn.hpp"
#include "stylecodec/tensor.hpp"

namespace stylecodec {

/// Topology of the frozen feature network: a VGG16-style prefix of five conv
/// stages with conv counts (2, 2, 3, 3, 1), 3x3 kernels, ReLU after every
/// conv and 2x2 max pooling between stages. Channel widths are free; the
/// desk preset keeps the desk-scale training run cheap while the vgg16
/// preset matches the published widths for use with real weights.
struct DescriptorSpec {
  std::vector<std::vector<int>> stage_widths;

  static DescriptorSpec vgg16();  // 64/128/256/512/512
  static DescriptorSpec desk();   // 16/32/64/96/96

  void validate() const;
  std::string topology_hash() const;

  /// The seven activations the losses may tap.
  static const std::set<std::string>& allowed_taps();
  /// Gram-based reconstruction taps: relu1_2, relu2_2, relu3_3, relu4_3.
  static const std::vector<std::string>& style_taps();
  /// Feature-map reconstruction taps: relu3_1, relu4_1, relu5_1.
  static const std::vector<std::string>& content_taps();

  bool operator==(const DescriptorSpec&) const = default;
};

/// Named intermediate activations, keyed by tap name.
using FeatureTaps = std::map<std::string, Tensor>;

/// The frozen descriptor network. Parameters are fixed at construction
/// (random He init or a weights file) and never receive gradients; only the
/// input does.
class Descriptor {
 public:
  Descriptor(const DescriptorSpec& spec, std::uint64_t seed);

  /// Full forward pass with everything backward_to_input needs.
  struct Trace {
    Tensor input_grad_scale_applied;  // normalized input fed to conv1_1
    std::vector<std::vector<nn::Conv2d::Cache>> conv_caches;
    std::vector<std::vector<nn::LeakyReLU::Cache>> relu_caches;
    std::vector<std::vector<Tensor>> activations;  // post-ReLU
    std::vector<nn::MaxPool2::Cache> pool_caches;
  };

  Trace forward(const Tensor& img) const;

  /// Post-ReLU activation of a tap inside a completed trace.
  const Tensor& tap(const Trace& trace, const std::string& name) const;

  FeatureTaps extract_taps(const Tensor& img, const std::set<std::string>& taps) const;

  /// Chain rule from per-tap gradients down to the input image. Parameters
  /// stay untouched.
  Tensor backward_to_input(const Trace& trace, const std::map<std::string, Tensor>& tap_grads) const;

  /// Spatial size of a tap for a given input size; pure topology arithmetic.
  static int tap_spatial(int input_size, const std::string& name);
  /// Channel count of a tap under this spec.
  int tap_channels(const std::string& name) const;

  const DescriptorSpec& spec() const { return spec_; }
  std::uint64_t checksum() const;

  /// Read access for independent re-implementations in tests.
  const std::vector<std::vector<nn::Conv2d>>& stages() const { return stages_; }
  const std::array<double, 3>& input_mean() const { return input_mean_; }
  const std::array<double, 3>& input_std() const { return input_std_; }

  void set_input_normalization(const std::array<double, 3>& mean, const std::array<double, 3>& stddev);

 private:
  DescriptorSpec spec_;
  std::vector<std::vector<nn::Conv2d>> stages_;
  std::array<double, 3> input_mean_{0.0, 0.0, 0.0};
  std::array<double, 3> input_std_{1.0, 1.0, 1.0};

  static std::pair<int, int> parse_tap(const std::string& name);  // (stage, conv), 1-based
};

/// Builds a frozen descriptor: He-initialized from `seed`, or loaded from a
/// weights file when `weights_path` is given (the file's topology must match
/// `spec`).
Descriptor build_descriptor(const DescriptorSpec& spec, std::uint64_t seed,
                            const std::string* weights_path = nullptr);

/// Weights container: magic + schema version + metadata (topology, hash,
/// normalization constants) + named parameter tensors.
void save_descriptor_weights(const Descriptor& d, const std::string& path);
Descriptor load_descriptor_weights(const DescriptorSpec& spec, const std::string& path);

}  // namespace stylecodec

#endif  // STYLECODEC_DESCRIPTOR_HPP_

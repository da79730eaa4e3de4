#ifndef STYLECODEC_CODEC_HPP_
#define STYLECODEC_CODEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "stylecodec/nn.hpp"
#include "stylecodec/tensor.hpp"

namespace stylecodec {

/// Residual unit: conv-IN-LReLU-conv-IN plus a (possibly projected) shortcut,
/// LReLU after the sum. The first conv carries the stride.
struct ResBlock {
  nn::Conv2d conv1, conv2;
  nn::InstanceNorm norm1, norm2;
  bool project = false;
  nn::Conv2d skip_conv;
  nn::InstanceNorm skip_norm;
  nn::LeakyReLU act{0.2};

  ResBlock() = default;
  ResBlock(int in_c, int out_c, int stride);

  struct Cache {
    nn::Conv2d::Cache c1, c2, cs;
    nn::InstanceNorm::Cache n1, n2, ns;
    nn::LeakyReLU::Cache a1, a_out;
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& gy) const;
  void init(Rng& rng);
  void collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out);
};

/// Deep content path: conv stem plus three residual stages (two blocks each,
/// stride 2 at stage entry), 8x spatial reduction, c_ch output channels.
struct ContentEncoder {
  nn::Conv2d stem;
  nn::InstanceNorm stem_norm;
  nn::LeakyReLU act{0.2};
  std::vector<ResBlock> blocks;  // 6 = 3 stages x 2

  ContentEncoder() = default;
  ContentEncoder(int c_ch, int base_width);

  struct Cache {
    nn::Conv2d::Cache stem_c;
    nn::InstanceNorm::Cache stem_n;
    nn::LeakyReLU::Cache stem_a;
    std::vector<ResBlock::Cache> blocks;
  };

  Tensor forward(const Tensor& img, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& g_code) const;
  void init(Rng& rng);
  void collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out);
};

/// Shallow style path: four conv-IN-LReLU layers with strides 2,2,2,1, the
/// same 8x reduction, s_ch output channels.
struct StyleEncoder {
  std::vector<nn::Conv2d> convs;
  std::vector<nn::InstanceNorm> norms;
  nn::LeakyReLU act{0.2};

  StyleEncoder() = default;
  StyleEncoder(int s_ch, int base_width);

  struct Cache {
    std::vector<nn::Conv2d::Cache> c;
    std::vector<nn::InstanceNorm::Cache> n;
    std::vector<nn::LeakyReLU::Cache> a;
  };

  Tensor forward(const Tensor& img, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& g_code) const;
  void init(Rng& rng);
  void collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out);
};

/// Decoder: three (nearest-neighbor x2 upsample, conv, IN, LReLU) stages on
/// the concatenated codes, then a final conv + sigmoid into [0,1].
struct Decoder {
  std::vector<nn::Conv2d> convs;  // 3 stage convs + final
  std::vector<nn::InstanceNorm> norms;
  nn::Upsample2 up;
  nn::LeakyReLU act{0.2};

  Decoder() = default;
  Decoder(int code_ch, int w1, int w2, int w3);

  struct Cache {
    std::vector<nn::Conv2d::Cache> c;
    std::vector<nn::InstanceNorm::Cache> n;  // exposed: n[i].xhat holds pre-affine activations
    std::vector<nn::LeakyReLU::Cache> a;
    Tensor sigmoid_out;
  };

  Tensor forward(const Tensor& codes, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& g_img) const;
  void init(Rng& rng);
  void collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out);
};

/// Width configuration of the trainable model.
struct CodecDims {
  int image_size = 32;
  int c_ch = 16;
  int s_ch = 8;
  int content_base = 16;
  int style_base = 8;
  int dec_w1 = 48, dec_w2 = 32, dec_w3 = 24;
};

/// The trainable model: both encoders plus the decoder, with one parameter
/// registry in a fixed traversal order.
class Codec {
 public:
  Codec() = default;
  Codec(const CodecDims& dims, std::uint64_t seed);

  ContentCode encode_content(const Tensor& img) const;
  StyleCode encode_style(const Tensor& img) const;
  Tensor decode(const ContentCode& c, const StyleCode& s) const;

  const CodecDims& dims() const { return dims_; }
  std::vector<nn::ParamRef>& params() { return params_; }
  const std::vector<nn::ParamRef>& params() const { return params_; }
  std::uint64_t checksum() const { return nn::param_checksum(params_); }

  void check_image(const Tensor& img) const;

  ContentEncoder content_enc;
  StyleEncoder style_enc;
  Decoder dec;

  /// Rebuild the registry after structural changes (deserialization).
  void rebuild_params();

 private:
  CodecDims dims_;
  std::vector<nn::ParamRef> params_;
};

/// Channel-axis concatenation of the two codes.
Tensor concat_codes(const Tensor& c, const Tensor& s);

/// Splits a gradient w.r.t. the concatenated codes back into the two parts.
void split_code_grad(const Tensor& g, int c_ch, Tensor& gc, Tensor& gs);

/// Convex combination (1-alpha)*a + alpha*b; exact at the endpoints.
StyleCode interpolate_style(const StyleCode& a, const StyleCode& b, double alpha);

}  // namespace stylecodec

#endif  // STYLECODEC_CODEC_HPP_

#ifndef STYLECODEC_NN_HPP_
#define STYLECODEC_NN_HPP_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "stylecodec/rng.hpp"
#include "stylecodec/tensor.hpp"

namespace stylecodec::nn {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Named view of one parameter tensor and its gradient accumulator. The
/// optimizer and the checkpoint serializer both walk these lists, so the
/// collection order of a model is part of its on-disk contract.
struct ParamRef {
  std::string name;
  std::vector<double>* value;
  std::vector<double>* grad;
};

void zero_grads(const std::vector<ParamRef>& params);

/// FNV-1a over the raw parameter bytes; used by frozen-ness checks.
std::uint64_t param_checksum(const std::vector<ParamRef>& params);

std::size_t param_count(const std::vector<ParamRef>& params);

/// 2-d convolution with square kernels, implemented as im2col + GEMM.
/// Forward is const; backward accumulates into gw/gb unless told not to.
struct Conv2d {
  int in_ch = 0, out_ch = 0, ksize = 3, stride = 1, pad = 1;
  std::vector<double> w;  // [out_ch][in_ch][ksize][ksize]
  std::vector<double> b;  // [out_ch]
  mutable std::vector<double> gw, gb;

  Conv2d() = default;
  Conv2d(int in_c, int out_c, int k = 3, int s = 1, int p = 1);

  void init_he(Rng& rng);
  int out_dim(int in) const { return (in + 2 * pad - ksize) / stride + 1; }

  struct Cache {
    int in_h = 0, in_w = 0;
    MatrixRM cols;  // (in_ch*k*k) x (out_h*out_w)
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  /// Returns grad w.r.t. the input.
  Tensor backward(const Cache& cache, const Tensor& gy, bool accum_param_grads = true) const;

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

/// Per-sample, per-channel normalization to zero mean / unit variance over
/// the spatial plane, followed by a learned affine map.
struct InstanceNorm {
  int ch = 0;
  double eps = 1e-5;
  std::vector<double> gamma, beta;
  mutable std::vector<double> ggamma, gbeta;

  InstanceNorm() = default;
  explicit InstanceNorm(int channels);

  struct Cache {
    Tensor xhat;                     // normalized activations, pre-affine
    std::vector<double> inv_sigma;   // per channel
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& gy, bool accum_param_grads = true) const;

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

/// slope = 0 is plain ReLU.
struct LeakyReLU {
  double slope = 0.2;

  struct Cache {
    Tensor x;
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& gy) const;
};

/// 2x2 max pooling with stride 2; ties break toward the first element in
/// scan order.
struct MaxPool2 {
  struct Cache {
    std::vector<std::size_t> argmax;  // flat input index per output element
    int in_c = 0, in_h = 0, in_w = 0;
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(const Cache& cache, const Tensor& gy) const;
};

/// Nearest-neighbor x2 upsampling.
struct Upsample2 {
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& gy) const;  // needs no cache: sums 2x2 blocks
};

Tensor sigmoid(const Tensor& x);
/// grad through sigmoid given its output y.
Tensor sigmoid_backward(const Tensor& y, const Tensor& gy);

}  // namespace stylecodec::nn

#endif  // STYLECODEC_NN_HPP_

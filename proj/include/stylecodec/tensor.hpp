#ifndef STYLECODEC_TENSOR_HPP_
#define STYLECODEC_TENSOR_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "stylecodec/errors.hpp"

namespace stylecodec {

/// Dense C x H x W tensor of doubles, row-major within each channel plane.
/// The single value currency of the library: images, codes and feature maps
/// are all Tensors.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_, double fill = 0.0)
      : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, fill) {}

  std::size_t size() const { return v.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

  double& at(int ch, int y, int x) { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }

  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.c) + "x" +
                     std::to_string(a.h) + "x" + std::to_string(a.w) + " vs " + std::to_string(b.c) +
                     "x" + std::to_string(b.h) + "x" + std::to_string(b.w) + ")");
}

inline double squared_l2(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "squared_l2");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a.v[i] - b.v[i];
    s += d * d;
  }
  return s;
}

/// Content code: structure/identity latent, shape (c_ch, h/8, w/8).
struct ContentCode {
  Tensor t;
};

/// Style code: appearance latent, shape (s_ch, h/8, w/8).
struct StyleCode {
  Tensor t;
};

}  // namespace stylecodec

#endif  // STYLECODEC_TENSOR_HPP_

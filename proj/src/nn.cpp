#include "stylecodec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace stylecodec::nn {

void zero_grads(const std::vector<ParamRef>& params) {
  for (const auto& p : params) std::fill(p.grad->begin(), p.grad->end(), 0.0);
}

std::uint64_t param_checksum(const std::vector<ParamRef>& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params)
    for (double d : *p.value) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(d));
      std::memcpy(&bits, &d, sizeof(bits));
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
      }
    }
  return h;
}

std::size_t param_count(const std::vector<ParamRef>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value->size();
  return n;
}

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(int in_c, int out_c, int k, int s, int p)
    : in_ch(in_c), out_ch(out_c), ksize(k), stride(s), pad(p) {
  w.assign(static_cast<std::size_t>(out_ch) * in_ch * ksize * ksize, 0.0);
  b.assign(static_cast<std::size_t>(out_ch), 0.0);
  gw.assign(w.size(), 0.0);
  gb.assign(b.size(), 0.0);
}

void Conv2d::init_he(Rng& rng) {
  double stddev = std::sqrt(2.0 / (static_cast<double>(in_ch) * ksize * ksize));
  for (auto& x : w) x = rng.normal(0.0, stddev);
  std::fill(b.begin(), b.end(), 0.0);
}

namespace {

void im2col(const Tensor& x, int ksize, int stride, int pad, int out_h, int out_w, MatrixRM& cols) {
  const int rows = x.c * ksize * ksize;
  cols.resize(rows, static_cast<Eigen::Index>(out_h) * out_w);
  for (int ch = 0; ch < x.c; ++ch)
    for (int ky = 0; ky < ksize; ++ky)
      for (int kx = 0; kx < ksize; ++kx) {
        const int row = (ch * ksize + ky) * ksize + kx;
        double* dst = cols.data() + static_cast<std::size_t>(row) * out_h * out_w;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ky - pad;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kx - pad;
            dst[static_cast<std::size_t>(oy) * out_w + ox] =
                (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w) ? x.at(ch, iy, ix) : 0.0;
          }
        }
      }
}

void col2im(const MatrixRM& cols, int c, int h, int w, int ksize, int stride, int pad, int out_h,
            int out_w, Tensor& gx) {
  gx = Tensor(c, h, w);
  for (int ch = 0; ch < c; ++ch)
    for (int ky = 0; ky < ksize; ++ky)
      for (int kx = 0; kx < ksize; ++kx) {
        const int row = (ch * ksize + ky) * ksize + kx;
        const double* src = cols.data() + static_cast<std::size_t>(row) * out_h * out_w;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kx - pad;
            if (ix < 0 || ix >= w) continue;
            gx.at(ch, iy, ix) += src[static_cast<std::size_t>(oy) * out_w + ox];
          }
        }
      }
}

}  // namespace

Tensor Conv2d::forward(const Tensor& x, Cache* cache) const {
  if (x.c != in_ch)
    throw ShapeError("Conv2d: expected " + std::to_string(in_ch) + " input channels, got " +
                     std::to_string(x.c));
  const int out_h = out_dim(x.h);
  const int out_w = out_dim(x.w);
  if (out_h <= 0 || out_w <= 0) throw ShapeError("Conv2d: input too small");

  MatrixRM local;
  MatrixRM& cols = cache ? cache->cols : local;
  im2col(x, ksize, stride, pad, out_h, out_w, cols);
  if (cache) {
    cache->in_h = x.h;
    cache->in_w = x.w;
  }

  Tensor y(out_ch, out_h, out_w);
  Eigen::Map<const MatrixRM> wm(w.data(), out_ch, static_cast<Eigen::Index>(in_ch) * ksize * ksize);
  Eigen::Map<MatrixRM> ym(y.v.data(), out_ch, static_cast<Eigen::Index>(out_h) * out_w);
  ym.noalias() = wm * cols;
  for (int oc = 0; oc < out_ch; ++oc) ym.row(oc).array() += b[oc];
  return y;
}

Tensor Conv2d::backward(const Cache& cache, const Tensor& gy, bool accum_param_grads) const {
  const int out_h = gy.h, out_w = gy.w;
  Eigen::Map<const MatrixRM> gym(gy.v.data(), out_ch, static_cast<Eigen::Index>(out_h) * out_w);

  if (accum_param_grads) {
    Eigen::Map<MatrixRM> gwm(gw.data(), out_ch, static_cast<Eigen::Index>(in_ch) * ksize * ksize);
    gwm.noalias() += gym * cache.cols.transpose();
    for (int oc = 0; oc < out_ch; ++oc) gb[oc] += gym.row(oc).sum();
  }

  Eigen::Map<const MatrixRM> wm(w.data(), out_ch, static_cast<Eigen::Index>(in_ch) * ksize * ksize);
  MatrixRM gcols = wm.transpose() * gym;
  Tensor gx;
  col2im(gcols, in_ch, cache.in_h, cache.in_w, ksize, stride, pad, out_h, out_w, gx);
  return gx;
}

void Conv2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", &w, &gw});
  out.push_back({prefix + ".bias", &b, &gb});
}

// ---------------------------------------------------------------------------
// InstanceNorm
// ---------------------------------------------------------------------------

InstanceNorm::InstanceNorm(int channels) : ch(channels) {
  gamma.assign(ch, 1.0);
  beta.assign(ch, 0.0);
  ggamma.assign(ch, 0.0);
  gbeta.assign(ch, 0.0);
}

Tensor InstanceNorm::forward(const Tensor& x, Cache* cache) const {
  if (x.c != ch)
    throw ShapeError("InstanceNorm: expected " + std::to_string(ch) + " channels, got " +
                     std::to_string(x.c));
  const std::size_t n = x.plane();
  Tensor y(x.c, x.h, x.w);
  Tensor xhat(x.c, x.h, x.w);
  std::vector<double> inv_sigma(ch);
  for (int c = 0; c < ch; ++c) {
    const double* xp = x.v.data() + c * n;
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += xp[i];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = xp[i] - mu;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_sigma[c] = inv;
    double* hp = xhat.v.data() + c * n;
    double* yp = y.v.data() + c * n;
    for (std::size_t i = 0; i < n; ++i) {
      hp[i] = (xp[i] - mu) * inv;
      yp[i] = gamma[c] * hp[i] + beta[c];
    }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_sigma = std::move(inv_sigma);
  }
  return y;
}

Tensor InstanceNorm::backward(const Cache& cache, const Tensor& gy, bool accum_param_grads) const {
  const std::size_t n = gy.plane();
  Tensor gx(gy.c, gy.h, gy.w);
  for (int c = 0; c < ch; ++c) {
    const double* gyp = gy.v.data() + c * n;
    const double* hp = cache.xhat.v.data() + c * n;
    double sum_gy = 0.0, sum_gy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_gy += gyp[i];
      sum_gy_xhat += gyp[i] * hp[i];
    }
    if (accum_param_grads) {
      ggamma[c] += sum_gy_xhat;
      gbeta[c] += sum_gy;
    }
    const double inv = cache.inv_sigma[c];
    const double g = gamma[c];
    const double mean_gy = sum_gy / static_cast<double>(n);
    const double mean_gy_xhat = sum_gy_xhat / static_cast<double>(n);
    double* gxp = gx.v.data() + c * n;
    for (std::size_t i = 0; i < n; ++i)
      gxp[i] = g * inv * (gyp[i] - mean_gy - hp[i] * mean_gy_xhat);
  }
  return gx;
}

void InstanceNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gamma", &gamma, &ggamma});
  out.push_back({prefix + ".beta", &beta, &gbeta});
}

// ---------------------------------------------------------------------------
// Activations / pooling / upsampling
// ---------------------------------------------------------------------------

Tensor LeakyReLU::forward(const Tensor& x, Cache* cache) const {
  Tensor y(x.c, x.h, x.w);
  for (std::size_t i = 0; i < x.size(); ++i) y.v[i] = x.v[i] > 0.0 ? x.v[i] : slope * x.v[i];
  if (cache) cache->x = x;
  return y;
}

Tensor LeakyReLU::backward(const Cache& cache, const Tensor& gy) const {
  Tensor gx(gy.c, gy.h, gy.w);
  for (std::size_t i = 0; i < gy.size(); ++i)
    gx.v[i] = cache.x.v[i] > 0.0 ? gy.v[i] : slope * gy.v[i];
  return gx;
}

Tensor MaxPool2::forward(const Tensor& x, Cache* cache) const {
  if (x.h % 2 != 0 || x.w % 2 != 0) throw ShapeError("MaxPool2: odd input size");
  const int oh = x.h / 2, ow = x.w / 2;
  Tensor y(x.c, oh, ow);
  std::vector<std::size_t> argmax(y.size());
  for (int c = 0; c < x.c; ++c)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        std::size_t best_idx = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            std::size_t idx =
                (static_cast<std::size_t>(c) * x.h + 2 * oy + dy) * x.w + 2 * ox + dx;
            if (x.v[idx] > best) {
              best = x.v[idx];
              best_idx = idx;
            }
          }
        std::size_t oidx = (static_cast<std::size_t>(c) * oh + oy) * ow + ox;
        y.v[oidx] = best;
        argmax[oidx] = best_idx;
      }
  if (cache) {
    cache->argmax = std::move(argmax);
    cache->in_c = x.c;
    cache->in_h = x.h;
    cache->in_w = x.w;
  }
  return y;
}

Tensor MaxPool2::backward(const Cache& cache, const Tensor& gy) const {
  Tensor gx(cache.in_c, cache.in_h, cache.in_w);
  for (std::size_t i = 0; i < gy.size(); ++i) gx.v[cache.argmax[i]] += gy.v[i];
  return gx;
}

Tensor Upsample2::forward(const Tensor& x) const {
  Tensor y(x.c, x.h * 2, x.w * 2);
  for (int c = 0; c < x.c; ++c)
    for (int iy = 0; iy < x.h; ++iy)
      for (int ix = 0; ix < x.w; ++ix) {
        double v = x.at(c, iy, ix);
        y.at(c, 2 * iy, 2 * ix) = v;
        y.at(c, 2 * iy, 2 * ix + 1) = v;
        y.at(c, 2 * iy + 1, 2 * ix) = v;
        y.at(c, 2 * iy + 1, 2 * ix + 1) = v;
      }
  return y;
}

Tensor Upsample2::backward(const Tensor& gy) const {
  Tensor gx(gy.c, gy.h / 2, gy.w / 2);
  for (int c = 0; c < gx.c; ++c)
    for (int iy = 0; iy < gx.h; ++iy)
      for (int ix = 0; ix < gx.w; ++ix)
        gx.at(c, iy, ix) = gy.at(c, 2 * iy, 2 * ix) + gy.at(c, 2 * iy, 2 * ix + 1) +
                           gy.at(c, 2 * iy + 1, 2 * ix) + gy.at(c, 2 * iy + 1, 2 * ix + 1);
  return gx;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y(x.c, x.h, x.w);
  for (std::size_t i = 0; i < x.size(); ++i) y.v[i] = 1.0 / (1.0 + std::exp(-x.v[i]));
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& gy) {
  Tensor gx(gy.c, gy.h, gy.w);
  for (std::size_t i = 0; i < gy.size(); ++i) gx.v[i] = gy.v[i] * y.v[i] * (1.0 - y.v[i]);
  return gx;
}

}  // namespace stylecodec::nn

#include "stylecodec/codec.hpp"

#include <cstring>

namespace stylecodec {

// ---------------------------------------------------------------------------
// ResBlock
// ---------------------------------------------------------------------------

ResBlock::ResBlock(int in_c, int out_c, int stride)
    : conv1(in_c, out_c, 3, stride, 1),
      conv2(out_c, out_c, 3, 1, 1),
      norm1(out_c),
      norm2(out_c),
      project(stride != 1 || in_c != out_c) {
  if (project) {
    skip_conv = nn::Conv2d(in_c, out_c, 1, stride, 0);
    skip_norm = nn::InstanceNorm(out_c);
  }
}

Tensor ResBlock::forward(const Tensor& x, Cache* cache) const {
  Cache local;
  Cache& cc = cache ? *cache : local;
  Tensor h = conv1.forward(x, &cc.c1);
  h = norm1.forward(h, &cc.n1);
  h = act.forward(h, &cc.a1);
  h = conv2.forward(h, &cc.c2);
  h = norm2.forward(h, &cc.n2);
  Tensor s = project ? skip_norm.forward(skip_conv.forward(x, &cc.cs), &cc.ns) : x;
  for (std::size_t i = 0; i < h.size(); ++i) h.v[i] += s.v[i];
  return act.forward(h, &cc.a_out);
}

Tensor ResBlock::backward(const Cache& cache, const Tensor& gy) const {
  Tensor g = act.backward(cache.a_out, gy);
  // main branch
  Tensor gm = norm2.backward(cache.n2, g);
  gm = conv2.backward(cache.c2, gm);
  gm = act.backward(cache.a1, gm);
  gm = norm1.backward(cache.n1, gm);
  gm = conv1.backward(cache.c1, gm);
  // shortcut
  if (project) {
    Tensor gs = skip_norm.backward(cache.ns, g);
    gs = skip_conv.backward(cache.cs, gs);
    for (std::size_t i = 0; i < gm.size(); ++i) gm.v[i] += gs.v[i];
  } else {
    for (std::size_t i = 0; i < gm.size(); ++i) gm.v[i] += g.v[i];
  }
  return gm;
}

void ResBlock::init(Rng& rng) {
  conv1.init_he(rng);
  conv2.init_he(rng);
  if (project) skip_conv.init_he(rng);
}

void ResBlock::collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  conv1.collect_params(prefix + ".conv1", out);
  norm1.collect_params(prefix + ".norm1", out);
  conv2.collect_params(prefix + ".conv2", out);
  norm2.collect_params(prefix + ".norm2", out);
  if (project) {
    skip_conv.collect_params(prefix + ".skip_conv", out);
    skip_norm.collect_params(prefix + ".skip_norm", out);
  }
}

// ---------------------------------------------------------------------------
// ContentEncoder
// ---------------------------------------------------------------------------

ContentEncoder::ContentEncoder(int c_ch, int base_width)
    : stem(3, base_width, 3, 1, 1), stem_norm(base_width) {
  const int w1 = 2 * base_width, w2 = 4 * base_width;
  blocks.emplace_back(base_width, w1, 2);
  blocks.emplace_back(w1, w1, 1);
  blocks.emplace_back(w1, w2, 2);
  blocks.emplace_back(w2, w2, 1);
  blocks.emplace_back(w2, c_ch, 2);
  blocks.emplace_back(c_ch, c_ch, 1);
}

Tensor ContentEncoder::forward(const Tensor& img, Cache* cache) const {
  Cache local;
  Cache& cc = cache ? *cache : local;
  cc.blocks.resize(blocks.size());
  Tensor x = stem.forward(img, &cc.stem_c);
  x = stem_norm.forward(x, &cc.stem_n);
  x = act.forward(x, &cc.stem_a);
  for (std::size_t i = 0; i < blocks.size(); ++i) x = blocks[i].forward(x, &cc.blocks[i]);
  return x;
}

Tensor ContentEncoder::backward(const Cache& cache, const Tensor& g_code) const {
  Tensor g = g_code;
  for (std::size_t i = blocks.size(); i-- > 0;) g = blocks[i].backward(cache.blocks[i], g);
  g = act.backward(cache.stem_a, g);
  g = stem_norm.backward(cache.stem_n, g);
  return stem.backward(cache.stem_c, g);
}

void ContentEncoder::init(Rng& rng) {
  stem.init_he(rng);
  for (auto& b : blocks) b.init(rng);
}

void ContentEncoder::collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  stem.collect_params(prefix + ".stem", out);
  stem_norm.collect_params(prefix + ".stem_norm", out);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    blocks[i].collect_params(prefix + ".block" + std::to_string(i), out);
}

// ---------------------------------------------------------------------------
// StyleEncoder
// ---------------------------------------------------------------------------

StyleEncoder::StyleEncoder(int s_ch, int base_width) {
  const int w1 = base_width, w2 = 2 * base_width;
  convs.emplace_back(3, w1, 3, 2, 1);
  convs.emplace_back(w1, w2, 3, 2, 1);
  convs.emplace_back(w2, w2, 3, 2, 1);
  convs.emplace_back(w2, s_ch, 3, 1, 1);
  for (const auto& c : convs) norms.emplace_back(c.out_ch);
}

Tensor StyleEncoder::forward(const Tensor& img, Cache* cache) const {
  Cache local;
  Cache& cc = cache ? *cache : local;
  cc.c.resize(convs.size());
  cc.n.resize(convs.size());
  cc.a.resize(convs.size());
  Tensor x = img;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    x = convs[i].forward(x, &cc.c[i]);
    x = norms[i].forward(x, &cc.n[i]);
    x = act.forward(x, &cc.a[i]);
  }
  return x;
}

Tensor StyleEncoder::backward(const Cache& cache, const Tensor& g_code) const {
  Tensor g = g_code;
  for (std::size_t i = convs.size(); i-- > 0;) {
    g = act.backward(cache.a[i], g);
    g = norms[i].backward(cache.n[i], g);
    g = convs[i].backward(cache.c[i], g);
  }
  return g;
}

void StyleEncoder::init(Rng& rng) {
  for (auto& c : convs) c.init_he(rng);
}

void StyleEncoder::collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  for (std::size_t i = 0; i < convs.size(); ++i) {
    convs[i].collect_params(prefix + ".conv" + std::to_string(i), out);
    norms[i].collect_params(prefix + ".norm" + std::to_string(i), out);
  }
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

Decoder::Decoder(int code_ch, int w1, int w2, int w3) {
  convs.emplace_back(code_ch, w1, 3, 1, 1);
  convs.emplace_back(w1, w2, 3, 1, 1);
  convs.emplace_back(w2, w3, 3, 1, 1);
  convs.emplace_back(w3, 3, 3, 1, 1);
  for (int i = 0; i < 3; ++i) norms.emplace_back(convs[i].out_ch);
}

Tensor Decoder::forward(const Tensor& codes, Cache* cache) const {
  Cache local;
  Cache& cc = cache ? *cache : local;
  cc.c.resize(4);
  cc.n.resize(3);
  cc.a.resize(3);
  Tensor x = codes;
  for (int i = 0; i < 3; ++i) {
    x = up.forward(x);
    x = convs[i].forward(x, &cc.c[i]);
    x = norms[i].forward(x, &cc.n[i]);
    x = act.forward(x, &cc.a[i]);
  }
  x = convs[3].forward(x, &cc.c[3]);
  Tensor y = nn::sigmoid(x);
  cc.sigmoid_out = y;
  return y;
}

Tensor Decoder::backward(const Cache& cache, const Tensor& g_img) const {
  Tensor g = nn::sigmoid_backward(cache.sigmoid_out, g_img);
  g = convs[3].backward(cache.c[3], g);
  for (int i = 2; i >= 0; --i) {
    g = act.backward(cache.a[i], g);
    g = norms[i].backward(cache.n[i], g);
    g = convs[i].backward(cache.c[i], g);
    g = up.backward(g);
  }
  return g;
}

void Decoder::init(Rng& rng) {
  for (auto& c : convs) c.init_he(rng);
}

void Decoder::collect_params(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  for (std::size_t i = 0; i < convs.size(); ++i)
    convs[i].collect_params(prefix + ".conv" + std::to_string(i), out);
  for (std::size_t i = 0; i < norms.size(); ++i)
    norms[i].collect_params(prefix + ".norm" + std::to_string(i), out);
}

// ---------------------------------------------------------------------------
// Codec
// ---------------------------------------------------------------------------

Codec::Codec(const CodecDims& dims, std::uint64_t seed)
    : content_enc(dims.c_ch, dims.content_base),
      style_enc(dims.s_ch, dims.style_base),
      dec(dims.c_ch + dims.s_ch, dims.dec_w1, dims.dec_w2, dims.dec_w3),
      dims_(dims) {
  Rng rng(mix_seed(seed, 0xC0DE));
  content_enc.init(rng);
  style_enc.init(rng);
  dec.init(rng);
  rebuild_params();
}

void Codec::rebuild_params() {
  params_.clear();
  content_enc.collect_params("content_enc", params_);
  style_enc.collect_params("style_enc", params_);
  dec.collect_params("decoder", params_);
}

void Codec::check_image(const Tensor& img) const {
  if (img.c != 3 || img.h != dims_.image_size || img.w != dims_.image_size)
    throw ShapeError("codec built for 3x" + std::to_string(dims_.image_size) + "x" +
                     std::to_string(dims_.image_size) + ", got " + std::to_string(img.c) + "x" +
                     std::to_string(img.h) + "x" + std::to_string(img.w));
}

ContentCode Codec::encode_content(const Tensor& img) const {
  check_image(img);
  return {content_enc.forward(img)};
}

StyleCode Codec::encode_style(const Tensor& img) const {
  check_image(img);
  return {style_enc.forward(img)};
}

Tensor Codec::decode(const ContentCode& c, const StyleCode& s) const {
  if (c.t.h != s.t.h || c.t.w != s.t.w)
    throw ShapeError("decode: content and style codes have different spatial shapes");
  return dec.forward(concat_codes(c.t, s.t));
}

Tensor concat_codes(const Tensor& c, const Tensor& s) {
  if (c.h != s.h || c.w != s.w) throw ShapeError("concat_codes: spatial shape mismatch");
  Tensor out(c.c + s.c, c.h, c.w);
  std::memcpy(out.v.data(), c.v.data(), c.size() * sizeof(double));
  std::memcpy(out.v.data() + c.size(), s.v.data(), s.size() * sizeof(double));
  return out;
}

void split_code_grad(const Tensor& g, int c_ch, Tensor& gc, Tensor& gs) {
  gc = Tensor(c_ch, g.h, g.w);
  gs = Tensor(g.c - c_ch, g.h, g.w);
  std::memcpy(gc.v.data(), g.v.data(), gc.size() * sizeof(double));
  std::memcpy(gs.v.data(), g.v.data() + gc.size(), gs.size() * sizeof(double));
}

StyleCode interpolate_style(const StyleCode& a, const StyleCode& b, double alpha) {
  require_same_shape(a.t, b.t, "interpolate_style");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("interpolate_style: alpha must be in [0,1], got " + std::to_string(alpha));
  if (alpha == 0.0) return a;
  if (alpha == 1.0) return b;
  StyleCode out{Tensor(a.t.c, a.t.h, a.t.w)};
  for (std::size_t i = 0; i < a.t.size(); ++i)
    out.t.v[i] = (1.0 - alpha) * a.t.v[i] + alpha * b.t.v[i];
  return out;
}

}  // namespace stylecodec

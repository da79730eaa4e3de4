#include "stylecodec/descriptor.hpp"

#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "stylecodec/serialize.hpp"

namespace stylecodec {

using nlohmann::json;

namespace {
constexpr std::uint32_t kWeightsMagic = 0x53434457;  // "SCDW"
constexpr int kStageConvCounts[5] = {2, 2, 3, 3, 1};
}  // namespace

DescriptorSpec DescriptorSpec::vgg16() {
  return {{{64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512}}};
}

DescriptorSpec DescriptorSpec::desk() {
  return {{{16, 16}, {32, 32}, {64, 64, 64}, {96, 96, 96}, {96}}};
}

void DescriptorSpec::validate() const {
  if (stage_widths.size() != 5)
    throw ValidationError("descriptor topology must have 5 stages, got " +
                          std::to_string(stage_widths.size()));
  for (int s = 0; s < 5; ++s) {
    if (static_cast<int>(stage_widths[s].size()) != kStageConvCounts[s])
      throw ValidationError("descriptor stage " + std::to_string(s + 1) + " must have " +
                            std::to_string(kStageConvCounts[s]) + " convs");
    for (int w : stage_widths[s])
      if (w < 1) throw ValidationError("descriptor widths must be >= 1");
  }
}

std::string DescriptorSpec::topology_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& stage : stage_widths) {
    feed(stage.size());
    for (int w : stage) feed(static_cast<std::uint64_t>(w));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::set<std::string>& DescriptorSpec::allowed_taps() {
  static const std::set<std::string> taps = {"relu1_2", "relu2_2", "relu3_1", "relu3_3",
                                             "relu4_1", "relu4_3", "relu5_1"};
  return taps;
}

const std::vector<std::string>& DescriptorSpec::style_taps() {
  static const std::vector<std::string> taps = {"relu1_2", "relu2_2", "relu3_3", "relu4_3"};
  return taps;
}

const std::vector<std::string>& DescriptorSpec::content_taps() {
  static const std::vector<std::string> taps = {"relu3_1", "relu4_1", "relu5_1"};
  return taps;
}

// ---------------------------------------------------------------------------

Descriptor::Descriptor(const DescriptorSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  Rng rng(mix_seed(seed, 0xD35C));
  int in_ch = 3;
  for (int s = 0; s < 5; ++s) {
    std::vector<nn::Conv2d> convs;
    for (int width : spec_.stage_widths[s]) {
      nn::Conv2d conv(in_ch, width, 3, 1, 1);
      conv.init_he(rng);
      convs.push_back(std::move(conv));
      in_ch = width;
    }
    stages_.push_back(std::move(convs));
  }
}

void Descriptor::set_input_normalization(const std::array<double, 3>& mean,
                                         const std::array<double, 3>& stddev) {
  for (double s : stddev)
    if (!(s > 0)) throw ValidationError("descriptor input std must be positive");
  input_mean_ = mean;
  input_std_ = stddev;
}

std::pair<int, int> Descriptor::parse_tap(const std::string& name) {
  if (DescriptorSpec::allowed_taps().count(name) == 0)
    throw ValidationError("unknown tap name '" + name + "'");
  // names are "relu<stage>_<conv>"
  int stage = name[4] - '0';
  int conv = name[6] - '0';
  return {stage, conv};
}

int Descriptor::tap_spatial(int input_size, const std::string& name) {
  auto [stage, conv] = parse_tap(name);
  (void)conv;
  return input_size >> (stage - 1);  // one 2x2 pool before each stage after the first
}

int Descriptor::tap_channels(const std::string& name) const {
  auto [stage, conv] = parse_tap(name);
  return spec_.stage_widths[stage - 1][conv - 1];
}

Descriptor::Trace Descriptor::forward(const Tensor& img) const {
  if (img.c != 3) throw ShapeError("descriptor expects a 3-channel image");
  if (img.h < 32 || img.w < 32)
    throw ValidationError("descriptor input must be at least 32x32 so relu5_1 is nonempty");

  Trace trace;
  Tensor x(img.c, img.h, img.w);
  for (int c = 0; c < 3; ++c) {
    const std::size_t n = img.plane();
    for (std::size_t i = 0; i < n; ++i)
      x.v[c * n + i] = (img.v[c * n + i] - input_mean_[c]) / input_std_[c];
  }
  trace.input_grad_scale_applied = x;

  nn::LeakyReLU relu{0.0};
  nn::MaxPool2 pool;
  trace.conv_caches.resize(5);
  trace.relu_caches.resize(5);
  trace.activations.resize(5);
  for (int s = 0; s < 5; ++s) {
    for (std::size_t i = 0; i < stages_[s].size(); ++i) {
      trace.conv_caches[s].emplace_back();
      trace.relu_caches[s].emplace_back();
      Tensor pre = stages_[s][i].forward(x, &trace.conv_caches[s].back());
      x = relu.forward(pre, &trace.relu_caches[s].back());
      trace.activations[s].push_back(x);
    }
    if (s < 4) {
      trace.pool_caches.emplace_back();
      x = pool.forward(x, &trace.pool_caches.back());
    }
  }
  return trace;
}

const Tensor& Descriptor::tap(const Trace& trace, const std::string& name) const {
  auto [stage, conv] = parse_tap(name);
  return trace.activations[stage - 1][conv - 1];
}

FeatureTaps Descriptor::extract_taps(const Tensor& img, const std::set<std::string>& taps) const {
  for (const auto& name : taps) parse_tap(name);  // validate before the heavy pass
  Trace trace = forward(img);
  FeatureTaps out;
  for (const auto& name : taps) out[name] = tap(trace, name);
  return out;
}

Tensor Descriptor::backward_to_input(const Trace& trace,
                                     const std::map<std::string, Tensor>& tap_grads) const {
  for (const auto& [name, g] : tap_grads) {
    const Tensor& act = tap(trace, name);
    require_same_shape(act, g, "descriptor tap grad");
  }

  nn::LeakyReLU relu{0.0};
  nn::MaxPool2 pool;
  Tensor g;  // grad at the current reverse position (post-ReLU of stage s, conv i)
  for (int s = 4; s >= 0; --s) {
    if (s < 4) {
      // grad currently sits after pool s; pull it back through the pool
      g = pool.backward(trace.pool_caches[s], g);
    }
    for (int i = static_cast<int>(stages_[s].size()) - 1; i >= 0; --i) {
      const Tensor& act = trace.activations[s][i];
      if (g.size() == 0) g = Tensor(act.c, act.h, act.w);
      auto it = tap_grads.find("relu" + std::to_string(s + 1) + "_" + std::to_string(i + 1));
      if (it != tap_grads.end())
        for (std::size_t k = 0; k < g.size(); ++k) g.v[k] += it->second.v[k];
      g = relu.backward(trace.relu_caches[s][i], g);
      // frozen network: never accumulate parameter gradients
      g = stages_[s][i].backward(trace.conv_caches[s][i], g, false);
    }
  }
  // undo the input normalization scale
  const std::size_t n = g.plane();
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n; ++i) g.v[c * n + i] /= input_std_[c];
  return g;
}

std::uint64_t Descriptor::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::vector<double>& vals) {
    for (double d : vals) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof(bits));
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
      }
    }
  };
  for (const auto& stage : stages_)
    for (const auto& conv : stage) {
      feed(conv.w);
      feed(conv.b);
    }
  return h;
}

// ---------------------------------------------------------------------------

Descriptor build_descriptor(const DescriptorSpec& spec, std::uint64_t seed,
                            const std::string* weights_path) {
  if (weights_path) return load_descriptor_weights(spec, *weights_path);
  return Descriptor(spec, seed);
}

void save_descriptor_weights(const Descriptor& d, const std::string& path) {
  BinWriter w(path);
  w.u32(kWeightsMagic);
  w.u32(1);  // schema version
  json meta;
  meta["topology"] = d.spec().stage_widths;
  meta["topology_hash"] = d.spec().topology_hash();
  meta["input_mean"] = d.input_mean();
  meta["input_std"] = d.input_std();
  w.str(meta.dump());
  const auto& stages = d.stages();
  std::uint64_t count = 0;
  for (const auto& st : stages) count += 2 * st.size();
  w.u64(count);
  for (std::size_t s = 0; s < stages.size(); ++s)
    for (std::size_t i = 0; i < stages[s].size(); ++i) {
      std::string base = "conv" + std::to_string(s + 1) + "_" + std::to_string(i + 1);
      w.str(base + ".weight");
      w.f64_block(stages[s][i].w);
      w.str(base + ".bias");
      w.f64_block(stages[s][i].b);
    }
  w.close();
}

Descriptor load_descriptor_weights(const DescriptorSpec& spec, const std::string& path) {
  spec.validate();
  BinReader r(path);
  if (r.u32() != kWeightsMagic) throw IoError("not a descriptor weights file: " + path);
  std::uint32_t version = r.u32();
  if (version != 1)
    throw SchemaError("unsupported descriptor weights schema_version " + std::to_string(version));
  json meta;
  try {
    meta = json::parse(r.str());
  } catch (const json::parse_error& e) {
    throw IoError(std::string("bad weights metadata: ") + e.what());
  }
  auto file_topology = meta.at("topology").get<std::vector<std::vector<int>>>();
  for (std::size_t s = 0; s < 5; ++s) {
    if (s >= file_topology.size() || file_topology[s] != spec.stage_widths[s])
      throw ShapeError("descriptor weights shape mismatch at stage " + std::to_string(s + 1));
  }

  Descriptor d(spec, 0);
  if (meta.contains("input_mean")) {
    std::array<double, 3> mean = meta.at("input_mean").get<std::array<double, 3>>();
    std::array<double, 3> stddev = meta.at("input_std").get<std::array<double, 3>>();
    d.set_input_normalization(mean, stddev);
  }

  std::uint64_t count = r.u64();
  std::map<std::string, std::vector<double>> tensors;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.str();
    tensors[name] = r.f64_block();
  }
  auto& stages = const_cast<std::vector<std::vector<nn::Conv2d>>&>(d.stages());
  for (std::size_t s = 0; s < stages.size(); ++s)
    for (std::size_t i = 0; i < stages[s].size(); ++i) {
      std::string base = "conv" + std::to_string(s + 1) + "_" + std::to_string(i + 1);
      auto wi = tensors.find(base + ".weight");
      auto bi = tensors.find(base + ".bias");
      if (wi == tensors.end() || bi == tensors.end())
        throw ShapeError("descriptor weights missing tensors at stage " + std::to_string(s + 1));
      if (wi->second.size() != stages[s][i].w.size() || bi->second.size() != stages[s][i].b.size())
        throw ShapeError("descriptor weights shape mismatch at stage " + std::to_string(s + 1));
      stages[s][i].w = wi->second;
      stages[s][i].b = bi->second;
    }
  return d;
}

}  // namespace stylecodec

#include "stylecodec/losses.hpp"

#include <cmath>

#include "stylecodec/rng.hpp"

namespace stylecodec {

Eigen::MatrixXd gram(const Tensor& f) {
  Eigen::Map<const nn::MatrixRM> fm(f.v.data(), f.c, static_cast<Eigen::Index>(f.h) * f.w);
  return fm * fm.transpose();
}

namespace {

// Shared by the eval-only entry points and the fused gradient path.
void recon_losses_impl(const Tensor& x, const Tensor& x_rec, const Descriptor& d,
                       double* style_out, double* content_out, double ws, double wc,
                       Tensor* grad_x_rec) {
  require_same_shape(x, x_rec, "reconstruction loss");
  Descriptor::Trace tx = d.forward(x);
  Descriptor::Trace tr = d.forward(x_rec);

  std::map<std::string, Tensor> tap_grads;
  double style = 0.0, content = 0.0;

  for (const auto& name : DescriptorSpec::style_taps()) {
    const Tensor& fx = d.tap(tx, name);
    const Tensor& fr = d.tap(tr, name);
    const double norm = static_cast<double>(fx.c) * fx.h * fx.w;
    Eigen::MatrixXd gx = gram(fx);
    Eigen::MatrixXd gr = gram(fr);
    Eigen::MatrixXd diff = gr - gx;
    style += diff.squaredNorm() / norm;
    if (grad_x_rec) {
      Eigen::Map<const nn::MatrixRM> frm(fr.v.data(), fr.c, static_cast<Eigen::Index>(fr.h) * fr.w);
      nn::MatrixRM g = (4.0 * ws / norm) * (diff * frm);
      Tensor gt(fr.c, fr.h, fr.w);
      Eigen::Map<nn::MatrixRM>(gt.v.data(), fr.c, static_cast<Eigen::Index>(fr.h) * fr.w) = g;
      tap_grads[name] = std::move(gt);  // style and content tap sets are disjoint
    }
  }

  for (const auto& name : DescriptorSpec::content_taps()) {
    const Tensor& fx = d.tap(tx, name);
    const Tensor& fr = d.tap(tr, name);
    const double norm = static_cast<double>(fx.c) * fx.h * fx.w;
    content += squared_l2(fr, fx) / norm;
    if (grad_x_rec) {
      Tensor gt(fr.c, fr.h, fr.w);
      for (std::size_t i = 0; i < gt.size(); ++i)
        gt.v[i] = (2.0 * wc / norm) * (fr.v[i] - fx.v[i]);
      tap_grads[name] = std::move(gt);
    }
  }

  if (style_out) *style_out = style;
  if (content_out) *content_out = content;
  if (grad_x_rec) *grad_x_rec = d.backward_to_input(tr, tap_grads);
}

}  // namespace

double style_recon_loss(const Tensor& x, const Tensor& x_rec, const Descriptor& d) {
  double s = 0.0;
  recon_losses_impl(x, x_rec, d, &s, nullptr, 0, 0, nullptr);
  return s;
}

double content_recon_loss(const Tensor& x, const Tensor& x_rec, const Descriptor& d) {
  double c = 0.0;
  recon_losses_impl(x, x_rec, d, nullptr, &c, 0, 0, nullptr);
  return c;
}

void recon_losses_with_grad(const Tensor& x, const Tensor& x_rec, const Descriptor& d,
                            double* style_out, double* content_out, double ws, double wc,
                            Tensor* grad_x_rec) {
  recon_losses_impl(x, x_rec, d, style_out, content_out, ws, wc, grad_x_rec);
}

double triplet_loss(const Tensor& a, const Tensor& p, const Tensor& n, double margin) {
  require_same_shape(a, p, "triplet_loss");
  require_same_shape(a, n, "triplet_loss");
  double arg = squared_l2(a, p) - squared_l2(a, n) + margin;
  return arg > 0.0 ? arg : 0.0;
}

double triplet_loss_grad(const Tensor& a, const Tensor& p, const Tensor& n, double margin,
                         Tensor* ga, Tensor* gp, Tensor* gn) {
  double loss = triplet_loss(a, p, n, margin);
  *ga = Tensor(a.c, a.h, a.w);
  *gp = Tensor(a.c, a.h, a.w);
  *gn = Tensor(a.c, a.h, a.w);
  if (loss > 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      ga->v[i] = 2.0 * (n.v[i] - p.v[i]);
      gp->v[i] = 2.0 * (p.v[i] - a.v[i]);
      gn->v[i] = 2.0 * (a.v[i] - n.v[i]);
    }
  }
  return loss;
}

double cycle_loss(const Tensor& x, const Tensor& x_rec, const Codec& codec) {
  require_same_shape(x, x_rec, "cycle_loss");
  const double norm = static_cast<double>(x.c) * x.h * x.w;
  Tensor ec_x = codec.content_enc.forward(x);
  Tensor ec_r = codec.content_enc.forward(x_rec);
  Tensor es_x = codec.style_enc.forward(x);
  Tensor es_r = codec.style_enc.forward(x_rec);
  return (squared_l2(ec_x, ec_r) + squared_l2(es_x, es_r)) / norm;
}

double recompose_total(const LossBreakdown& b, const TrainConfig& cfg) {
  return cfg.lambda_s * b.recon_style + cfg.lambda_c * b.recon_content +
         cfg.lambda_tri * (b.triplet_content + b.triplet_style) + cfg.lambda_cycle * b.cycle;
}

LossBreakdown total_loss(const std::vector<Tensor>& batch,
                         const std::vector<ImageTriplet>& content_triplets,
                         const std::vector<ImageTriplet>& style_triplets, const Codec& codec,
                         const Descriptor& d, const TrainConfig& cfg,
                         const std::vector<Tensor>* forced_recons) {
  if (batch.empty()) throw ValidationError("total_loss: empty batch");
  if (forced_recons && forced_recons->size() != batch.size())
    throw ValidationError("total_loss: forced_recons size mismatch");

  LossBreakdown b;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Tensor& x = batch[i];
    Tensor x_rec = forced_recons
                       ? (*forced_recons)[i]
                       : codec.decode(codec.encode_content(x), codec.encode_style(x));
    double s = 0, c = 0;
    recon_losses_impl(x, x_rec, d, &s, &c, 0, 0, nullptr);
    b.recon_style += s;
    b.recon_content += c;
    b.cycle += cycle_loss(x, x_rec, codec);
  }
  b.recon_style /= static_cast<double>(batch.size());
  b.recon_content /= static_cast<double>(batch.size());
  b.cycle /= static_cast<double>(batch.size());

  for (const auto& t : content_triplets) {
    Tensor a = codec.content_enc.forward(*t[0]);
    Tensor p = codec.content_enc.forward(*t[1]);
    Tensor n = codec.content_enc.forward(*t[2]);
    b.triplet_content += triplet_loss(a, p, n, cfg.margin_content);
  }
  if (!content_triplets.empty()) b.triplet_content /= static_cast<double>(content_triplets.size());

  for (const auto& t : style_triplets) {
    Tensor a = codec.style_enc.forward(*t[0]);
    Tensor p = codec.style_enc.forward(*t[1]);
    Tensor n = codec.style_enc.forward(*t[2]);
    b.triplet_style += triplet_loss(a, p, n, cfg.margin_style);
  }
  if (!style_triplets.empty()) b.triplet_style /= static_cast<double>(style_triplets.size());

  b.total = recompose_total(b, cfg);
  return b;
}

double check_gradient(const std::function<double(const std::vector<double>&)>& f,
                      const std::vector<double>& point, const std::vector<double>& analytic_grad,
                      double epsilon, int max_coords, std::uint64_t seed) {
  if (!(epsilon > 0)) throw ValidationError("check_gradient: epsilon must be > 0");
  if (analytic_grad.size() != point.size())
    throw ValidationError("check_gradient: gradient size mismatch");

  std::vector<std::size_t> coords;
  const std::size_t dim = point.size();
  if (max_coords < 0 || static_cast<std::size_t>(max_coords) >= dim) {
    coords.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) coords[i] = i;
  } else {
    // sample without replacement
    std::vector<std::size_t> all(dim);
    for (std::size_t i = 0; i < dim; ++i) all[i] = i;
    Rng rng(mix_seed(seed, 0xF1D1));
    for (int k = 0; k < max_coords; ++k) {
      std::size_t j = k + rng.uniform_int(dim - k);
      std::swap(all[k], all[j]);
      coords.push_back(all[k]);
    }
  }

  std::vector<double> x = point;
  double max_err = 0.0;
  for (std::size_t i : coords) {
    const double orig = x[i];
    x[i] = orig + epsilon;
    double fp = f(x);
    x[i] = orig - epsilon;
    double fm = f(x);
    x[i] = orig;
    double g_fd = (fp - fm) / (2.0 * epsilon);
    double g_an = analytic_grad[i];
    double err = std::abs(g_fd - g_an) / std::max({std::abs(g_fd), std::abs(g_an), 1e-8});
    max_err = std::max(max_err, err);
  }
  return max_err;
}

}  // namespace stylecodec

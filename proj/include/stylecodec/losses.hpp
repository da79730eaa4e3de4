#ifndef STYLECODEC_LOSSES_HPP_
#define STYLECODEC_LOSSES_HPP_

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "stylecodec/codec.hpp"
#include "stylecodec/config.hpp"
#include "stylecodec/descriptor.hpp"
#include "stylecodec/tensor.hpp"

namespace stylecodec {

/// Channel-by-channel inner products of a feature map: G[c1][c2] =
/// <F_c1, F_c2> over the flattened spatial plane. Symmetric PSD.
Eigen::MatrixXd gram(const Tensor& f);

/// Sum over the style taps of (1/(C_j H_j W_j)) * ||G(phi_j(x)) - G(phi_j(x_rec))||_F^2.
double style_recon_loss(const Tensor& x, const Tensor& x_rec, const Descriptor& d);

/// Sum over the content taps of (1/(C_j H_j W_j)) * ||phi_j(x) - phi_j(x_rec)||_2^2.
double content_recon_loss(const Tensor& x, const Tensor& x_rec, const Descriptor& d);

/// One fused pass for training: evaluates both perceptual losses and, when
/// grad_x_rec is non-null, writes d(ws*L_style + wc*L_content)/d(x_rec) into
/// it. The descriptor parameters receive nothing.
void recon_losses_with_grad(const Tensor& x, const Tensor& x_rec, const Descriptor& d,
                            double* style_out, double* content_out, double ws, double wc,
                            Tensor* grad_x_rec);

/// max(0, ||a-p||^2 - ||a-n||^2 + margin) over flattened codes.
double triplet_loss(const Tensor& a, const Tensor& p, const Tensor& n, double margin);

/// Same, also writing gradients w.r.t. the three codes (zeros when the hinge
/// is inactive).
double triplet_loss_grad(const Tensor& a, const Tensor& p, const Tensor& n, double margin,
                         Tensor* ga, Tensor* gp, Tensor* gn);

/// (1/(C H W)) * (||E_c(x)-E_c(x_rec)||^2 + ||E_s(x)-E_s(x_rec)||^2), with
/// C,H,W the *image* dimensions.
double cycle_loss(const Tensor& x, const Tensor& x_rec, const Codec& codec);

struct LossBreakdown {
  double recon_style = 0;
  double recon_content = 0;
  double triplet_content = 0;
  double triplet_style = 0;
  double cycle = 0;
  double total = 0;
};

/// total = lambda_s*recon_style + lambda_c*recon_content
///       + lambda_tri*(triplet_content + triplet_style) + lambda_cycle*cycle
double recompose_total(const LossBreakdown& b, const TrainConfig& cfg);

using ImageTriplet = std::array<const Tensor*, 3>;  // anchor, positive, negative

/// Full objective on a batch: reconstruction and cycle terms averaged over
/// the batch images (reconstructions computed through the codec unless
/// `forced_recons` overrides them), triplet terms averaged over the sampled
/// triplets (content triplets under E_c with margin_content, style triplets
/// under E_s with margin_style).
LossBreakdown total_loss(const std::vector<Tensor>& batch,
                         const std::vector<ImageTriplet>& content_triplets,
                         const std::vector<ImageTriplet>& style_triplets, const Codec& codec,
                         const Descriptor& d, const TrainConfig& cfg,
                         const std::vector<Tensor>* forced_recons = nullptr);

/// Central finite differences against a supplied analytic gradient. Returns
/// the max over sampled coordinates of |g_fd - g_an| / max(|g_fd|, |g_an|,
/// 1e-8). Samples `max_coords` distinct coordinates (all of them when
/// max_coords < 0 or exceeds the dimension).
double check_gradient(const std::function<double(const std::vector<double>&)>& f,
                      const std::vector<double>& point, const std::vector<double>& analytic_grad,
                      double epsilon, int max_coords = -1, std::uint64_t seed = 0);

}  // namespace stylecodec

#endif  // STYLECODEC_LOSSES_HPP_

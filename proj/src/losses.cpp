/*
 * Copyright 2025 The ITM Bench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "itm/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "itm/error.h"

namespace itm {

namespace {

double mean_abs_diff(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  }
  return acc / static_cast<double>(a.size());
}

void require_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("loss weight ") + name + " must be finite and >= 0");
  }
}

ScalarField log_luminance(const LinearImage& img) {
  ScalarField l = luminance(img);
  for (double& v : l.values()) v = std::log(v + LossConstants::kLogEps);
  return l;
}

double fit_ssim(const ScalarField& a, const ScalarField& b, double range,
                const SsimOptions& opts) {
  if (a.width() >= opts.window && a.height() >= opts.window) {
    return ssim_index(a, b, range, opts);
  }
  return global_ssim(a, b, range, opts);
}

}  // namespace

void LossWeights::validate() const {
  require_nonneg(alpha_perc, "alpha_perc");
  require_nonneg(gamma_ssim, "gamma_ssim");
  require_nonneg(gamma_color, "gamma_color");
  require_nonneg(lambda_linear, "lambda_linear");
  require_nonneg(alpha_denoise, "alpha_denoise");
  require_nonneg(alpha_upf, "alpha_upf");
  require_nonneg(gamma_tv, "gamma_tv");
}

void UpfParams::validate() const {
  if (patch < 2) throw ValidationError("UPF patch must be >= 2");
  if (hist_bins < 2) throw ValidationError("UPF histogram bins must be >= 2");
  if (!(hist_sigma > 0.0)) throw ValidationError("UPF histogram sigma must be > 0");
  if (!(focal_gamma >= 0.0)) throw ValidationError("UPF focal gamma must be >= 0");
  require_nonneg(alpha_hist, "alpha_hist");
  require_nonneg(beta_smooth, "beta_smooth");
}

double recon_loss(std::span<const LinearImage> preds, const LinearImage& gt, MuLawParams mu) {
  if (preds.empty()) throw ValidationError("recon_loss needs at least one stage");
  const auto g = gt.data();
  std::vector<double> gt_mu(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gt_mu[i] = mu_law(g[i], mu);
  const double n = static_cast<double>(preds.size());
  double total = 0.0;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    require_same_shape(preds[s].shape(), gt.shape(), "recon_loss");
    const auto p = preds[s].data();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(mu_law(p[i], mu) - gt_mu[i]);
    total += (static_cast<double>(s + 1) / n) * (acc / static_cast<double>(p.size()));
  }
  return total;
}

double linear_l1(const LinearImage& pred, const LinearImage& gt) {
  require_same_shape(pred.shape(), gt.shape(), "linear_l1");
  return mean_abs_diff(pred.data(), gt.data());
}

double denoise_loss(const LinearImage& denoised, const LinearImage& gt) {
  require_same_shape(denoised.shape(), gt.shape(), "denoise_loss");
  return mean_abs_diff(denoised.data(), gt.data());
}

double global_ssim(const ScalarField& a, const ScalarField& b, double dynamic_range,
                   const SsimOptions& options) {
  require_same_shape(a.shape(), b.shape(), "global_ssim");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
    cov += (a[i] - ma) * (b[i] - mb);
  }
  va /= n;
  vb /= n;
  cov /= n;
  const double c1 = (options.k1 * dynamic_range) * (options.k1 * dynamic_range);
  const double c2 = (options.k2 * dynamic_range) * (options.k2 * dynamic_range);
  return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

double ssim_pu_loss(const LinearImage& pred, const LinearImage& gt, PuApproxParams pu,
                    const SsimOptions& options) {
  require_same_shape(pred.shape(), gt.shape(), "ssim_pu_loss");
  ScalarField a = luminance(pred);
  ScalarField b = luminance(gt);
  for (double& v : a.values()) v = pu_approx(v, pu);
  for (double& v : b.values()) v = pu_approx(v, pu);
  return 1.0 - fit_ssim(a, b, 1.0, options);
}

double color_loss(const LinearImage& pred, const LinearImage& gt, double eps) {
  if (!(eps > 0.0)) throw DomainError("color_loss eps must be > 0");
  require_same_shape(pred.shape(), gt.shape(), "color_loss");
  auto ratios = [eps](const Rgb& p) {
    return std::array<double, 3>{std::log((p[0] + eps) / (p[1] + eps)),
                                 std::log((p[1] + eps) / (p[2] + eps)),
                                 std::log((p[2] + eps) / (p[0] + eps))};
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    const auto rp = ratios(pred.pixel(i));
    const auto rg = ratios(gt.pixel(i));
    for (int c = 0; c < 3; ++c) acc += std::abs(rp[c] - rg[c]);
  }
  return acc / (3.0 * static_cast<double>(pred.pixel_count()));
}

double tv_loss(const LinearImage& pred) {
  const int w = pred.width();
  const int h = pred.height();
  const auto d = pred.data();
  auto at = [&](int x, int y, int c) {
    return static_cast<double>(d[(static_cast<std::size_t>(y) * w + x) * 3 + c]);
  };
  double horiz = 0.0;
  if (w > 1) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x + 1 < w; ++x)
        for (int c = 0; c < 3; ++c) horiz += std::abs(at(x + 1, y, c) - at(x, y, c));
    horiz /= 3.0 * (w - 1) * h;
  }
  double vert = 0.0;
  if (h > 1) {
    for (int y = 0; y + 1 < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) vert += std::abs(at(x, y + 1, c) - at(x, y, c));
    vert /= 3.0 * w * (h - 1);
  }
  return horiz + vert;
}

UpfBreakdown upf_terms(const LinearImage& pred, const LinearImage& gt, const UpfParams& p) {
  p.validate();
  require_same_shape(pred.shape(), gt.shape(), "upf_loss");
  const int w = pred.width();
  const int h = pred.height();
  if (w < p.patch || h < p.patch) {
    throw ShapeError("upf_loss: image " + std::to_string(w) + "x" + std::to_string(h) +
                     " is smaller than the patch size " + std::to_string(p.patch));
  }
  const ScalarField lp = log_luminance(pred);
  const ScalarField lg = log_luminance(gt);
  UpfBreakdown out;

  // Focal Charbonnier over full patches, row-major patch order.
  constexpr double eps = LossConstants::kCharbonnierEps;
  const int px = w / p.patch;
  const int py = h / p.patch;
  std::vector<double> err;
  err.reserve(static_cast<std::size_t>(px) * py);
  for (int by = 0; by < py; ++by) {
    for (int bx = 0; bx < px; ++bx) {
      double acc = 0.0;
      for (int y = by * p.patch; y < (by + 1) * p.patch; ++y) {
        for (int x = bx * p.patch; x < (bx + 1) * p.patch; ++x) {
          const double d = lp.at(x, y) - lg.at(x, y);
          acc += std::sqrt(d * d + eps * eps) - eps;
        }
      }
      err.push_back(acc / (static_cast<double>(p.patch) * p.patch));
    }
  }
  double mean_err = 0.0;
  for (double e : err) mean_err += e;
  mean_err /= static_cast<double>(err.size());
  double charb = 0.0;
  for (double e : err) {
    const double weight = mean_err > 0.0 ? std::pow(e / mean_err, p.focal_gamma) : 1.0;
    charb += weight * e;
  }
  out.charbonnier = charb / static_cast<double>(err.size());

  // Soft histograms over the joint log range.
  double lo = lp[0], hi = lp[0];
  for (const ScalarField* f : {&lp, &lg}) {
    for (double v : f->values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi - lo;
  const int bins = p.hist_bins;
  auto histogram = [&](const ScalarField& f) {
    std::vector<double> hist(bins, 0.0);
    for (double v : f.values()) {
      const double u = span > 0.0 ? (v - lo) / span : 0.5;
      for (int k = 0; k < bins; ++k) {
        const double z = (u - static_cast<double>(k) / (bins - 1)) / p.hist_sigma;
        hist[k] += std::exp(-0.5 * z * z);
      }
    }
    double mass = 0.0;
    for (double v : hist) mass += v;
    for (double& v : hist) v /= mass;
    return hist;
  };
  const auto hp = histogram(lp);
  const auto hg = histogram(lg);
  double hist_l1 = 0.0;
  for (int k = 0; k < bins; ++k) hist_l1 += std::abs(hp[k] - hg[k]);
  out.histogram = hist_l1 / bins;

  // Edge-aware smoothness.
  double sh = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      const double dg = lg.at(x + 1, y) - lg.at(x, y);
      const double dp = lp.at(x + 1, y) - lp.at(x, y);
      sh += std::abs(dp - dg) * std::exp(-std::abs(dg));
    }
  }
  double sv = 0.0;
  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dg = lg.at(x, y + 1) - lg.at(x, y);
      const double dp = lp.at(x, y + 1) - lp.at(x, y);
      sv += std::abs(dp - dg) * std::exp(-std::abs(dg));
    }
  }
  out.smoothness = sh / (static_cast<double>(w - 1) * h) + sv / (static_cast<double>(w) * (h - 1));

  out.total = out.charbonnier + p.alpha_hist * out.histogram + p.beta_smooth * out.smoothness;
  return out;
}

double upf_loss(const LinearImage& pred, const LinearImage& gt, const UpfParams& p) {
  return upf_terms(pred, gt, p).total;
}

TotalLoss total_loss(const TotalLossInputs& in, const LossWeights& w, const UpfParams& upf,
                     MuLawParams mu, PuApproxParams pu) {
  w.validate();
  if (in.pred == nullptr || in.gt == nullptr) {
    throw ValidationError("total_loss needs a prediction and a ground truth");
  }
  if (in.perceptual < 0.0 || !std::isfinite(in.perceptual)) {
    throw DomainError("perceptual loss must be finite and >= 0");
  }
  const LinearImage& pred = *in.pred;
  const LinearImage& gt = *in.gt;
  const LinearImage& denoised = in.denoised ? *in.denoised : pred;
  std::span<const LinearImage> stages = in.stages;
  if (stages.empty()) stages = std::span<const LinearImage>(in.pred, 1);

  TotalLoss out;
  auto add = [&out](const char* name, double weight, double value) {
    out.terms.push_back({name, weight, value, weight * value});
  };
  add("recon", 1.0, recon_loss(stages, gt, mu));
  add("perc", w.alpha_perc, in.perceptual);
  add("ssim_pu", w.gamma_ssim, ssim_pu_loss(pred, gt, pu));
  add("color", w.gamma_color, color_loss(pred, gt));
  add("tv", w.gamma_tv, tv_loss(pred));
  add("linear", w.lambda_linear, linear_l1(pred, gt));
  add("denoise", w.alpha_denoise, denoise_loss(denoised, gt));
  add("upf", w.alpha_upf, upf_loss(pred, gt, upf));
  for (const LossTerm& t : out.terms) out.total += t.contribution;
  return out;
}

double score_matching_loss(std::span<const ScoreMatchingStep> trajectory,
                           std::span<const double> gammas, double lambda,
                           double dynamic_range) {
  if (gammas.size() != trajectory.size()) {
    throw ValidationError("score_matching_loss: one gamma per trajectory step is required");
  }
  if (!(lambda >= 0.0)) throw ValidationError("score_matching_loss: lambda must be >= 0");
  const SsimOptions opts;
  double total = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (!(gammas[i] > 0.0)) throw ValidationError("score_matching_loss: gammas must be > 0");
    const auto& step = trajectory[i];
    if (step.x.empty() || step.x.size() != step.x_star.size()) {
      throw ValidationError("score_matching_loss: each step needs matching, non-empty samples");
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < step.x.size(); ++s) {
      const ScalarField& a = step.x[s];
      const ScalarField& b = step.x_star[s];
      require_same_shape(a.shape(), b.shape(), "score_matching_loss");
      double l1 = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) l1 += std::abs(a[k] - b[k]);
      l1 /= static_cast<double>(a.size());
      const double ssim_term = lambda > 0.0 ? 1.0 - fit_ssim(a, b, dynamic_range, opts) : 0.0;
      acc += l1 + lambda * ssim_term;
    }
    total += gammas[i] * acc / static_cast<double>(step.x.size());
  }
  return total;
}

}  // namespace itm

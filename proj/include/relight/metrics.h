// Reconstruction losses, the weighted relighting objective, image metrics
// and the log(1+x) dynamic-range codec.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relight/image.h"
#include "relight/masks.h"

namespace relight {

// Mean absolute difference over all channels. With a mask, only masked
// pixels (mask = 1) contribute, as in masked-autoencoder training.
// Throws on shape mismatch or an empty masked region.
double l1(const RgbImage& x, const RgbImage& y,
          const std::optional<Mask>& mask = std::nullopt);

// mean |x * S - y * S| with S a per-pixel weight image.
double specular_weighted_l1(const RgbImage& x, const RgbImage& y,
                            const RgbImage& spec_render);

// Term weights of the relighting objective, in canonical order.
struct LossTerm {
  const char* name;
  double weight;
};
const std::vector<LossTerm>& relight_loss_terms();

struct LossReport {
  std::map<std::string, double> terms;
  double total = 0;
};

// Weighted sum of all 13 terms. Perceptual and adversarial terms are
// supplied by the caller. Throws std::invalid_argument on a missing or
// unknown term.
LossReport composite_loss(const std::map<std::string, double>& terms);

double mae(const RgbImage& x, const RgbImage& y);
double mse(const RgbImage& x, const RgbImage& y);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean SSIM of the luminance channels over all valid window positions.
// Throws if either dimension is smaller than the window.
double ssim(const RgbImage& x, const RgbImage& y, const SsimOptions& opts = {});

// y = ln(1 + x); throws std::domain_error for negative or NaN input.
double log_encode(double x);
double log_decode(double y);
RgbImage log_encode(const RgbImage& img);
RgbImage log_decode(const RgbImage& img);

}  // namespace relight

#include "relight/metrics.h"

#include <cmath>
#include <stdexcept>

namespace relight {

double l1(const RgbImage& x, const RgbImage& y, const std::optional<Mask>& mask) {
  require_same_shape(x, y, "l1");
  if (mask) require_same_shape(x, mask->bits(), "l1 mask");
  double sum = 0;
  size_t n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (mask && !mask->bits()[i]) continue;
    for (int c = 0; c < 3; ++c) sum += std::fabs(x[i][c] - y[i][c]);
    n += 3;
  }
  if (n == 0) throw std::invalid_argument("l1: empty region");
  return sum / static_cast<double>(n);
}

double specular_weighted_l1(const RgbImage& x, const RgbImage& y, const RgbImage& s) {
  require_same_shape(x, y, "specular_weighted_l1");
  require_same_shape(x, s, "specular_weighted_l1 weights");
  if (x.empty()) throw std::invalid_argument("specular_weighted_l1: empty image");
  double sum = 0;
  for (size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) sum += std::fabs(x[i][c] * s[i][c] - y[i][c] * s[i][c]);
  return sum / static_cast<double>(3 * x.size());
}

const std::vector<LossTerm>& relight_loss_terms() {
  static const std::vector<LossTerm> terms = {
      {"normal", 10},        {"src_HDRI", 10},     {"src_diff", 0.2},
      {"albedo", 0.2},       {"PBR", 0.2},         {"Neural", 0.2},
      {"vgg_src_diff", 1},   {"vgg_albedo", 1},    {"vgg_PBR", 1},
      {"vgg_Neural", 1},     {"adv_PBR", 1},       {"adv_Neural", 1},
      {"spec_Neural", 0.2},
  };
  return terms;
}

LossReport composite_loss(const std::map<std::string, double>& terms) {
  const auto& spec = relight_loss_terms();
  for (const auto& [name, value] : terms) {
    bool known = false;
    for (const auto& t : spec) known = known || name == t.name;
    if (!known) throw std::invalid_argument("composite_loss: unknown term '" + name + "'");
  }
  LossReport report;
  // Neumaier summation, so the all-ones probe lands on 27 rather than
  // accumulating the representation error of the 0.2 weights.
  double sum = 0, carry = 0;
  for (const auto& t : spec) {
    const auto it = terms.find(t.name);
    if (it == terms.end())
      throw std::invalid_argument(std::string("composite_loss: missing term '") + t.name + "'");
    report.terms[t.name] = it->second;
    const double v = t.weight * it->second;
    const double next = sum + v;
    carry += std::fabs(sum) >= std::fabs(v) ? (sum - next) + v : (v - next) + sum;
    sum = next;
  }
  report.total = sum + carry;
  return report;
}

double mae(const RgbImage& x, const RgbImage& y) { return l1(x, y); }

double mse(const RgbImage& x, const RgbImage& y) {
  require_same_shape(x, y, "mse");
  if (x.empty()) throw std::invalid_argument("mse: empty image");
  double sum = 0;
  for (size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      const double d = x[i][c] - y[i][c];
      sum += d * d;
    }
  return sum / static_cast<double>(3 * x.size());
}

double ssim(const RgbImage& x, const RgbImage& y, const SsimOptions& opts) {
  require_same_shape(x, y, "ssim");
  const int win = opts.window;
  const int w = x.width();
  const int h = x.height();
  if (win <= 0 || w < win || h < win)
    throw std::invalid_argument("ssim: image smaller than the " + std::to_string(win) +
                                "x" + std::to_string(win) + " window");
  std::vector<double> kernel(static_cast<size_t>(win) * win);
  const int rad = win / 2;
  double ksum = 0;
  for (int j = 0; j < win; ++j)
    for (int i = 0; i < win; ++i) {
      const double dx = i - rad;
      const double dy = j - rad;
      ksum += kernel[j * win + i] = std::exp(-(dx * dx + dy * dy) / (2 * opts.sigma * opts.sigma));
    }
  for (auto& k : kernel) k /= ksum;

  ScalarImage lx(w, h), ly(w, h);
  for (size_t i = 0; i < x.size(); ++i) {
    lx[i] = luminance(x[i]);
    ly[i] = luminance(y[i]);
  }
  const double c1 = (opts.k1 * opts.dynamic_range) * (opts.k1 * opts.dynamic_range);
  const double c2 = (opts.k2 * opts.dynamic_range) * (opts.k2 * opts.dynamic_range);
  double total = 0;
  size_t count = 0;
  for (int y0 = 0; y0 + win <= h; ++y0)
    for (int x0 = 0; x0 + win <= w; ++x0) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int j = 0; j < win; ++j)
        for (int i = 0; i < win; ++i) {
          const double k = kernel[j * win + i];
          const double a = lx(x0 + i, y0 + j);
          const double b = ly(x0 + i, y0 + j);
          mx += k * a;
          my += k * b;
          sxx += k * a * a;
          syy += k * b * b;
          sxy += k * a * b;
        }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cov = sxy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return total / static_cast<double>(count);
}

double log_encode(double x) {
  if (!(x >= 0)) throw std::domain_error("log_encode: negative or NaN input");
  return std::log1p(x);
}

double log_decode(double y) {
  if (!(y >= 0)) throw std::domain_error("log_decode: negative or NaN input");
  return std::expm1(y);
}

RgbImage log_encode(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = log_encode(img[i][c]);
  return out;
}

RgbImage log_decode(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = log_decode(img[i][c]);
  return out;
}

}  // namespace relight

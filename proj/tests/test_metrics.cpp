#include <doctest.h>

#include "relight/metrics.h"
#include "support.h"

using namespace relight;
using doctest::Approx;

namespace {

RgbImage random_image(int w, int h, uint64_t seed) {
  RgbImage img(w, h);
  CounterRng rng(seed);
  for (auto& p : img.pixels()) p = {rng.uniform(), rng.uniform(), rng.uniform()};
  return img;
}

std::map<std::string, double> all_terms(double v) {
  std::map<std::string, double> t;
  for (const auto& term : relight_loss_terms()) t[term.name] = v;
  return t;
}

}  // namespace

TEST_CASE("l1 and its mask semantics") {
  const RgbImage x = random_image(8, 6, 1);
  CHECK(l1(x, x) == 0);
  CHECK(l1(RgbImage(4, 4), RgbImage(4, 4, gray(0.5))) == 0.5);

  // Differences only in the right half; the mask covers the left half.
  RgbImage y = x;
  MaskImage left(8, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 8; ++c) {
      if (c >= 4) y(c, r) = y(c, r) + gray(1);
      else left(c, r) = 1;
    }
  CHECK(l1(x, y, Mask(left, MaskKind::patch, 0)) == 0);
  CHECK(l1(x, y) == Approx(0.5));
  MaskImage right(8, 6);
  for (auto& v : right.pixels()) v = 1;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 4; ++c) right(c, r) = 0;
  CHECK(l1(x, y, Mask(right, MaskKind::patch, 0)) == Approx(1.0));

  CHECK(l1(x, y) == l1(y, x));
  CHECK(mae(x, y) == l1(x, y));
  CHECK_THROWS_AS(l1(x, RgbImage(8, 5)), std::invalid_argument);
  CHECK_THROWS_AS(l1(x, y, Mask(MaskImage(8, 6), MaskKind::patch, 0)), std::invalid_argument);
  CHECK_THROWS_AS(l1(x, y, Mask(MaskImage(4, 4, 1), MaskKind::patch, 0)), std::invalid_argument);
}

TEST_CASE("specular-weighted l1") {
  const RgbImage x = random_image(10, 10, 2), y = random_image(10, 10, 3);
  CHECK(specular_weighted_l1(x, y, RgbImage(10, 10)) == 0);
  CHECK(specular_weighted_l1(x, y, RgbImage(10, 10, gray(1))) == Approx(l1(x, y)).epsilon(1e-15));
  CHECK(specular_weighted_l1(x, y, RgbImage(10, 10, gray(4))) == Approx(4 * l1(x, y)).epsilon(1e-14));
  // Homogeneity of degree one in S for a non-constant S.
  const RgbImage s = random_image(10, 10, 4);
  RgbImage s3 = s;
  for (auto& p : s3.pixels()) p = p * 3.0;
  CHECK(specular_weighted_l1(x, y, s3) == Approx(3 * specular_weighted_l1(x, y, s)).epsilon(1e-14));
  CHECK_THROWS_AS(specular_weighted_l1(x, y, RgbImage(9, 10)), std::invalid_argument);
}

TEST_CASE("relighting objective weights") {
  const auto& terms = relight_loss_terms();
  CHECK(terms.size() == 13u);
  CHECK(composite_loss(all_terms(1)).total == 27.0);
  CHECK(composite_loss(all_terms(0)).total == 0);

  // Unit probes against the printed coefficients.
  const std::map<std::string, double> printed = {
      {"normal", 10},      {"src_HDRI", 10},   {"src_diff", 0.2},   {"albedo", 0.2}, {"PBR", 0.2},
      {"Neural", 0.2},     {"vgg_src_diff", 1}, {"vgg_albedo", 1}, {"vgg_PBR", 1},  {"vgg_Neural", 1},
      {"adv_PBR", 1},      {"adv_Neural", 1},  {"spec_Neural", 0.2}};
  for (const auto& [name, weight] : printed) {
    auto probe = all_terms(0);
    probe[name] = 1;
    const LossReport r = composite_loss(probe);
    CAPTURE(name);
    CHECK(r.total == weight);
    CHECK(r.terms.at(name) == 1);
  }

  // Linear in each term.
  auto t = all_terms(0);
  t["normal"] = 0.5;
  t["vgg_PBR"] = 2;
  CHECK(composite_loss(t).total == Approx(7.0));

  auto missing = all_terms(1);
  missing.erase("adv_PBR");
  CHECK_THROWS_AS(composite_loss(missing), std::invalid_argument);
  auto extra = all_terms(1);
  extra["lpips"] = 1;
  CHECK_THROWS_AS(composite_loss(extra), std::invalid_argument);
}

TEST_CASE("mse") {
  CHECK(mse(RgbImage(5, 5), RgbImage(5, 5, gray(0.5))) == 0.25);
  const RgbImage x = random_image(7, 7, 5), y = random_image(7, 7, 6);
  CHECK(mse(x, y) == mse(y, x));
  CHECK(mse(x, x) == 0);
  CHECK_THROWS_AS(mse(x, RgbImage(7, 6)), std::invalid_argument);
}

TEST_CASE("ssim") {
  const RgbImage x = random_image(32, 24, 7), y = random_image(32, 24, 8);
  CHECK(ssim(x, x) == Approx(1.0).epsilon(1e-12));
  CHECK(ssim(x, y) == Approx(ssim(y, x)).epsilon(1e-12));
  CHECK(ssim(x, y) < 0.5);
  CHECK(ssim(x, y) >= -1);

  // Constant images: variances vanish, so SSIM = (2ab + c1) / (a^2 + b^2 + c1).
  const double a = 0.3, b = 0.6, c1 = 0.01 * 0.01;
  CHECK(ssim(RgbImage(16, 16, gray(a)), RgbImage(16, 16, gray(b))) ==
        Approx((2 * a * b + c1) / (a * a + b * b + c1)).epsilon(1e-9));

  // Negated structure: y = 1 - x about a shared mean gives a negative score.
  RgbImage inv = x;
  for (auto& p : inv.pixels()) p = gray(1 - luminance(p));
  RgbImage lum = x;
  for (auto& p : lum.pixels()) p = gray(luminance(p));
  CHECK(ssim(lum, inv) < 0);

  CHECK_THROWS_AS(ssim(RgbImage(10, 10), RgbImage(10, 10)), std::invalid_argument);
  CHECK_THROWS_AS(ssim(x, RgbImage(32, 23)), std::invalid_argument);
}

TEST_CASE("log codec") {
  CHECK(log_encode(0.0) == 0);
  CHECK(log_encode(std::exp(1.0) - 1) == Approx(1.0).epsilon(1e-15));
  CounterRng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(0, 1e4);
    CHECK(log_decode(log_encode(x)) == Approx(x).epsilon(1e-12));
  }
  CHECK_THROWS_AS(log_encode(-1e-9), std::domain_error);
  CHECK_THROWS_AS(log_encode(NAN), std::domain_error);
  CHECK_THROWS_AS(log_decode(-0.5), std::domain_error);
  const RgbImage img = random_image(4, 4, 10);
  const RgbImage back = log_decode(log_encode(img));
  CHECK(test::max_abs_diff(back, img) <= 1e-15);
}

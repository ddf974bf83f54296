#include <doctest.h>

#include "relight/brdf.h"
#include "support.h"

using namespace relight;
using doctest::Approx;

namespace {

// Independent forms, written out from their definitions.
double g1_oracle(double c, double alpha) {
  const double k = alpha / 2;
  return c / (c * (1 - k) + k);
}

double ggx_oracle(double nh, double alpha) {
  const double a2 = alpha * alpha;
  const double d = nh * nh * (a2 - 1) + 1;
  return a2 / (pi * d * d);
}

vec3 unit(double x, double y, double z) { return Direction(x, y, z); }

}  // namespace

TEST_CASE("diffuse term is albedo over pi") {
  const Rgb one = eval_diffuse(make_material({1, 1, 1}, 0.5, 0.04));
  CHECK(one.r == Approx(0.3183).epsilon(1e-4));
  CHECK(one.g == one.r);
  CHECK(eval_diffuse(make_material({0, 0, 0}, 0.5, 0.04)) == Rgb{});
  const Rgb c = eval_diffuse(make_material({0.5, 0.25, 0.1}, 0.5, 0.04));
  CHECK(c.r == Approx(0.1592).epsilon(1e-3));
  CHECK(c.g == Approx(0.0796).epsilon(1e-3));
  CHECK(c.b == Approx(0.0318).epsilon(2e-3));
}

TEST_CASE("ggx distribution closed forms") {
  const vec3 n = {0, 0, 1};
  CHECK(ggx_distribution(n, n, 1.0) == Approx(1 / pi));
  CHECK(ggx_distribution(n, n, 0.5) == Approx(1.2732).epsilon(1e-4));
  CHECK(ggx_distribution(n, {1, 0, 0}, 0.3) == Approx(0.09 / pi));
  CHECK(ggx_distribution(n, {0, 0, -1}, 0.3) == Approx(0.09 / pi));  // clamped
  CHECK_THROWS_AS(ggx_distribution(n, n, 0.0), std::domain_error);
  CHECK_THROWS_AS(ggx_distribution(n, n, -0.1), std::domain_error);

  CounterRng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const vec3 h = test::random_unit(rng);
    const double a = rng.uniform(0.01, 1);
    CHECK(ggx_distribution(n, h, a) == Approx(ggx_oracle(std::max(0.0, h.z), a)).epsilon(1e-12));
  }
}

TEST_CASE("ggx lobe integrates to one") {
  // Stratified over (cos theta, phi): integral of D(h) <n.h> dh.
  const vec3 n = {0, 0, 1};
  for (double alpha : {0.1, 0.5, 1.0}) {
    CounterRng rng(11, static_cast<uint64_t>(alpha * 100));
    const int strata = 1000;
    double sum = 0;
    for (int i = 0; i < strata; ++i)
      for (int j = 0; j < strata; ++j) {
        const double u = (i + rng.uniform()) / strata;
        const double phi = 2 * pi * (j + rng.uniform()) / strata;
        const double s = std::sqrt(1 - u * u);
        const vec3 h = {s * std::cos(phi), s * std::sin(phi), u};
        sum += ggx_distribution(n, h, alpha) * u;
      }
    const double integral = 2 * pi * sum / (double(strata) * strata);
    CAPTURE(alpha);
    CHECK(integral == Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("smith geometry") {
  const vec3 n = {0, 0, 1};
  for (double a : {0.05, 0.5, 1.0}) {
    CHECK(smith_geometry(n, n, n, a) == Approx(g1_oracle(1, a) * g1_oracle(1, a)));
    CHECK(smith_geometry(n, n, n, a) == 1.0);
  }
  const vec3 v = unit(0.3, 0.1, 0.8);
  const vec3 l = unit(-0.5, 0.4, 0.3);
  CHECK(smith_geometry(n, v, l, 0.4) == smith_geometry(n, l, v, 0.4));
  CHECK(smith_geometry(n, v, l, 0.4) == Approx(g1_oracle(v.z, 0.4) * g1_oracle(l.z, 0.4)));
  CHECK(smith_geometry(n, v, {1, 0, 0}, 0.4) == 0);
  CHECK(smith_geometry(n, v, {0, 0, -1}, 0.4) == 0);
  CHECK_THROWS_AS(smith_geometry(n, v, l, 0.0), std::domain_error);
}

TEST_CASE("schlick fresnel") {
  CHECK(schlick_fresnel(1.0, 0.04) == Approx(0.04));
  CHECK(schlick_fresnel(0.0, 0.04) == Approx(1.0));
  CHECK(schlick_fresnel(0.0, 0.7) == Approx(1.0));
  CHECK(schlick_fresnel(0.5, 0.0) == Approx(0.03125));
  const vec3 z = {0, 0, 1};
  CHECK(schlick_fresnel(z, z, 0.04) == Approx(0.04));
  CounterRng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double c = rng.uniform();
    const double f0 = rng.uniform();
    const double f = schlick_fresnel(c, f0);
    CHECK(f >= f0 - 1e-15);
    CHECK(f <= 1 + 1e-15);
  }
}

TEST_CASE("specular term") {
  const vec3 n = {0, 0, 1};
  CHECK(eval_specular(n, n, n, make_material({1, 1, 1}, 0.5, 0)) == 0);
  CHECK(eval_specular(n, unit(0, 0.3, 1), {1, 0, 0}, make_material({1, 1, 1}, 0.5, 0.5)) == 0);
  CHECK(eval_specular(n, unit(0, 0.3, 1), unit(0, 0.2, -1), make_material({1, 1, 1}, 0.5, 0.5)) == 0);
  // n = v = l, f0 = 1: D G F / 4 with F = 1 and G = G1(1)^2.
  const double expected = ggx_oracle(1, 0.5) * g1_oracle(1, 0.5) * g1_oracle(1, 0.5) / 4;
  CHECK(eval_specular(n, n, n, make_material({1, 1, 1}, 0.5, 1)) == Approx(expected));
  CHECK(expected == Approx(1.2732 / 4).epsilon(1e-4));

  // General configuration against the composed oracles.
  const vec3 v = unit(0.2, -0.3, 0.9);
  const vec3 l = unit(-0.4, 0.1, 0.7);
  const vec3 h = Direction(v + l);
  const double a = 0.35, f0 = 0.2;
  const double f = f0 + (1 - f0) * std::pow(1 - dot(v, h), 5);
  const double oracle = ggx_oracle(h.z, a) * g1_oracle(v.z, a) * g1_oracle(l.z, a) * f / (4 * v.z * l.z);
  CHECK(eval_specular(n, v, l, make_material({1, 1, 1}, a, f0)) == Approx(oracle).epsilon(1e-12));
}

TEST_CASE("full brdf is the sum of its terms") {
  const vec3 n = {0, 0, 1};
  const Rgb black_body = eval_brdf(n, n, n, make_material({0, 0, 0}, 0.5, 0));
  CHECK(black_body == Rgb{});
  const Rgb white = eval_brdf(n, n, n, make_material({1, 1, 1}, 0.5, 0));
  CHECK(white.r == Approx(1 / pi));
  CHECK(white.b == Approx(1 / pi));

  const vec3 v = unit(0.1, 0.2, 0.9);
  const vec3 l = unit(0.5, -0.2, 0.6);
  const Material m = make_material({0.3, 0.6, 0.9}, 0.2, 0.08);
  const Rgb total = eval_brdf(n, v, l, m);
  const double s = eval_specular(n, v, l, m);
  for (int c = 0; c < 3; ++c) CHECK(total[c] == Approx(m.albedo[c] / pi + s));
}

TEST_CASE("reciprocity and non-negativity on fuzzed triples") {
  CounterRng rng(2024);
  int mismatches = 0, negatives = 0;
  for (int i = 0; i < 100000; ++i) {
    const vec3 n = test::random_unit(rng);
    const vec3 v = test::random_unit(rng);
    const vec3 l = test::random_unit(rng);
    const Material m = make_material({rng.uniform(), rng.uniform(), rng.uniform()}, rng.uniform(0.001, 1),
                                     rng.uniform());
    const double a = eval_specular(n, v, l, m);
    const double b = eval_specular(n, l, v, m);
    mismatches += a != b;
    const Rgb f = eval_brdf(n, v, l, m);
    negatives += !(a >= 0) || !(f.r >= 0) || !(f.g >= 0) || !(f.b >= 0);
  }
  CHECK(mismatches == 0);
  CHECK(negatives == 0);
}

TEST_CASE("material construction") {
  CHECK(make_material({0.5, 0.5, 0.5}, 1e-5, 0.04).roughness == min_roughness);
  CHECK_THROWS_AS(make_material({0.5, 0.5, 0.5}, 0.0, 0.04), std::invalid_argument);
  CHECK(make_material({0.5, 0.5, 0.5}, 0.3, 0.04).roughness == 0.3);
  CHECK_THROWS_AS(make_material({1.5, 0.5, 0.5}, 0.3, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(make_material({0.5, 0.5, 0.5}, 1.5, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(make_material({0.5, 0.5, 0.5}, -0.1, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(make_material({0.5, 0.5, 0.5}, 0.3, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(make_material({NAN, 0.5, 0.5}, 0.3, 0.1), std::invalid_argument);
}

TEST_CASE("direction normalizes and rejects zero") {
  const Direction d(3, 0, 4);
  CHECK(d.x() == Approx(0.6));
  CHECK(length(d) == Approx(1).epsilon(1e-15));
  CHECK_THROWS_AS(Direction(0, 0, 0), std::domain_error);
}

#include "relight/brdf.h"

#include <stdexcept>
#include <string>

namespace relight {

namespace {

void check_roughness(double roughness) {
  if (!(roughness > 0))
    throw std::domain_error("roughness must be positive, got " +
                            std::to_string(roughness));
}

bool in_unit_range(double v) { return v >= 0 && v <= 1; }

}  // namespace

Material make_material(const Rgb& albedo, double roughness, double f0) {
  if (!in_unit_range(albedo.r) || !in_unit_range(albedo.g) ||
      !in_unit_range(albedo.b))
    throw std::invalid_argument("material: albedo outside [0,1]");
  if (!(roughness > 0) || roughness > 1)
    throw std::invalid_argument("material: roughness outside (0,1]");
  if (!in_unit_range(f0))
    throw std::invalid_argument("material: f0 outside [0,1]");
  return {albedo, roughness < min_roughness ? min_roughness : roughness, f0};
}

Rgb eval_diffuse(const Material& material) { return material.albedo / pi; }

double ggx_distribution(const vec3& n, const vec3& h, double roughness) {
  check_roughness(roughness);
  const double a2 = roughness * roughness;
  const double nh = cdot(n, h);
  const double t = nh * nh * (a2 - 1) + 1;
  return a2 / (pi * t * t);
}

double smith_g1(double cos_theta, double roughness) {
  check_roughness(roughness);
  const double k = roughness / 2;
  return cos_theta / (cos_theta * (1 - k) + k);
}

double smith_geometry(const vec3& n, const vec3& v, const vec3& l,
                      double roughness) {
  return smith_g1(cdot(n, v), roughness) * smith_g1(cdot(n, l), roughness);
}

double schlick_fresnel(double cos_theta, double f0) {
  const double c = cos_theta < 0 ? 0 : (cos_theta > 1 ? 1 : cos_theta);
  const double m = 1 - c;
  const double m2 = m * m;
  return f0 + (1 - f0) * (m2 * m2 * m);
}

double schlick_fresnel(const vec3& v, const vec3& h, double f0) {
  return schlick_fresnel(cdot(v, h), f0);
}

double eval_specular(const vec3& n, const vec3& v, const vec3& l,
                     const Material& material) {
  const double nl = cdot(n, l);
  const double nv = cdot(n, v);
  if (nl <= 0 || nv <= 0) return 0;
  const vec3 sum = v + l;
  const double len = length(sum);
  if (!(len > 0)) return 0;
  const vec3 h = sum / len;
  const double d = ggx_distribution(n, h, material.roughness);
  const double g = smith_g1(nv, material.roughness) *
                   smith_g1(nl, material.roughness);
  // v.h and l.h agree analytically; averaging keeps the result bitwise
  // symmetric under swapping v and l.
  const double vh = 0.5 * (cdot(v, h) + cdot(l, h));
  const double f = schlick_fresnel(vh, material.f0);
  double denom = 4 * (nl * nv);
  if (denom < specular_denominator_floor) denom = specular_denominator_floor;
  return d * g * f / denom;
}

Rgb eval_brdf(const vec3& n, const vec3& v, const vec3& l,
              const Material& material) {
  const double s = eval_specular(n, v, l, material);
  const Rgb d = eval_diffuse(material);
  return {d.r + s, d.g + s, d.b + s};
}

}  // namespace relight

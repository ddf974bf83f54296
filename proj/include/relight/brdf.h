// Lambertian diffuse plus Cook-Torrance specular reflectance.
//
// The specular lobe is D * G * F / (4 <n.l> <n.v>) with
//   D: GGX / Trowbridge-Reitz, roughness used directly as the width,
//   G: separable Smith with the Schlick-GGX G1, k = roughness / 2,
//   F: Schlick with a scalar normal-incidence reflectivity f0.
// All dot products are clamped to [0, 1].
#pragma once

#include "relight/vec.h"

namespace relight {

inline constexpr double min_roughness = 1e-3;
inline constexpr double specular_denominator_floor = 1e-6;

struct Material {
  Rgb albedo = {0.5, 0.5, 0.5};
  double roughness = 0.5;
  double f0 = 0.04;
};

// Validates ranges and floors roughness at min_roughness.
// Throws std::invalid_argument on out-of-range or non-finite input.
Material make_material(const Rgb& albedo, double roughness, double f0);

Rgb eval_diffuse(const Material& material);

// Throws std::domain_error if roughness <= 0.
double ggx_distribution(const vec3& n, const vec3& h, double roughness);

// Schlick-GGX masking term for one direction given its clamped cosine.
double smith_g1(double cos_theta, double roughness);
double smith_geometry(const vec3& n, const vec3& v, const vec3& l,
                      double roughness);

double schlick_fresnel(double cos_theta, double f0);
double schlick_fresnel(const vec3& v, const vec3& h, double f0);

// Scalar specular BRDF; zero when either direction is below the horizon.
double eval_specular(const vec3& n, const vec3& v, const vec3& l,
                     const Material& material);

// Diffuse + specular, the specular term added to every channel.
Rgb eval_brdf(const vec3& n, const vec3& v, const vec3& l,
              const Material& material);

}  // namespace relight

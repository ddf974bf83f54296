// Forward image formation under environment lighting.
//
// Camera: orthographic, every pixel sees along the same view direction
// (default +Z, toward the viewer). Shading is local and unshadowed. All
// values are linear radiance.
#pragma once

#include "relight/brdf.h"
#include "relight/envmap.h"
#include "relight/image.h"

namespace relight {

// Per-pixel surface attributes consumed by the renderer.
struct IntrinsicBundle {
  NormalImage normal;
  RgbImage albedo;
  ScalarImage roughness;
  ScalarImage f0;
  MaskImage mask;  // 1 = foreground

  int width() const { return normal.width(); }
  int height() const { return normal.height(); }

  // Throws std::invalid_argument if the maps disagree in resolution.
  void check_shape() const;
  bool foreground(size_t i) const { return mask[i] != 0; }
  // Roughness floored at min_roughness; no range validation.
  Material material_at(size_t i) const;

  friend bool operator==(const IntrinsicBundle&, const IntrinsicBundle&) = default;
};

struct RenderOutput {
  RgbImage diffuse;
  RgbImage specular;
  RgbImage pbr;  // diffuse + specular
};

struct RenderOptions {
  int workers = 0;  // 0 = hardware concurrency
  // Preview only: box-filter the env by this factor before shading.
  int env_downsample = 1;
};

struct ShadingTerms {
  bool diffuse = true;
  bool specular = true;
};

inline const Direction default_view = Direction::from_unit({0, 0, 1});

// Response of one pixel to a directional light of unit energy
// (radiance x steradian) from `l`: f(v, l) <n.l>.
Rgb shade_directional(const vec3& n, const vec3& v, const vec3& l,
                      const Material& material, ShadingTerms terms = {});

// (albedo / pi) * sum_t E_t * integral over texel t of <n.l> dl.
RgbImage render_diffuse(const IntrinsicBundle& bundle, const EnvMap& env,
                        const RenderOptions& opts = {});

// sum_t f_s(v, l_t) E_t <n.l_t> omega_t over texel centers.
RgbImage render_specular(const IntrinsicBundle& bundle, const EnvMap& env,
                         const Direction& view = default_view,
                         const RenderOptions& opts = {});

RenderOutput render_pbr(const IntrinsicBundle& bundle, const EnvMap& env,
                        const Direction& view = default_view,
                        const RenderOptions& opts = {});

// Re-renders the bundle under a target environment; the pbr image.
RgbImage relight(const IntrinsicBundle& bundle, const EnvMap& env_target,
                 const Direction& view = default_view,
                 const RenderOptions& opts = {});

}  // namespace relight

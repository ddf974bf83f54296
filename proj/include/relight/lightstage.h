// Synthetic light stage: OLAT rigs, reflectance-field compositing and
// photometric stereo.
#pragma once

#include <cstdint>
#include <vector>

#include "relight/envmap.h"
#include "relight/render.h"

namespace relight {

inline constexpr int default_rig_lights = 137;
inline constexpr double default_shadow_threshold = 1e-4;
// Energy (radiance x steradian) delivered by each OLAT light. With pi, a
// Lambertian pixel measures albedo * <n.l>.
inline constexpr double default_olat_energy = pi;

struct LightRig {
  std::vector<Direction> directions;
  int count() const { return static_cast<int>(directions.size()); }
};

// Ordered light directions plus one linear image per light.
struct OlatStack {
  LightRig rig;
  std::vector<RgbImage> images;
  double light_energy = default_olat_energy;

  int width() const { return images.empty() ? 0 : images.front().width(); }
  int height() const { return images.empty() ? 0 : images.front().height(); }
  // Throws std::invalid_argument on count or resolution mismatch.
  void check() const;
};

// Per-light Rgb energy (radiance x steradian).
struct RigWeights {
  std::vector<Rgb> weights;
};

// Spherical Fibonacci directions over the full sphere. Seed 0 is the
// canonical layout; other seeds rotate it about +Y. Throws for count < 3.
LightRig make_rig(int count = default_rig_lights, uint64_t seed = 0);

// Renders one image per rig light with a directional light of
// `light_energy` from that direction, through the same BRDF code as the
// environment renderer.
OlatStack render_olat(const IntrinsicBundle& bundle, const LightRig& rig,
                      const Direction& view = default_view,
                      ShadingTerms terms = {},
                      double light_energy = default_olat_energy,
                      const RenderOptions& opts = {});

// Each env texel's energy E * omega goes to the rig light with the largest
// dot product against the texel center (lowest index on ties).
RigWeights project_env_to_rig(const EnvMap& env, const LightRig& rig);

// sum_i (weight_i / light_energy) * image_i, channelwise.
RgbImage composite(const OlatStack& stack, const RigWeights& weights);

struct PhotometricStereoResult {
  NormalImage normal;   // zero on invalid pixels
  RgbImage albedo;      // on the albedo-map scale; zero on invalid pixels
  MaskImage valid;      // 1 where a fit was made
  ScalarImage residual; // RMS luminance residual / RMS luminance
  int invalid_count = 0;
};

// Woodham least squares on luminance m_i = rho <n.l_i> over lights above
// `shadow_threshold`, then a per-channel albedo refit with n fixed. Pixels
// with fewer than three usable lights or a rank-deficient light matrix are
// flagged invalid.
PhotometricStereoResult photometric_stereo(
    const OlatStack& stack, double shadow_threshold = default_shadow_threshold,
    int workers = 0);

}  // namespace relight

// Analytic inverse rendering: albedo from diffuse render / shading, and
// bundle sanity checks.
#pragma once

#include <string>
#include <vector>

#include "relight/render.h"

namespace relight {

inline constexpr double default_shading_eps = 1e-3;
inline constexpr double default_albedo_max = 1.0;

struct AlbedoRecovery {
  RgbImage albedo;
  MaskImage flagged;  // 1 where some channel's shading fell below eps
  int flagged_count = 0;
};

// albedo = pi * render / max(shading, eps), channelwise, clamped to
// [0, albedo_max]. Non-finite inputs produce 0 and a flag.
AlbedoRecovery recover_albedo(const RgbImage& diffuse_render,
                              const RgbImage& shading,
                              double eps = default_shading_eps,
                              double albedo_max = default_albedo_max);

struct Check {
  std::string name;
  bool passed = true;
  int worst_x = -1;
  int worst_y = -1;
  double magnitude = 0;  // worst violation, 0 when passed
};

struct Diagnostics {
  std::vector<Check> checks;

  bool ok() const;
  const Check& find(const std::string& name) const;
};

// Checks shape, unit normals on foreground (|len - 1| <= 1e-3), albedo in
// [0,1], roughness in (0,1], f0 in [0,1], finiteness and a binary mask.
Diagnostics validate_bundle(const IntrinsicBundle& bundle);

}  // namespace relight

#include "relight/intrinsics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relight {

AlbedoRecovery recover_albedo(const RgbImage& diffuse_render, const RgbImage& shading,
                              double eps, double albedo_max) {
  require_same_shape(diffuse_render, shading, "recover_albedo");
  if (!(eps > 0)) throw std::invalid_argument("recover_albedo: eps must be positive");
  if (!(albedo_max > 0))
    throw std::invalid_argument("recover_albedo: albedo_max must be positive");
  AlbedoRecovery out;
  out.albedo = RgbImage(shading.width(), shading.height());
  out.flagged = MaskImage(shading.width(), shading.height());
  for (size_t i = 0; i < shading.size(); ++i) {
    bool flag = false;
    for (int c = 0; c < 3; ++c) {
      const double s = shading[i][c];
      const double r = diffuse_render[i][c];
      if (!std::isfinite(s) || !std::isfinite(r)) {
        flag = true;
        continue;
      }
      if (s < eps) flag = true;
      const double a = pi * (r / std::max(s, eps));
      out.albedo[i][c] = std::clamp(a, 0.0, albedo_max);
    }
    if (flag) {
      out.flagged[i] = 1;
      ++out.flagged_count;
    }
  }
  return out;
}

bool Diagnostics::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check& Diagnostics::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

namespace {

// Tracks the worst violation of one check.
struct Tracker {
  Check check;
  explicit Tracker(std::string name) { check.name = std::move(name); }
  void violation(double magnitude, int x, int y) {
    if (check.passed || magnitude > check.magnitude) {
      check.magnitude = magnitude;
      check.worst_x = x;
      check.worst_y = y;
    }
    check.passed = false;
  }
};

double outside(double v, double lo, double hi) {
  if (!std::isfinite(v)) return INFINITY;
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0;
}

}  // namespace

Diagnostics validate_bundle(const IntrinsicBundle& b) {
  Diagnostics d;
  Tracker shape("resolution");
  const bool same = b.normal.same_shape(b.albedo) && b.normal.same_shape(b.roughness) &&
                    b.normal.same_shape(b.f0) && b.normal.same_shape(b.mask);
  if (!same) shape.violation(1, -1, -1);
  d.checks.push_back(shape.check);
  if (!same) return d;

  Tracker unit("unit_normals"), albedo("albedo_range"), rough("roughness_range"),
      f0("f0_range"), finite("finite"), mask("mask_binary");
  const int w = b.width();
  for (size_t i = 0; i < b.normal.size(); ++i) {
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    if (b.mask[i] > 1) mask.violation(b.mask[i], x, y);
    if (!b.foreground(i)) continue;
    const vec3& n = b.normal[i];
    const Rgb& a = b.albedo[i];
    const bool all_finite = std::isfinite(n.x) && std::isfinite(n.y) && std::isfinite(n.z) &&
                            is_finite(a) && std::isfinite(b.roughness[i]) &&
                            std::isfinite(b.f0[i]);
    if (!all_finite) finite.violation(INFINITY, x, y);
    const double len_err = std::fabs(length(n) - 1);
    if (!(len_err <= 1e-3)) unit.violation(len_err, x, y);
    const double ae = std::max({outside(a.r, 0, 1), outside(a.g, 0, 1), outside(a.b, 0, 1)});
    if (ae > 0) albedo.violation(ae, x, y);
    const double r = b.roughness[i];
    // Zero roughness is measured against the floor so it reports non-zero.
    if (!(r > 0) || r > 1)
      rough.violation(r > 1 ? r - 1 : (std::isfinite(r) ? min_roughness - r : INFINITY), x, y);
    const double fe = outside(b.f0[i], 0, 1);
    if (fe > 0) f0.violation(fe, x, y);
  }
  for (auto* t : {&unit, &albedo, &rough, &f0, &finite, &mask}) d.checks.push_back(t->check);
  return d;
}

}  // namespace relight

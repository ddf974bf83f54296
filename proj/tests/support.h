// Shared fixtures for the test binaries.
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>

#include "relight/envmap.h"
#include "relight/render.h"
#include "relight/rng.h"
#include "relight/scene.h"

namespace relight::test {

inline EnvMap uniform_env(double value, int height = default_env_height) {
  return EnvMap(height, 2 * height, gray(value));
}

// Every pixel foreground with the same normal and material.
inline IntrinsicBundle flat_bundle(int width, int height, const vec3& n, const Rgb& albedo,
                                   double roughness, double f0) {
  IntrinsicBundle b;
  b.normal = NormalImage(width, height, n);
  b.albedo = RgbImage(width, height, albedo);
  b.roughness = ScalarImage(width, height, roughness);
  b.f0 = ScalarImage(width, height, f0);
  b.mask = MaskImage(width, height, 1);
  return b;
}

inline IntrinsicBundle sphere(int resolution, const Rgb& albedo, double roughness, double f0) {
  SceneSpec spec;
  spec.kind = SceneKind::sphere;
  spec.resolution = resolution;
  spec.albedo = {FieldKind::constant, albedo, albedo};
  spec.roughness = {FieldKind::constant, roughness, roughness};
  spec.f0 = {FieldKind::constant, f0, f0};
  return generate(spec);
}

inline vec3 random_unit(CounterRng& rng) {
  const double z = rng.uniform(-1, 1);
  const double phi = rng.uniform(0, 2 * pi);
  const double r = std::sqrt(std::max(0.0, 1 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// Non-uniform, strictly positive env with structure in every direction.
inline EnvMap textured_env(uint64_t seed, int height = default_env_height) {
  CounterRng rng(seed, 77);
  EnvMap env(height, 2 * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < env.width(); ++c)
      env.at(r, c) = {rng.uniform(0.05, 2.0), rng.uniform(0.05, 2.0), rng.uniform(0.05, 2.0)};
  return env;
}

inline double max_abs_diff(const RgbImage& a, const RgbImage& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < 3; ++c) m = std::max(m, std::fabs(a[i][c] - b[i][c]));
  return m;
}

inline double max_abs(const RgbImage& a) {
  double m = 0;
  for (const auto& p : a.pixels()) m = std::max(m, max_component(p));
  return m;
}

inline double angle_deg(const vec3& a, const vec3& b) {
  return std::acos(std::clamp(dot(a, b) / (length(a) * length(b)), -1.0, 1.0)) * 180 / pi;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("relight-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace relight::test

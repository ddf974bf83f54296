// Equirectangular environment maps.
//
// Convention (tag "equirect-yup-negz-v1"):
//
//        col 0                col w/2               col w-1
//   row 0  +----------------------+----------------------+   theta = 0   (+Y)
//          |                      |                      |
//          |  -Z    -> +X  ->    +Z    -> -X  ->    -Z   |   theta = pi/2
//          |                      |                      |
//   row h-1+----------------------+----------------------+   theta = pi  (-Y)
//
// A texel (row, col) has its center at colatitude theta = (row + 0.5) pi / h
// and longitude phi = (col + 0.5) 2 pi / w, with
//   d = (sin(theta) sin(phi), cos(theta), -sin(theta) cos(phi)).
// Longitude 0 looks down -Z and increases toward +X. A camera at +Z looking
// down -Z therefore sees the light behind it at the center column.
#pragma once

#include <utility>
#include <vector>

#include "relight/image.h"
#include "relight/vec.h"

namespace relight {

inline constexpr const char* env_convention_tag = "equirect-yup-negz-v1";
inline constexpr int default_env_height = 32;
inline constexpr int default_env_width = 64;
inline constexpr int default_convolved_height = 64;
inline constexpr int default_convolved_width = 128;

// Radiance map with width == 2 * height.
class EnvMap {
 public:
  EnvMap() = default;
  EnvMap(int height, int width, const Rgb& fill = {});
  // Takes ownership of an image; throws if it is not 2:1 or has negative or
  // non-finite texels.
  explicit EnvMap(RgbImage texels);

  int height() const { return texels_.height(); }
  int width() const { return texels_.width(); }
  Rgb& at(int row, int col) { return texels_(col, row); }
  const Rgb& at(int row, int col) const { return texels_(col, row); }
  const RgbImage& image() const { return texels_; }
  RgbImage& image() { return texels_; }

  friend bool operator==(const EnvMap& a, const EnvMap& b) {
    return a.texels_ == b.texels_;
  }

 private:
  RgbImage texels_;
};

EnvMap operator+(const EnvMap& a, const EnvMap& b);
EnvMap operator*(const EnvMap& a, double s);

struct ConvolvedEnvMap {
  std::vector<int> exponents;
  std::vector<EnvMap> maps;

  // Throws std::invalid_argument if the exponent is absent.
  const EnvMap& map_for(int exponent) const;
};

// Per-row solid angle of an equirectangular grid, in steradians per texel.
struct SolidAngleTable {
  int width = 0;
  std::vector<double> row_weights;

  double total() const;
};

// Throws std::out_of_range for indices outside the grid.
Direction texel_to_dir(int row, int col, int height, int width);
std::pair<int, int> dir_to_texel(const vec3& d, int height, int width);

// Exact band measure: (2 pi / w) (cos theta_top - cos theta_bottom).
SolidAngleTable solid_angles(int height, int width);

struct ConvolveOptions {
  // Sub-samples per texel side used to integrate the lobe over each
  // input texel's footprint.
  int footprint_samples = 4;
  int workers = 0;
};

inline const std::vector<int>& default_phong_exponents() {
  static const std::vector<int> exps = {1, 16, 32, 64};
  return exps;
}

// E_p(l') = sum over input texels of E(l) * integral over the texel of
// <l'.l>^p dl, with the input treated as piecewise constant. Lobes are not
// normalized. Output texel directions are the output grid's own centers.
ConvolvedEnvMap convolve_phong(
    const EnvMap& env,
    const std::vector<int>& exponents = default_phong_exponents(),
    int out_height = default_convolved_height,
    int out_width = default_convolved_width, const ConvolveOptions& opts = {});

// Bilinear lookup, longitude wraps, latitude clamps at the poles.
Rgb sample_env(const EnvMap& env, const vec3& d);

// Rotates the map about +Y by `yaw` radians. Content at longitude phi moves
// to phi + yaw. Multiples of 2 pi / width are exact column rolls.
EnvMap rotate_env(const EnvMap& env, double yaw);

// Mirror across the x = 0 plane (reverses column order).
EnvMap mirror_env(const EnvMap& env);

// Box-filters by an integer factor that divides the height.
EnvMap downsample_env(const EnvMap& env, int factor);

// Per-pixel p=1 lookup. Pixels with a zero normal get 0.
RgbImage diffuse_shading(const ConvolvedEnvMap& conv,
                         const NormalImage& normals);

}  // namespace relight

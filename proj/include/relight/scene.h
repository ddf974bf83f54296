// Procedural scenes with analytic ground truth.
#pragma once

#include <cstdint>
#include <string>

#include "relight/render.h"

namespace relight {

enum class SceneKind { sphere, heightfield };
enum class FieldKind { constant, checker, gradient, noise };

// A material channel painted over the image: `a` alone for constant,
// a/b alternating for checker, a->b left to right for gradient,
// value noise between a and b for noise.
template <typename T>
struct Field {
  FieldKind kind = FieldKind::constant;
  T a{};
  T b{};
  int cells = 8;  // checker squares / noise lattice cells across the image

  friend bool operator==(const Field&, const Field&) = default;
};

struct SceneSpec {
  SceneKind kind = SceneKind::sphere;
  int resolution = 64;
  Field<Rgb> albedo = {FieldKind::constant, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
  Field<double> roughness = {FieldKind::constant, 0.5, 0.5};
  Field<double> f0 = {FieldKind::constant, 0.04, 0.04};
  // Heightfield relief: z = amplitude * noise(x, y) over the unit square.
  double height_amplitude = 0.08;
  int height_cells = 4;
  uint64_t seed = 0;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

// Throws std::invalid_argument for resolution < 16 or out-of-range
// material values.
void validate(const SceneSpec& spec);

IntrinsicBundle generate(const SceneSpec& spec);

// Integer-hash value noise in [0, 1) at lattice point (ix, iy).
double lattice_value(int64_t ix, int64_t iy, uint64_t seed);

// Smoothly interpolated value noise and its gradient at (x, y) in lattice
// units. Uses only + - * so results are identical across platforms.
struct NoiseSample {
  double value;
  double dx;
  double dy;
};
NoiseSample value_noise(double x, double y, uint64_t seed);

const char* to_string(SceneKind kind);
const char* to_string(FieldKind kind);
SceneKind parse_scene_kind(const std::string& s);
FieldKind parse_field_kind(const std::string& s);

}  // namespace relight

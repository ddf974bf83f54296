#include "relight/scene.h"

#include <cmath>
#include <stdexcept>

#include "relight/rng.h"

namespace relight {

namespace {

bool unit_range(double v) { return v >= 0 && v <= 1; }
bool unit_range(const Rgb& c) {
  return unit_range(c.r) && unit_range(c.g) && unit_range(c.b);
}

template <typename T>
T lerp(const T& a, const T& b, double t) {
  return a * (1 - t) + b * t;
}

template <typename T>
T eval_field(const Field<T>& f, double u, double v, uint64_t seed) {
  switch (f.kind) {
    case FieldKind::constant:
      return f.a;
    case FieldKind::checker: {
      const auto cu = static_cast<int64_t>(std::floor(u * f.cells));
      const auto cv = static_cast<int64_t>(std::floor(v * f.cells));
      return ((cu + cv) % 2 == 0) ? f.a : f.b;
    }
    case FieldKind::gradient:
      return lerp(f.a, f.b, u);
    case FieldKind::noise:
      return lerp(f.a, f.b, value_noise(u * f.cells, v * f.cells, seed).value);
  }
  return f.a;
}

}  // namespace

double lattice_value(int64_t ix, int64_t iy, uint64_t seed) {
  const uint64_t h = mix64(seed ^ mix64(static_cast<uint64_t>(ix) * 0x8cb92ba72f3d8dd7ull ^
                                        mix64(static_cast<uint64_t>(iy))));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

NoiseSample value_noise(double x, double y, uint64_t seed) {
  const double x0 = std::floor(x);
  const double y0 = std::floor(y);
  const double fx = x - x0;
  const double fy = y - y0;
  const auto ix = static_cast<int64_t>(x0);
  const auto iy = static_cast<int64_t>(y0);
  const double v00 = lattice_value(ix, iy, seed);
  const double v10 = lattice_value(ix + 1, iy, seed);
  const double v01 = lattice_value(ix, iy + 1, seed);
  const double v11 = lattice_value(ix + 1, iy + 1, seed);
  const double sx = fx * fx * (3 - 2 * fx);
  const double sy = fy * fy * (3 - 2 * fy);
  const double dsx = 6 * fx * (1 - fx);
  const double dsy = 6 * fy * (1 - fy);
  NoiseSample s;
  s.value = v00 * (1 - sx) * (1 - sy) + v10 * sx * (1 - sy) + v01 * (1 - sx) * sy +
            v11 * sx * sy;
  s.dx = dsx * ((v10 - v00) * (1 - sy) + (v11 - v01) * sy);
  s.dy = dsy * ((v01 - v00) * (1 - sx) + (v11 - v10) * sx);
  return s;
}

void validate(const SceneSpec& spec) {
  if (spec.resolution < 16)
    throw std::invalid_argument("scene: resolution must be at least 16");
  if (!unit_range(spec.albedo.a) || !unit_range(spec.albedo.b))
    throw std::invalid_argument("scene: albedo outside [0,1]");
  for (double r : {spec.roughness.a, spec.roughness.b})
    if (!(r > 0) || r > 1)
      throw std::invalid_argument("scene: roughness outside (0,1]");
  if (!unit_range(spec.f0.a) || !unit_range(spec.f0.b))
    throw std::invalid_argument("scene: f0 outside [0,1]");
  for (int cells : {spec.albedo.cells, spec.roughness.cells, spec.f0.cells, spec.height_cells})
    if (cells <= 0) throw std::invalid_argument("scene: cell counts must be positive");
  if (!std::isfinite(spec.height_amplitude) || spec.height_amplitude < 0)
    throw std::invalid_argument("scene: height amplitude must be finite and non-negative");
}

IntrinsicBundle generate(const SceneSpec& spec) {
  validate(spec);
  const int n = spec.resolution;
  IntrinsicBundle b;
  b.normal = NormalImage(n, n);
  b.albedo = RgbImage(n, n);
  b.roughness = ScalarImage(n, n);
  b.f0 = ScalarImage(n, n);
  b.mask = MaskImage(n, n);

  const uint64_t albedo_seed = mix64(spec.seed ^ 0xa1bed0ull);
  const uint64_t rough_seed = mix64(spec.seed ^ 0x2009ull);
  const uint64_t f0_seed = mix64(spec.seed ^ 0xf0f0ull);
  const uint64_t height_seed = mix64(spec.seed ^ 0x4e16e7ull);

  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double u = (x + 0.5) / n;
      const double v = (y + 0.5) / n;
      vec3 normal;
      bool fg = false;
      if (spec.kind == SceneKind::sphere) {
        const double px = 2 * u - 1;
        const double py = 1 - 2 * v;
        const double r2 = px * px + py * py;
        if (r2 < 1) {
          fg = true;
          normal = {px, py, std::sqrt(1 - r2)};
        }
      } else {
        const double scale = spec.height_amplitude * spec.height_cells;
        const NoiseSample s =
            value_noise(u * spec.height_cells, v * spec.height_cells, height_seed);
        // v grows downward while world y grows upward.
        normal = {-scale * s.dx, scale * s.dy, 1};
        fg = true;
      }
      if (!fg) continue;
      b.mask(x, y) = 1;
      b.normal(x, y) = Direction(normal);
      b.albedo(x, y) = eval_field(spec.albedo, u, v, albedo_seed);
      b.roughness(x, y) = eval_field(spec.roughness, u, v, rough_seed);
      b.f0(x, y) = eval_field(spec.f0, u, v, f0_seed);
    }
  return b;
}

const char* to_string(SceneKind kind) {
  return kind == SceneKind::sphere ? "sphere" : "heightfield";
}

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::constant: return "constant";
    case FieldKind::checker: return "checker";
    case FieldKind::gradient: return "gradient";
    case FieldKind::noise: return "noise";
  }
  return "constant";
}

SceneKind parse_scene_kind(const std::string& s) {
  if (s == "sphere") return SceneKind::sphere;
  if (s == "heightfield") return SceneKind::heightfield;
  throw std::invalid_argument("unknown scene kind '" + s + "'");
}

FieldKind parse_field_kind(const std::string& s) {
  if (s == "constant") return FieldKind::constant;
  if (s == "checker") return FieldKind::checker;
  if (s == "gradient") return FieldKind::gradient;
  if (s == "noise") return FieldKind::noise;
  throw std::invalid_argument("unknown field kind '" + s + "'");
}

}  // namespace relight

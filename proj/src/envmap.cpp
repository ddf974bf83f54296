#include "relight/envmap.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "relight/parallel.h"

namespace relight {

namespace {

void check_grid(int height, int width) {
  if (height <= 0 || width != 2 * height)
    throw std::invalid_argument("env map must be 2:1 with positive size, got " +
                                std::to_string(height) + "x" +
                                std::to_string(width));
}

double ipow(double x, int p) {
  double result = 1;
  double base = x;
  while (p > 0) {
    if (p & 1) result *= base;
    base *= base;
    p >>= 1;
  }
  return result;
}

int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

}  // namespace

EnvMap::EnvMap(int height, int width, const Rgb& fill) {
  check_grid(height, width);
  texels_ = RgbImage(width, height, fill);
}

EnvMap::EnvMap(RgbImage texels) : texels_(std::move(texels)) {
  check_grid(texels_.height(), texels_.width());
  for (const auto& t : texels_.pixels())
    if (!is_finite(t) || t.r < 0 || t.g < 0 || t.b < 0)
      throw std::invalid_argument("env map: negative or non-finite texel");
}

EnvMap operator+(const EnvMap& a, const EnvMap& b) {
  require_same_shape(a.image(), b.image(), "env sum");
  EnvMap out = a;
  for (size_t i = 0; i < out.image().size(); ++i)
    out.image()[i] = a.image()[i] + b.image()[i];
  return out;
}

EnvMap operator*(const EnvMap& a, double s) {
  EnvMap out = a;
  for (auto& t : out.image().pixels()) t = t * s;
  return out;
}

const EnvMap& ConvolvedEnvMap::map_for(int exponent) const {
  for (size_t i = 0; i < exponents.size(); ++i)
    if (exponents[i] == exponent) return maps.at(i);
  throw std::invalid_argument("convolved env has no map for exponent " +
                              std::to_string(exponent));
}

double SolidAngleTable::total() const {
  double sum = 0;
  for (double w : row_weights) sum += w * width;
  return sum;
}

Direction texel_to_dir(int row, int col, int height, int width) {
  if (row < 0 || row >= height || col < 0 || col >= width)
    throw std::out_of_range("texel (" + std::to_string(row) + "," +
                            std::to_string(col) + ") outside " +
                            std::to_string(height) + "x" +
                            std::to_string(width));
  const double theta = (row + 0.5) * pi / height;
  const double phi = (col + 0.5) * 2 * pi / width;
  const double st = std::sin(theta);
  return Direction::from_unit(
      {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)});
}

std::pair<int, int> dir_to_texel(const vec3& d, int height, int width) {
  const double y = std::clamp(d.y, -1.0, 1.0);
  const double theta = std::acos(y);
  double phi = std::atan2(d.x, -d.z);
  if (phi < 0) phi += 2 * pi;
  const int row = std::clamp(static_cast<int>(theta / pi * height), 0, height - 1);
  const int col = wrap(static_cast<int>(phi / (2 * pi) * width), width);
  return {row, col};
}

SolidAngleTable solid_angles(int height, int width) {
  check_grid(height, width);
  SolidAngleTable table;
  table.width = width;
  table.row_weights.resize(height);
  const double dphi = 2 * pi / width;
  for (int r = 0; r < height; ++r) {
    const double t0 = r * pi / height;
    const double t1 = (r + 1) * pi / height;
    table.row_weights[r] = dphi * (std::cos(t0) - std::cos(t1));
  }
  return table;
}

ConvolvedEnvMap convolve_phong(const EnvMap& env,
                               const std::vector<int>& exponents,
                               int out_height, int out_width,
                               const ConvolveOptions& opts) {
  check_grid(env.height(), env.width());
  check_grid(out_height, out_width);
  if (exponents.empty())
    throw std::invalid_argument("convolve_phong: empty exponent list");
  std::set<int> seen;
  for (int p : exponents) {
    if (p <= 0)
      throw std::invalid_argument("convolve_phong: exponent must be positive");
    if (!seen.insert(p).second)
      throw std::invalid_argument("convolve_phong: duplicate exponent");
  }
  const int k = opts.footprint_samples;
  if (k <= 0)
    throw std::invalid_argument("convolve_phong: footprint_samples must be positive");

  const int h = env.height();
  const int w = env.width();
  const int np = static_cast<int>(exponents.size());

  // Sub-sample rows: colatitude and exact band weight per sub-texel.
  const int sub_rows = h * k;
  std::vector<double> sub_cos(sub_rows), sub_sin(sub_rows), sub_weight(sub_rows);
  for (int s = 0; s < sub_rows; ++s) {
    const double t0 = s * pi / sub_rows;
    const double t1 = (s + 1) * pi / sub_rows;
    const double tc = (s + 0.5) * pi / sub_rows;
    sub_cos[s] = std::cos(tc);
    sub_sin[s] = std::sin(tc);
    sub_weight[s] = (2 * pi / (w * k)) * (std::cos(t0) - std::cos(t1));
  }

  // The longitude difference between output column j and the sub-column
  // (c_base(j) + c') * k + b only depends on j modulo `phases`, with
  // c_base(j) = floor(j * w / out_width). Working in integer units of
  // 2 pi / denom keeps the kernel bitwise shift-invariant.
  const int g = std::gcd(w, out_width);
  const int phases = out_width / g;
  const int64_t denom = int64_t{2} * out_width * w * k;
  std::vector<double> cos_dphi(static_cast<size_t>(phases) * w * k);
  for (int q = 0; q < phases; ++q) {
    const int64_t cbase = int64_t{q} * w / out_width;
    for (int cp = 0; cp < w; ++cp)
      for (int b = 0; b < k; ++b) {
        const int64_t s = (cbase + cp) * k + b;
        int64_t n = (2 * int64_t{q} + 1) * w * k - (2 * s + 1) * out_width;
        n %= denom;
        if (n < 0) n += denom;
        cos_dphi[(static_cast<size_t>(q) * w + cp) * k + b] =
            std::cos(2 * pi * static_cast<double>(n) / static_cast<double>(denom));
      }
  }

  ConvolvedEnvMap result;
  result.exponents = exponents;
  result.maps.assign(np, EnvMap(out_height, out_width));

  parallel_for(out_height, opts.workers, [&](int i) {
    const double to = (i + 0.5) * pi / out_height;
    const double co = std::cos(to);
    const double so = std::sin(to);
    // kernel[((q * h + r) * w + cp) * np + e]
    std::vector<double> kernel(static_cast<size_t>(phases) * h * w * np, 0.0);
    for (int q = 0; q < phases; ++q)
      for (int r = 0; r < h; ++r)
        for (int a = 0; a < k; ++a) {
          const int s = r * k + a;
          const double ca = co * sub_cos[s];
          const double cb = so * sub_sin[s];
          if (ca + std::fabs(cb) <= 0) continue;
          const double ws = sub_weight[s];
          for (int cp = 0; cp < w; ++cp) {
            double* kout = &kernel[((static_cast<size_t>(q) * h + r) * w + cp) * np];
            const double* cd = &cos_dphi[(static_cast<size_t>(q) * w + cp) * k];
            for (int b = 0; b < k; ++b) {
              const double d = ca + cb * cd[b];
              if (d <= 0) continue;
              const double dc = d > 1 ? 1 : d;
              for (int e = 0; e < np; ++e) kout[e] += ipow(dc, exponents[e]) * ws;
            }
          }
        }

    std::vector<Rgb> acc(np);
    for (int j = 0; j < out_width; ++j) {
      const int q = j % phases;
      const int cbase = static_cast<int>(int64_t{j} * w / out_width);
      std::fill(acc.begin(), acc.end(), Rgb{});
      for (int r = 0; r < h; ++r)
        for (int cp = 0; cp < w; ++cp) {
          const Rgb& e = env.at(r, (cbase + cp) % w);
          const double* kin = &kernel[((static_cast<size_t>(q) * h + r) * w + cp) * np];
          for (int x = 0; x < np; ++x) {
            acc[x].r += e.r * kin[x];
            acc[x].g += e.g * kin[x];
            acc[x].b += e.b * kin[x];
          }
        }
      for (int x = 0; x < np; ++x) result.maps[x].at(i, j) = acc[x];
    }
  });
  return result;
}

Rgb sample_env(const EnvMap& env, const vec3& d) {
  const int h = env.height();
  const int w = env.width();
  const double theta = std::acos(std::clamp(d.y, -1.0, 1.0));
  double phi = std::atan2(d.x, -d.z);
  if (phi < 0) phi += 2 * pi;
  const double y = theta / pi * h - 0.5;
  const double x = phi / (2 * pi) * w - 0.5;
  const double y0f = std::floor(y);
  const double x0f = std::floor(x);
  const double fy = y - y0f;
  const double fx = x - x0f;
  const int y0 = static_cast<int>(y0f);
  const int x0 = static_cast<int>(x0f);
  const int r0 = std::clamp(y0, 0, h - 1);
  const int r1 = std::clamp(y0 + 1, 0, h - 1);
  const int c0 = wrap(x0, w);
  const int c1 = wrap(x0 + 1, w);
  return env.at(r0, c0) * ((1 - fx) * (1 - fy)) + env.at(r0, c1) * (fx * (1 - fy)) +
         env.at(r1, c0) * ((1 - fx) * fy) + env.at(r1, c1) * (fx * fy);
}

EnvMap rotate_env(const EnvMap& env, double yaw) {
  const int h = env.height();
  const int w = env.width();
  const double shift = yaw * w / (2 * pi);
  const double rounded = std::round(shift);
  EnvMap out(h, w);
  if (std::fabs(shift - rounded) < 1e-9) {
    const int s = wrap(static_cast<int>(std::fmod(rounded, static_cast<double>(w))), w);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) out.at(r, c) = env.at(r, wrap(c - s, w));
    return out;
  }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double x = c - shift;
      const double x0f = std::floor(x);
      const double f = x - x0f;
      const int x0 = wrap(static_cast<int>(std::fmod(x0f, static_cast<double>(w))), w);
      out.at(r, c) = env.at(r, x0) * (1 - f) + env.at(r, wrap(x0 + 1, w)) * f;
    }
  return out;
}

EnvMap mirror_env(const EnvMap& env) {
  EnvMap out(env.height(), env.width());
  for (int r = 0; r < env.height(); ++r)
    for (int c = 0; c < env.width(); ++c)
      out.at(r, c) = env.at(r, env.width() - 1 - c);
  return out;
}

EnvMap downsample_env(const EnvMap& env, int factor) {
  if (factor <= 0 || env.height() % factor != 0)
    throw std::invalid_argument("downsample_env: factor must divide the height");
  if (factor == 1) return env;
  const int h = env.height() / factor;
  const int w = env.width() / factor;
  const auto fine = solid_angles(env.height(), env.width());
  const auto coarse = solid_angles(h, w);
  EnvMap out(h, w);
  // Solid-angle weighted average keeps total energy.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      Rgb sum;
      for (int dr = 0; dr < factor; ++dr)
        for (int dc = 0; dc < factor; ++dc)
          sum += env.at(r * factor + dr, c * factor + dc) *
                 fine.row_weights[r * factor + dr];
      out.at(r, c) = sum / coarse.row_weights[r];
    }
  return out;
}

RgbImage diffuse_shading(const ConvolvedEnvMap& conv, const NormalImage& normals) {
  const EnvMap& irradiance = conv.map_for(1);
  RgbImage out(normals.width(), normals.height());
  for (size_t i = 0; i < normals.size(); ++i) {
    const vec3& n = normals[i];
    const double len = length(n);
    if (!(len > 0)) continue;
    out[i] = sample_env(irradiance, n / len);
  }
  return out;
}

}  // namespace relight

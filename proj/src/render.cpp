#include "relight/render.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "relight/parallel.h"

namespace relight {

namespace {

// Sub-samples per texel side for texels cut by a pixel's horizon.
constexpr int straddle_samples = 8;

// Texel-level quadrature data for one environment map.
struct EnvQuadrature {
  int count = 0;
  std::vector<vec3> center;
  std::vector<Rgb> radiance;   // E_t
  std::vector<Rgb> energy;     // E_t * omega_t
  std::vector<vec3> cosine;    // integral over the texel of l dl
  std::vector<double> margin;  // sin of the texel's angular radius
  // straddle_samples^2 sub-directions and weights per texel
  std::vector<vec3> sub_dir;
  std::vector<double> sub_weight;
};

vec3 spherical(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)};
}

EnvQuadrature build_quadrature(const EnvMap& env) {
  const int h = env.height();
  const int w = env.width();
  const auto omega = solid_angles(h, w);
  constexpr int k = straddle_samples;
  EnvQuadrature q;
  q.count = h * w;
  q.center.reserve(q.count);
  q.radiance.reserve(q.count);
  q.energy.reserve(q.count);
  q.cosine.reserve(q.count);
  q.margin.reserve(q.count);
  q.sub_dir.reserve(static_cast<size_t>(q.count) * k * k);
  q.sub_weight.reserve(static_cast<size_t>(q.count) * k * k);
  const double dtheta = pi / h;
  const double dphi = 2 * pi / w;
  for (int r = 0; r < h; ++r) {
    const double t0 = r * dtheta;
    const double t1 = t0 + dtheta;
    const double a = (t1 - t0) / 2 - (std::sin(2 * t1) - std::sin(2 * t0)) / 4;
    const double b = (std::sin(t1) * std::sin(t1) - std::sin(t0) * std::sin(t0)) / 2;
    for (int c = 0; c < w; ++c) {
      const double p0 = c * dphi;
      const double p1 = p0 + dphi;
      const vec3 center = texel_to_dir(r, c, h, w);
      q.center.push_back(center);
      q.radiance.push_back(env.at(r, c));
      q.energy.push_back(env.at(r, c) * omega.row_weights[r]);
      q.cosine.push_back({a * (std::cos(p0) - std::cos(p1)), b * (p1 - p0),
                          -a * (std::sin(p1) - std::sin(p0))});
      double max_angle = 0;
      for (double t : {t0, t1})
        for (double p : {p0, p1})
          max_angle = std::max(
              max_angle, std::acos(std::clamp(dot(center, spherical(t, p)), -1.0, 1.0)));
      q.margin.push_back(std::sin(std::min(max_angle + 1e-6, pi / 2)));
      for (int sa = 0; sa < k; ++sa) {
        const double s0 = t0 + sa * dtheta / k;
        const double s1 = s0 + dtheta / k;
        const double weight = (dphi / k) * (std::cos(s0) - std::cos(s1));
        for (int sb = 0; sb < k; ++sb) {
          q.sub_dir.push_back(spherical((s0 + s1) / 2, p0 + (sb + 0.5) * dphi / k));
          q.sub_weight.push_back(weight);
        }
      }
    }
  }
  return q;
}

// sum_t E_t * integral over texel t of <n.l> dl.
Rgb irradiance(const EnvQuadrature& q, const vec3& n) {
  constexpr int kk = straddle_samples * straddle_samples;
  Rgb sum;
  for (int t = 0; t < q.count; ++t) {
    const double d = dot(n, q.center[t]);
    const double m = q.margin[t];
    if (d <= -m) continue;
    double c;
    if (d >= m) {
      c = dot(n, q.cosine[t]);
    } else {
      c = 0;
      const vec3* dirs = &q.sub_dir[static_cast<size_t>(t) * kk];
      const double* ws = &q.sub_weight[static_cast<size_t>(t) * kk];
      for (int s = 0; s < kk; ++s) {
        const double ds = dot(n, dirs[s]);
        if (ds > 0) c += ds * ws[s];
      }
    }
    sum += q.radiance[t] * c;
  }
  return sum;
}

Rgb specular_radiance(const EnvQuadrature& q, const vec3& n, const vec3& v,
                      const Material& m) {
  Rgb sum;
  for (int t = 0; t < q.count; ++t) {
    const double nl = cdot(n, q.center[t]);
    if (nl <= 0) continue;
    const double s = eval_specular(n, v, q.center[t], m) * nl;
    sum += q.energy[t] * s;
  }
  return sum;
}

vec3 unit_or_zero(const vec3& n) {
  const double len = length(n);
  return len > 0 ? n / len : vec3{};
}

template <typename PixelFn>
RgbImage shade_image(const IntrinsicBundle& bundle, int workers, PixelFn&& fn) {
  bundle.check_shape();
  const int w = bundle.width();
  RgbImage out(w, bundle.height());
  parallel_for(bundle.height(), workers, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      if (!bundle.foreground(i)) continue;
      out[i] = fn(i);
    }
  });
  return out;
}

EnvMap prepared_env(const EnvMap& env, const RenderOptions& opts) {
  return opts.env_downsample > 1 ? downsample_env(env, opts.env_downsample) : env;
}

}  // namespace

void IntrinsicBundle::check_shape() const {
  require_same_shape(normal, albedo, "bundle albedo");
  require_same_shape(normal, roughness, "bundle roughness");
  require_same_shape(normal, f0, "bundle f0");
  require_same_shape(normal, mask, "bundle mask");
}

Material IntrinsicBundle::material_at(size_t i) const {
  return {albedo[i], std::max(roughness[i], min_roughness), f0[i]};
}

Rgb shade_directional(const vec3& n, const vec3& v, const vec3& l,
                      const Material& material, ShadingTerms terms) {
  const double nl = cdot(n, l);
  if (nl <= 0) return {};
  Rgb f;
  if (terms.diffuse) f = eval_diffuse(material);
  if (terms.specular) {
    const double s = eval_specular(n, v, l, material);
    f = f + gray(s);
  }
  return f * nl;
}

RgbImage render_diffuse(const IntrinsicBundle& bundle, const EnvMap& env,
                        const RenderOptions& opts) {
  const EnvQuadrature q = build_quadrature(prepared_env(env, opts));
  return shade_image(bundle, opts.workers, [&](size_t i) {
    return eval_diffuse(bundle.material_at(i)) *
           irradiance(q, unit_or_zero(bundle.normal[i]));
  });
}

RgbImage render_specular(const IntrinsicBundle& bundle, const EnvMap& env,
                         const Direction& view, const RenderOptions& opts) {
  const EnvQuadrature q = build_quadrature(prepared_env(env, opts));
  return shade_image(bundle, opts.workers, [&](size_t i) {
    return specular_radiance(q, unit_or_zero(bundle.normal[i]), view,
                             bundle.material_at(i));
  });
}

RenderOutput render_pbr(const IntrinsicBundle& bundle, const EnvMap& env,
                        const Direction& view, const RenderOptions& opts) {
  RenderOutput out;
  out.diffuse = render_diffuse(bundle, env, opts);
  out.specular = render_specular(bundle, env, view, opts);
  out.pbr = RgbImage(bundle.width(), bundle.height());
  for (size_t i = 0; i < out.pbr.size(); ++i)
    out.pbr[i] = out.diffuse[i] + out.specular[i];
  return out;
}

RgbImage relight(const IntrinsicBundle& bundle, const EnvMap& env_target,
                 const Direction& view, const RenderOptions& opts) {
  return render_pbr(bundle, env_target, view, opts).pbr;
}

}  // namespace relight

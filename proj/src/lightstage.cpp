#include "relight/lightstage.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relight/parallel.h"
#include "relight/rng.h"

namespace relight {

void OlatStack::check() const {
  if (images.size() != rig.directions.size())
    throw std::invalid_argument("olat stack: " + std::to_string(images.size()) +
                                " images for " + std::to_string(rig.count()) +
                                " lights");
  for (const auto& img : images)
    require_same_shape(images.front(), img, "olat stack");
  if (!(light_energy > 0))
    throw std::invalid_argument("olat stack: light energy must be positive");
}

LightRig make_rig(int count, uint64_t seed) {
  if (count < 3)
    throw std::invalid_argument("light rig needs at least 3 lights, got " +
                                std::to_string(count));
  const double golden_angle = pi * (3 - std::sqrt(5.0));
  double offset = 0;
  if (seed != 0) {
    CounterRng rng(seed, 0x716);
    offset = rng.uniform(0, 2 * pi);
  }
  LightRig rig;
  rig.directions.reserve(count);
  for (int i = 0; i < count; ++i) {
    // Quarter-step latitude shift: the symmetric lattice puts three lights
    // on a great circle, which leaves photometric stereo rank deficient.
    const double y = 1 - (2.0 * i + 1.25) / count;
    const double r = std::sqrt(std::max(0.0, 1 - y * y));
    const double phi = i * golden_angle + offset;
    rig.directions.emplace_back(r * std::sin(phi), y, -r * std::cos(phi));
  }
  return rig;
}

OlatStack render_olat(const IntrinsicBundle& bundle, const LightRig& rig,
                      const Direction& view, ShadingTerms terms,
                      double light_energy, const RenderOptions& opts) {
  bundle.check_shape();
  if (!(light_energy > 0))
    throw std::invalid_argument("render_olat: light energy must be positive");
  OlatStack stack;
  stack.rig = rig;
  stack.light_energy = light_energy;
  stack.images.assign(rig.count(), RgbImage(bundle.width(), bundle.height()));
  const int w = bundle.width();
  parallel_for(bundle.height(), opts.workers, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      if (!bundle.foreground(i)) continue;
      const vec3 n = Direction(bundle.normal[i]);
      const Material m = bundle.material_at(i);
      for (int k = 0; k < rig.count(); ++k)
        stack.images[k][i] =
            shade_directional(n, view, rig.directions[k], m, terms) * light_energy;
    }
  });
  return stack;
}

RigWeights project_env_to_rig(const EnvMap& env, const LightRig& rig) {
  if (rig.count() == 0) throw std::invalid_argument("project_env_to_rig: empty rig");
  const auto omega = solid_angles(env.height(), env.width());
  RigWeights out;
  out.weights.assign(rig.count(), Rgb{});
  for (int r = 0; r < env.height(); ++r)
    for (int c = 0; c < env.width(); ++c) {
      const vec3 l = texel_to_dir(r, c, env.height(), env.width());
      int best = 0;
      double best_dot = dot(l, rig.directions[0]);
      for (int k = 1; k < rig.count(); ++k) {
        const double d = dot(l, rig.directions[k]);
        if (d > best_dot) {
          best_dot = d;
          best = k;
        }
      }
      out.weights[best] += env.at(r, c) * omega.row_weights[r];
    }
  return out;
}

RgbImage composite(const OlatStack& stack, const RigWeights& weights) {
  stack.check();
  if (weights.weights.size() != stack.images.size())
    throw std::invalid_argument("composite: " + std::to_string(weights.weights.size()) +
                                " weights for " + std::to_string(stack.images.size()) +
                                " lights");
  RgbImage out(stack.width(), stack.height());
  for (size_t k = 0; k < stack.images.size(); ++k) {
    const Rgb w = weights.weights[k] / stack.light_energy;
    const RgbImage& img = stack.images[k];
    for (size_t i = 0; i < out.size(); ++i) out[i] += w * img[i];
  }
  return out;
}

PhotometricStereoResult photometric_stereo(const OlatStack& stack,
                                           double shadow_threshold, int workers) {
  stack.check();
  if (stack.rig.count() < 3)
    throw std::invalid_argument("photometric stereo needs at least 3 lights");
  const int w = stack.width();
  const int h = stack.height();
  const int nl = stack.rig.count();
  const double to_albedo = pi / stack.light_energy;

  PhotometricStereoResult res;
  res.normal = NormalImage(w, h);
  res.albedo = RgbImage(w, h);
  res.valid = MaskImage(w, h);
  res.residual = ScalarImage(w, h);

  parallel_for(h, workers, [&](int y) {
    Eigen::MatrixXd lights(nl, 3);
    Eigen::VectorXd m(nl);
    std::vector<int> used;
    used.reserve(nl);
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      used.clear();
      for (int k = 0; k < nl; ++k)
        if (luminance(stack.images[k][i]) > shadow_threshold) used.push_back(k);
      const int count = static_cast<int>(used.size());
      if (count < 3) continue;
      for (int row = 0; row < count; ++row) {
        const vec3& l = stack.rig.directions[used[row]];
        lights.row(row) << l.x, l.y, l.z;
        m(row) = luminance(stack.images[used[row]][i]);
      }
      const auto L = lights.topRows(count);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(L);
      qr.setThreshold(1e-10);
      if (qr.rank() < 3) continue;
      const Eigen::Vector3d g = qr.solve(m.head(count));
      const double rho = g.norm();
      if (!(rho > 0) || !std::isfinite(rho)) continue;
      const Eigen::Vector3d n = g / rho;

      Rgb num, den;
      double res2 = 0, sig2 = 0;
      for (int row = 0; row < count; ++row) {
        const double s = L.row(row).dot(n);
        const Rgb& meas = stack.images[used[row]][i];
        num += meas * s;
        den += gray(s * s);
        const double e = rho * s - m(row);
        res2 += e * e;
        sig2 += m(row) * m(row);
      }
      Rgb albedo = {num.r / den.r, num.g / den.g, num.b / den.b};
      albedo = albedo * to_albedo;
      albedo = {std::max(albedo.r, 0.0), std::max(albedo.g, 0.0), std::max(albedo.b, 0.0)};
      res.normal[i] = {n.x(), n.y(), n.z()};
      res.albedo[i] = albedo;
      res.valid[i] = 1;
      res.residual[i] = sig2 > 0 ? std::sqrt(res2 / sig2) : 0;
    }
  });
  for (auto v : res.valid.pixels())
    if (!v) ++res.invalid_count;
  return res;
}

}  // namespace relight

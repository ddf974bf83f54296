#include "relight/masks.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relight/rng.h"

namespace relight {

namespace {

constexpr uint64_t patch_stream = 0x9a7c;
constexpr uint64_t outpaint_stream = 0x0a7;
constexpr uint64_t freeform_stream = 0xf7ee;
constexpr uint64_t kind_stream = 0x1c1d;

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("mask dimensions must be positive");
}

void check_range(const Range& r, double lo, double hi, const char* what) {
  if (!(r.lo >= lo) || !(r.hi <= hi) || !(r.lo <= r.hi))
    throw std::invalid_argument(std::string(what) + ": range [" + std::to_string(r.lo) +
                                ", " + std::to_string(r.hi) + "] outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void check_strokes(const StrokeParams& p) {
  if (p.min_strokes < 0 || p.max_strokes < p.min_strokes)
    throw std::invalid_argument("strokes: bad stroke count range");
  if (p.min_vertices < 2 || p.max_vertices < p.min_vertices)
    throw std::invalid_argument("strokes: need at least 2 vertices per stroke");
  check_range(p.width, 0, 1, "stroke width");
  check_range(p.segment_length, 0, 2, "stroke segment length");
  if (!(p.max_turn >= 0)) throw std::invalid_argument("strokes: max_turn must be >= 0");
}

size_t count_masked(const MaskImage& bits) {
  return static_cast<size_t>(std::count_if(bits.pixels().begin(), bits.pixels().end(),
                                           [](uint8_t v) { return v != 0; }));
}

int side_pixels(double fraction, int min_dim, int limit) {
  return std::clamp(static_cast<int>(std::lround(fraction * min_dim)), 1, limit);
}

}  // namespace

const char* to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::patch: return "patch";
    case MaskKind::outpaint: return "outpaint";
    case MaskKind::freeform: return "freeform";
  }
  return "patch";
}

MaskKind parse_mask_kind(const std::string& s) {
  if (s == "patch") return MaskKind::patch;
  if (s == "outpaint") return MaskKind::outpaint;
  if (s == "freeform") return MaskKind::freeform;
  throw std::invalid_argument("unknown mask kind '" + s + "'");
}

Mask::Mask(MaskImage bits, MaskKind kind, uint64_t seed)
    : bits_(std::move(bits)), kind_(kind), seed_(seed) {
  ratio_ = bits_.empty() ? 0.0
                         : static_cast<double>(count_masked(bits_)) /
                               static_cast<double>(bits_.size());
}

void validate(const MaskPolicy& policy) {
  double total = 0;
  for (double w : policy.kind_weights) {
    if (!(w >= 0)) throw std::invalid_argument("mask policy: negative kind weight");
    total += w;
  }
  if (!(total > 0)) throw std::invalid_argument("mask policy: all kind weights are zero");
  check_range(policy.patch_size, 0, 1, "patch size");
  if (!(policy.patch_size.lo > 0)) throw std::invalid_argument("patch size must be positive");
  check_range(policy.patch_ratio, 0, 1, "patch ratio");
  check_range(policy.outpaint_margin, 0, 0.5, "outpaint margin");
  check_strokes(policy.strokes);
}

Mask gen_patch(int height, int width, Range size_range, Range ratio_range, uint64_t seed) {
  check_dims(height, width);
  check_range(ratio_range, 0, 1, "patch ratio");
  check_range(size_range, 0, 1, "patch size");
  if (!(size_range.lo > 0)) throw std::invalid_argument("patch size must be positive");

  const size_t total = static_cast<size_t>(height) * width;
  const auto lo_count = static_cast<size_t>(std::ceil(ratio_range.lo * total - 1e-9));
  const auto hi_count = static_cast<size_t>(std::floor(ratio_range.hi * total + 1e-9));
  if (lo_count > hi_count)
    throw std::invalid_argument("patch ratio range admits no pixel count at this size");

  MaskImage bits(width, height);
  CounterRng rng(seed, patch_stream);
  const int min_dim = std::min(height, width);
  Range size = size_range;
  size_t count = 0;
  int failures = 0;
  while (count < lo_count) {
    const int pw = side_pixels(rng.uniform(size.lo, size.hi), min_dim, width);
    const int ph = side_pixels(rng.uniform(size.lo, size.hi), min_dim, height);
    if (pw == 1 && ph == 1) {
      // Single pixels: paint the k-th visible pixel so progress is certain.
      size_t k = static_cast<size_t>(rng.uniform() * static_cast<double>(total - count));
      for (auto& v : bits.pixels())
        if (v == 0 && k-- == 0) {
          v = 1;
          break;
        }
      ++count;
      continue;
    }
    const int x0 = rng.uniform_int(0, width - pw);
    const int y0 = rng.uniform_int(0, height - ph);
    size_t fresh = 0;
    for (int y = y0; y < y0 + ph; ++y)
      for (int x = x0; x < x0 + pw; ++x) fresh += bits(x, y) == 0;
    if (count + fresh > hi_count) {
      // Overshoot: shrink the rectangles after repeated misses.
      if (++failures > 32) {
        size.hi *= 0.5;
        size.lo = std::min(size.lo, size.hi);
        failures = 0;
      }
      continue;
    }
    for (int y = y0; y < y0 + ph; ++y)
      for (int x = x0; x < x0 + pw; ++x) bits(x, y) = 1;
    count += fresh;
  }
  return Mask(std::move(bits), MaskKind::patch, seed);
}

Mask gen_outpaint(int height, int width, Range margin_range, uint64_t seed) {
  check_dims(height, width);
  check_range(margin_range, 0, 1, "outpaint margin");
  CounterRng rng(seed, outpaint_stream);
  const auto margin = [&](int dim) {
    return static_cast<int>(std::lround(rng.uniform(margin_range.lo, margin_range.hi) * dim));
  };
  const int top = margin(height);
  const int bottom = margin(height);
  const int left = margin(width);
  const int right = margin(width);
  if (top + bottom >= height || left + right >= width)
    throw std::invalid_argument("outpaint margins leave no visible window");
  MaskImage bits(width, height, 1);
  for (int y = top; y < height - bottom; ++y)
    for (int x = left; x < width - right; ++x) bits(x, y) = 0;
  return Mask(std::move(bits), MaskKind::outpaint, seed);
}

void rasterize_polyline(MaskImage& bits, const std::vector<Point2>& points, double radius) {
  if (points.empty() || !(radius >= 0)) return;
  const double r2 = radius * radius;
  const auto stamp_segment = [&](const Point2& a, const Point2& b) {
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius)));
    const int x1 = std::min(bits.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius)));
    const int y1 = std::min(bits.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius)));
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5 - a.x;
        const double py = y + 0.5 - a.y;
        double t = len2 > 0 ? (px * dx + py * dy) / len2 : 0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = px - t * dx;
        const double ey = py - t * dy;
        if (ex * ex + ey * ey <= r2) bits(x, y) = 1;
      }
  };
  if (points.size() == 1) stamp_segment(points[0], points[0]);
  for (size_t i = 1; i < points.size(); ++i) stamp_segment(points[i - 1], points[i]);
}

Mask gen_freeform(int height, int width, const StrokeParams& params, uint64_t seed) {
  check_dims(height, width);
  check_strokes(params);
  CounterRng rng(seed, freeform_stream);
  const double min_dim = std::min(height, width);
  MaskImage bits(width, height);
  const int strokes = rng.uniform_int(params.min_strokes, params.max_strokes);
  for (int s = 0; s < strokes; ++s) {
    const double radius = rng.uniform(params.width.lo, params.width.hi) * min_dim / 2;
    const int vertices = rng.uniform_int(params.min_vertices, params.max_vertices);
    std::vector<Point2> pts;
    pts.push_back({rng.uniform(0, width), rng.uniform(0, height)});
    double angle = rng.uniform(0, 2 * pi);
    for (int v = 1; v < vertices; ++v) {
      const double len = rng.uniform(params.segment_length.lo, params.segment_length.hi) * min_dim;
      const Point2& p = pts.back();
      pts.push_back({std::clamp(p.x + len * std::cos(angle), 0.0, static_cast<double>(width)),
                     std::clamp(p.y + len * std::sin(angle), 0.0, static_cast<double>(height))});
      angle += rng.uniform(-params.max_turn, params.max_turn);
    }
    rasterize_polyline(bits, pts, radius);
  }
  return Mask(std::move(bits), MaskKind::freeform, seed);
}

Mask sample_mask(const MaskPolicy& policy, int height, int width, uint64_t seed) {
  validate(policy);
  const auto& w = policy.kind_weights;
  CounterRng rng(seed, kind_stream);
  const double u = rng.uniform() * (w[0] + w[1] + w[2]);
  MaskKind kind = MaskKind::freeform;
  if (u < w[0])
    kind = MaskKind::patch;
  else if (u < w[0] + w[1])
    kind = MaskKind::outpaint;
  if (kind == MaskKind::freeform && w[2] == 0) kind = w[1] > 0 ? MaskKind::outpaint : MaskKind::patch;
  switch (kind) {
    case MaskKind::patch:
      return gen_patch(height, width, policy.patch_size, policy.patch_ratio, seed);
    case MaskKind::outpaint:
      return gen_outpaint(height, width, policy.outpaint_margin, seed);
    case MaskKind::freeform:
      break;
  }
  return gen_freeform(height, width, policy.strokes, seed);
}

RgbImage apply_mask(const RgbImage& image, const Mask& mask, const Rgb& fill) {
  require_same_shape(image, mask.bits(), "apply_mask");
  RgbImage out = image;
  for (size_t i = 0; i < out.size(); ++i)
    if (mask.bits()[i]) out[i] = fill;
  return out;
}

}  // namespace relight

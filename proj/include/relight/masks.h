// Corruption masks for masked-image pre-training: overlapping patches of
// varying size, outpainting borders and free-form brush strokes.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relight/image.h"

namespace relight {

enum class MaskKind { patch, outpaint, freeform };

const char* to_string(MaskKind kind);
MaskKind parse_mask_kind(const std::string& s);

struct Range {
  double lo = 0;
  double hi = 0;
  friend bool operator==(const Range&, const Range&) = default;
};

// 1 = masked, 0 = visible.
class Mask {
 public:
  Mask() = default;
  Mask(MaskImage bits, MaskKind kind, uint64_t seed);

  const MaskImage& bits() const { return bits_; }
  int width() const { return bits_.width(); }
  int height() const { return bits_.height(); }
  bool masked(int x, int y) const { return bits_(x, y) != 0; }
  MaskKind kind() const { return kind_; }
  uint64_t seed() const { return seed_; }
  double measured_ratio() const { return ratio_; }

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.bits_ == b.bits_ && a.kind_ == b.kind_ && a.seed_ == b.seed_;
  }

 private:
  MaskImage bits_;
  MaskKind kind_ = MaskKind::patch;
  uint64_t seed_ = 0;
  double ratio_ = 0;
};

struct StrokeParams {
  int min_strokes = 1;
  int max_strokes = 8;
  Range width = {0.02, 0.08};  // brush diameter, fraction of min dimension
  int min_vertices = 3;
  int max_vertices = 8;
  Range segment_length = {0.05, 0.25};  // fraction of min dimension
  double max_turn = 1.0;                // radians of jitter per vertex
  friend bool operator==(const StrokeParams&, const StrokeParams&) = default;
};

struct MaskPolicy {
  // patch, outpaint, freeform
  std::array<double, 3> kind_weights = {1, 1, 1};
  Range patch_size = {0.04, 0.25};  // rectangle side, fraction of min dimension
  Range patch_ratio = {0.4, 0.8};
  Range outpaint_margin = {0.1, 0.4};  // per side, fraction of that dimension
  StrokeParams strokes;
  friend bool operator==(const MaskPolicy&, const MaskPolicy&) = default;
};

// Throws std::invalid_argument for degenerate or out-of-domain ranges.
void validate(const MaskPolicy& policy);

// Places random axis-aligned rectangles (overlap allowed) until the masked
// fraction lies in ratio_range. Throws if no pixel count fits the range.
Mask gen_patch(int height, int width, Range size_range, Range ratio_range,
               uint64_t seed);

// Masks everything outside a visible window whose four margins are drawn
// from margin_range. Throws if the window would be empty.
Mask gen_outpaint(int height, int width, Range margin_range, uint64_t seed);

Mask gen_freeform(int height, int width, const StrokeParams& params,
                  uint64_t seed);

// Picks a kind by the policy weights, then calls that generator with the
// same seed.
Mask sample_mask(const MaskPolicy& policy, int height, int width,
                 uint64_t seed);

// Marks every pixel whose center lies within `radius` of the polyline.
struct Point2 {
  double x = 0, y = 0;
};
void rasterize_polyline(MaskImage& bits, const std::vector<Point2>& points,
                        double radius);

// Masked pixels become `fill`; visible pixels are copied.
RgbImage apply_mask(const RgbImage& image, const Mask& mask, const Rgb& fill);

}  // namespace relight

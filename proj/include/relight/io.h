// Image codecs: PFM (lossless float32), Radiance RGBE (.hdr) and 16-bit
// PNG. Every decoder reports malformed input as io_error and never reads
// past the buffer it is given.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relight/envmap.h"
#include "relight/image.h"

namespace relight {

enum class io_errc {
  open_failed,
  write_failed,
  bad_magic,
  bad_header,
  truncated,
  unsupported,
  out_of_range,
  corrupt,
};

const char* to_string(io_errc code);

class io_error : public std::runtime_error {
 public:
  io_error(io_errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  io_errc code() const { return code_; }

 private:
  io_errc code_;
};

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const uint8_t> bytes);

// Largest accepted width * height for any decoder.
inline constexpr int64_t max_decoded_pixels = int64_t{1} << 26;

// A decoded image with 1 or 3 channels, channel-interleaved, row 0 at top.
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> samples;
};

// PFM: "PF" (RGB) or "Pf" (gray), bottom-to-top rows, little-endian when
// the scale is negative.
std::vector<uint8_t> encode_pfm(const FloatImage& img);
FloatImage decode_pfm(std::span<const uint8_t> bytes);

// Radiance RGBE with the "-Y h +X w" orientation. Encoding rounds the shared
// mantissa; decoding accepts flat and run-length encoded scanlines.
std::vector<uint8_t> encode_rgbe(const RgbImage& img);
RgbImage decode_rgbe(std::span<const uint8_t> bytes);

// 16-bit PNG, gray or RGB. Samples are in [0, 65535]. Lower bit depths,
// palettes and alpha are expanded or stripped on decode.
struct Png16 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint16_t> samples;
};
std::vector<uint8_t> encode_png16(const Png16& img);
Png16 decode_png(std::span<const uint8_t> bytes);
// 1-bit grayscale PNG from 0/1 values.
std::vector<uint8_t> encode_png1(const MaskImage& mask);

// Conversions between pixel grids and codec images.
FloatImage to_float_image(const RgbImage& img);
FloatImage to_float_image(const ScalarImage& img);
RgbImage to_rgb_image(const FloatImage& img);
ScalarImage to_scalar_image(const FloatImage& img);

// [0,1] values to 16-bit; throws io_error(out_of_range) otherwise.
Png16 quantize_png16(const RgbImage& img);
Png16 quantize_png16(const ScalarImage& img);
RgbImage dequantize_rgb(const Png16& img);
ScalarImage dequantize_scalar(const Png16& img);

// Normals stored as (n + 1) / 2; decoding renormalizes non-zero vectors.
RgbImage encode_normals(const NormalImage& normals);
NormalImage decode_normals(const RgbImage& encoded);

// File-level helpers. Formats are chosen by extension (.pfm, .hdr, .png).
RgbImage read_rgb(const std::filesystem::path& path);
void write_rgb(const std::filesystem::path& path, const RgbImage& img);
ScalarImage read_scalar(const std::filesystem::path& path);
void write_scalar(const std::filesystem::path& path, const ScalarImage& img);
MaskImage read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const MaskImage& mask);
EnvMap read_env(const std::filesystem::path& path);
void write_env(const std::filesystem::path& path, const EnvMap& env);

// log(1+x), clamped to [0,1], for display PNGs.
RgbImage tonemap_log(const RgbImage& img);

}  // namespace relight

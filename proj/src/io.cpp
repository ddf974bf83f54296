#include "relight/io.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string_view>

namespace relight {

namespace fs = std::filesystem;

const char* to_string(io_errc code) {
  switch (code) {
    case io_errc::open_failed: return "open failed";
    case io_errc::write_failed: return "write failed";
    case io_errc::bad_magic: return "bad magic";
    case io_errc::bad_header: return "bad header";
    case io_errc::truncated: return "truncated";
    case io_errc::unsupported: return "unsupported";
    case io_errc::out_of_range: return "out of range";
    case io_errc::corrupt: return "corrupt";
  }
  return "io error";
}

std::vector<uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(io_errc::open_failed, path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const fs::path& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(io_errc::write_failed, path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error(io_errc::write_failed, path.string());
}

namespace {

void check_dimensions(int64_t w, int64_t h) {
  if (w <= 0 || h <= 0) throw io_error(io_errc::bad_header, "non-positive image size");
  if (w * h > max_decoded_pixels)
    throw io_error(io_errc::unsupported, "image too large");
}

// ---------------------------------------------------------------------------
// PFM

bool is_space(uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view next_token(std::span<const uint8_t> bytes, size_t& pos) {
  while (pos < bytes.size() && is_space(bytes[pos])) ++pos;
  const size_t begin = pos;
  while (pos < bytes.size() && !is_space(bytes[pos]) && pos - begin < 64) ++pos;
  if (begin == pos) throw io_error(io_errc::truncated, "pfm header ends early");
  return {reinterpret_cast<const char*>(bytes.data() + begin), pos - begin};
}

template <typename T>
T parse_number(std::string_view tok, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw io_error(io_errc::bad_header, std::string("pfm: bad ") + what);
  return value;
}

uint32_t byteswap32(uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

std::vector<uint8_t> encode_pfm(const FloatImage& img) {
  if (img.channels != 1 && img.channels != 3)
    throw io_error(io_errc::unsupported, "pfm: channels must be 1 or 3");
  check_dimensions(img.width, img.height);
  const std::string header = std::string(img.channels == 3 ? "PF" : "Pf") + "\n" +
                             std::to_string(img.width) + " " + std::to_string(img.height) +
                             "\n-1.0\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  const size_t row = static_cast<size_t>(img.width) * img.channels;
  out.reserve(out.size() + row * img.height * 4);
  for (int y = img.height - 1; y >= 0; --y)
    for (size_t i = 0; i < row; ++i) {
      uint32_t bits = std::bit_cast<uint32_t>(img.samples[y * row + i]);
      if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<uint8_t>(bits >> (8 * b)));
    }
  return out;
}

FloatImage decode_pfm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != 'F' && bytes[1] != 'f'))
    throw io_error(io_errc::bad_magic, "not a PFM file");
  size_t pos = 0;
  const auto magic = next_token(bytes, pos);
  if (magic != "PF" && magic != "Pf") throw io_error(io_errc::bad_magic, "not a PFM file");
  const int64_t w = parse_number<int64_t>(next_token(bytes, pos), "width");
  const int64_t h = parse_number<int64_t>(next_token(bytes, pos), "height");
  const double scale = parse_number<double>(next_token(bytes, pos), "scale");
  if (scale == 0 || !std::isfinite(scale)) throw io_error(io_errc::bad_header, "pfm: bad scale");
  check_dimensions(w, h);
  if (pos >= bytes.size() || !is_space(bytes[pos]))
    throw io_error(io_errc::truncated, "pfm: missing payload");
  ++pos;
  FloatImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.channels = magic == "PF" ? 3 : 1;
  const size_t row = static_cast<size_t>(w) * img.channels;
  const size_t need = row * static_cast<size_t>(h) * 4;
  if (bytes.size() - pos < need) throw io_error(io_errc::truncated, "pfm: payload too short");
  const bool little = scale < 0;
  const bool swap = little != (std::endian::native == std::endian::little);
  img.samples.resize(row * h);
  const uint8_t* p = bytes.data() + pos;
  for (int64_t y = h - 1; y >= 0; --y)
    for (size_t i = 0; i < row; ++i, p += 4) {
      uint32_t bits;
      std::memcpy(&bits, p, 4);
      if (swap) bits = byteswap32(bits);
      img.samples[y * row + i] = std::bit_cast<float>(bits);
    }
  return img;
}

// ---------------------------------------------------------------------------
// Radiance RGBE

namespace {

void rgbe_from_float(const Rgb& c, uint8_t out[4]) {
  if (!is_finite(c)) throw io_error(io_errc::out_of_range, "rgbe: non-finite value");
  if (c.r < 0 || c.g < 0 || c.b < 0) throw io_error(io_errc::out_of_range, "rgbe: negative value");
  const Rgb& v = c;
  const double m = max_component(v);
  if (m < 1e-32) {
    out[0] = out[1] = out[2] = out[3] = 0;
    return;
  }
  int e;
  std::frexp(m, &e);
  for (int attempt = 0; attempt < 2; ++attempt, ++e) {
    const double scale = std::ldexp(1.0, 8 - e);
    long q[3];
    for (int i = 0; i < 3; ++i) q[i] = std::lround(v[i] * scale);
    if (std::max({q[0], q[1], q[2]}) > 255) continue;
    if (e + 128 > 255) throw io_error(io_errc::out_of_range, "rgbe: value too large");
    if (e + 128 < 1) break;
    for (int i = 0; i < 3; ++i) out[i] = static_cast<uint8_t>(q[i]);
    out[3] = static_cast<uint8_t>(e + 128);
    return;
  }
  out[0] = out[1] = out[2] = out[3] = 0;
}

Rgb rgbe_to_float(const uint8_t in[4]) {
  if (in[3] == 0) return {};
  const double f = std::ldexp(1.0, static_cast<int>(in[3]) - (128 + 8));
  return {in[0] * f, in[1] * f, in[2] * f};
}

}  // namespace

std::vector<uint8_t> encode_rgbe(const RgbImage& img) {
  check_dimensions(img.width(), img.height());
  const std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                             std::to_string(img.height()) + " +X " +
                             std::to_string(img.width()) + "\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size() * 4);
  for (const auto& px : img.pixels()) {
    uint8_t q[4];
    rgbe_from_float(px, q);
    out.insert(out.end(), q, q + 4);
  }
  return out;
}

RgbImage decode_rgbe(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != '#' || bytes[1] != '?')
    throw io_error(io_errc::bad_magic, "not a Radiance HDR file");
  size_t pos = 0;
  const auto read_line = [&]() {
    const size_t begin = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') {
      if (pos - begin > 4096) throw io_error(io_errc::bad_header, "hdr: header line too long");
      ++pos;
    }
    if (pos >= bytes.size()) throw io_error(io_errc::truncated, "hdr: header ends early");
    std::string line(reinterpret_cast<const char*>(bytes.data() + begin), pos - begin);
    ++pos;
    return line;
  };
  read_line();
  for (;;) {
    const std::string line = read_line();
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe")
      throw io_error(io_errc::unsupported, "hdr: " + line);
  }
  const std::string res = read_line();
  char ys[3] = {}, xs[3] = {};
  long h = 0, w = 0;
  char tail = 0;
  if (std::sscanf(res.c_str(), "%2s %ld %2s %ld%c", ys, &h, xs, &w, &tail) != 4)
    throw io_error(io_errc::bad_header, "hdr: bad resolution line");
  if (std::string(ys) != "-Y" || std::string(xs) != "+X")
    throw io_error(io_errc::unsupported, "hdr: orientation " + res);
  check_dimensions(w, h);

  RgbImage img(static_cast<int>(w), static_cast<int>(h));
  std::vector<uint8_t> scan(static_cast<size_t>(w) * 4);
  for (long y = 0; y < h; ++y) {
    const bool rle = w >= 8 && w < 32768 && bytes.size() - pos >= 4 && bytes[pos] == 2 &&
                     bytes[pos + 1] == 2 && !(bytes[pos + 2] & 0x80);
    if (rle) {
      if (((bytes[pos + 2] << 8) | bytes[pos + 3]) != w)
        throw io_error(io_errc::corrupt, "hdr: scanline width mismatch");
      pos += 4;
      for (int ch = 0; ch < 4; ++ch) {
        long x = 0;
        while (x < w) {
          if (pos >= bytes.size()) throw io_error(io_errc::truncated, "hdr: scanline ends early");
          int count = bytes[pos++];
          if (count > 128) {
            count -= 128;
            if (x + count > w) throw io_error(io_errc::corrupt, "hdr: run overflows scanline");
            if (pos >= bytes.size()) throw io_error(io_errc::truncated, "hdr: run ends early");
            const uint8_t v = bytes[pos++];
            for (int k = 0; k < count; ++k) scan[(x++) * 4 + ch] = v;
          } else {
            if (count == 0 || x + count > w)
              throw io_error(io_errc::corrupt, "hdr: bad literal run");
            if (bytes.size() - pos < static_cast<size_t>(count))
              throw io_error(io_errc::truncated, "hdr: literal ends early");
            for (int k = 0; k < count; ++k) scan[(x++) * 4 + ch] = bytes[pos++];
          }
        }
      }
    } else {
      if (bytes.size() - pos < scan.size()) throw io_error(io_errc::truncated, "hdr: payload too short");
      std::memcpy(scan.data(), bytes.data() + pos, scan.size());
      pos += scan.size();
    }
    for (long x = 0; x < w; ++x)
      img(static_cast<int>(x), static_cast<int>(y)) = rgbe_to_float(&scan[x * 4]);
  }
  return img;
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngContext {
  const uint8_t* data = nullptr;
  size_t size = 0;
  size_t pos = 0;
  std::vector<uint8_t>* sink = nullptr;
  std::vector<uint8_t> row;
  char message[256] = {};
};

void png_on_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg ? msg : "libpng error");
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

void png_read_mem(png_structp png, png_bytep out, png_size_t len) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  if (len > ctx->size - ctx->pos) png_error(png, "unexpected end of data");
  std::memcpy(out, ctx->data + ctx->pos, len);
  ctx->pos += len;
}

void png_write_mem(png_structp png, png_bytep in, png_size_t len) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  ctx->sink->insert(ctx->sink->end(), in, in + len);
}

void png_flush_mem(png_structp) {}

// Returns false with ctx.message set on failure. No C++ object with a
// destructor lives in this frame across setjmp.
bool png_decode_impl(PngContext& ctx, Png16& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &ctx, png_read_mem);
  png_set_user_limits(png, 1u << 16, 1u << 16);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  if (static_cast<int64_t>(w) * h > max_decoded_pixels) png_error(png, "image too large");
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  if ((channels != 1 && channels != 3) || (out_depth != 8 && out_depth != 16))
    png_error(png, "unsupported pixel layout");
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.channels = channels;
  out.samples.assign(static_cast<size_t>(w) * h * channels, 0);
  const size_t rowbytes = png_get_rowbytes(png, info);
  ctx.row.assign(rowbytes * h, 0);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = ctx.row.data() + y * rowbytes;
  png_read_image(png, rows.data());
  const size_t per_row = static_cast<size_t>(w) * channels;
  for (png_uint_32 y = 0; y < h; ++y)
    for (size_t i = 0; i < per_row; ++i) {
      const uint8_t* r = rows[y];
      out.samples[y * per_row + i] =
          out_depth == 16 ? static_cast<uint16_t>((r[2 * i] << 8) | r[2 * i + 1])
                          : static_cast<uint16_t>(r[i] * 257);
    }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool png_encode_impl(PngContext& ctx, int width, int height, int channels, int depth,
                     const std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &ctx, png_write_mem, png_flush_mem);
  png_set_IHDR(png, info, width, height, depth,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth < 8) png_set_packing(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

Png16 decode_png(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw io_error(io_errc::bad_magic, "not a PNG file");
  PngContext ctx;
  ctx.data = bytes.data();
  ctx.size = bytes.size();
  Png16 out;
  if (!png_decode_impl(ctx, out)) {
    const std::string msg = ctx.message;
    const bool short_data = msg.find("end of data") != std::string::npos;
    throw io_error(short_data ? io_errc::truncated : io_errc::corrupt, "png: " + msg);
  }
  return out;
}

std::vector<uint8_t> encode_png16(const Png16& img) {
  if (img.channels != 1 && img.channels != 3)
    throw io_error(io_errc::unsupported, "png: channels must be 1 or 3");
  check_dimensions(img.width, img.height);
  const size_t per_row = static_cast<size_t>(img.width) * img.channels;
  std::vector<uint8_t> buffer(per_row * 2 * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) {
    rows[y] = buffer.data() + y * per_row * 2;
    for (size_t i = 0; i < per_row; ++i) {
      const uint16_t v = img.samples[y * per_row + i];
      rows[y][2 * i] = static_cast<uint8_t>(v >> 8);
      rows[y][2 * i + 1] = static_cast<uint8_t>(v & 0xff);
    }
  }
  std::vector<uint8_t> out;
  PngContext ctx;
  ctx.sink = &out;
  if (!png_encode_impl(ctx, img.width, img.height, img.channels, 16, rows))
    throw io_error(io_errc::write_failed, std::string("png: ") + ctx.message);
  return out;
}

std::vector<uint8_t> encode_png1(const MaskImage& mask) {
  check_dimensions(mask.width(), mask.height());
  std::vector<uint8_t> buffer(mask.size());
  std::vector<png_bytep> rows(mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    rows[y] = buffer.data() + static_cast<size_t>(y) * mask.width();
    for (int x = 0; x < mask.width(); ++x) rows[y][x] = mask(x, y) ? 1 : 0;
  }
  std::vector<uint8_t> out;
  PngContext ctx;
  ctx.sink = &out;
  if (!png_encode_impl(ctx, mask.width(), mask.height(), 1, 1, rows))
    throw io_error(io_errc::write_failed, std::string("png: ") + ctx.message);
  return out;
}

// ---------------------------------------------------------------------------
// Conversions

FloatImage to_float_image(const RgbImage& img) {
  FloatImage out{img.width(), img.height(), 3, {}};
  out.samples.reserve(img.size() * 3);
  for (const auto& p : img.pixels())
    for (int c = 0; c < 3; ++c) out.samples.push_back(static_cast<float>(p[c]));
  return out;
}

FloatImage to_float_image(const ScalarImage& img) {
  FloatImage out{img.width(), img.height(), 1, {}};
  out.samples.reserve(img.size());
  for (double v : img.pixels()) out.samples.push_back(static_cast<float>(v));
  return out;
}

RgbImage to_rgb_image(const FloatImage& img) {
  if (img.channels != 3) throw io_error(io_errc::unsupported, "expected a 3-channel image");
  RgbImage out(img.width, img.height);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = {img.samples[3 * i], img.samples[3 * i + 1], img.samples[3 * i + 2]};
  return out;
}

ScalarImage to_scalar_image(const FloatImage& img) {
  if (img.channels != 1) throw io_error(io_errc::unsupported, "expected a 1-channel image");
  ScalarImage out(img.width, img.height);
  for (size_t i = 0; i < out.size(); ++i) out[i] = img.samples[i];
  return out;
}

namespace {

uint16_t quantize16(double v) {
  if (!(v >= 0 && v <= 1))
    throw io_error(io_errc::out_of_range, "png16: value " + std::to_string(v) + " outside [0,1]");
  return static_cast<uint16_t>(std::lround(v * 65535.0));
}

}  // namespace

Png16 quantize_png16(const RgbImage& img) {
  Png16 out{img.width(), img.height(), 3, {}};
  out.samples.reserve(img.size() * 3);
  for (const auto& p : img.pixels())
    for (int c = 0; c < 3; ++c) out.samples.push_back(quantize16(p[c]));
  return out;
}

Png16 quantize_png16(const ScalarImage& img) {
  Png16 out{img.width(), img.height(), 1, {}};
  out.samples.reserve(img.size());
  for (double v : img.pixels()) out.samples.push_back(quantize16(v));
  return out;
}

RgbImage dequantize_rgb(const Png16& img) {
  RgbImage out(img.width, img.height);
  for (size_t i = 0; i < out.size(); ++i) {
    if (img.channels == 3)
      out[i] = {img.samples[3 * i] / 65535.0, img.samples[3 * i + 1] / 65535.0,
                img.samples[3 * i + 2] / 65535.0};
    else
      out[i] = gray(img.samples[i] / 65535.0);
  }
  return out;
}

ScalarImage dequantize_scalar(const Png16& img) {
  if (img.channels != 1) throw io_error(io_errc::unsupported, "expected a gray PNG");
  ScalarImage out(img.width, img.height);
  for (size_t i = 0; i < out.size(); ++i) out[i] = img.samples[i] / 65535.0;
  return out;
}

RgbImage encode_normals(const NormalImage& normals) {
  RgbImage out(normals.width(), normals.height());
  for (size_t i = 0; i < normals.size(); ++i) {
    const vec3& n = normals[i];
    out[i] = {(n.x + 1) / 2, (n.y + 1) / 2, (n.z + 1) / 2};
  }
  return out;
}

NormalImage decode_normals(const RgbImage& encoded) {
  NormalImage out(encoded.width(), encoded.height());
  for (size_t i = 0; i < encoded.size(); ++i) {
    const Rgb& e = encoded[i];
    const vec3 n = {2 * e.r - 1, 2 * e.g - 1, 2 * e.b - 1};
    const double len = length(n);
    // Background normals encode as exactly 0.5 and decode to zero.
    out[i] = len > 1e-3 ? n / len : vec3{};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::string extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

[[noreturn]] void unknown_extension(const fs::path& path) {
  throw io_error(io_errc::unsupported, "unknown image extension: " + path.string());
}

}  // namespace

RgbImage read_rgb(const fs::path& path) {
  const auto ext = extension(path);
  const auto bytes = read_file(path);
  if (ext == ".pfm") return to_rgb_image(decode_pfm(bytes));
  if (ext == ".hdr") return decode_rgbe(bytes);
  if (ext == ".png") return dequantize_rgb(decode_png(bytes));
  unknown_extension(path);
}

void write_rgb(const fs::path& path, const RgbImage& img) {
  const auto ext = extension(path);
  if (ext == ".pfm") return write_file(path, encode_pfm(to_float_image(img)));
  if (ext == ".hdr") return write_file(path, encode_rgbe(img));
  if (ext == ".png") return write_file(path, encode_png16(quantize_png16(img)));
  unknown_extension(path);
}

ScalarImage read_scalar(const fs::path& path) {
  const auto ext = extension(path);
  const auto bytes = read_file(path);
  if (ext == ".pfm") return to_scalar_image(decode_pfm(bytes));
  if (ext == ".png") return dequantize_scalar(decode_png(bytes));
  unknown_extension(path);
}

void write_scalar(const fs::path& path, const ScalarImage& img) {
  const auto ext = extension(path);
  if (ext == ".pfm") return write_file(path, encode_pfm(to_float_image(img)));
  if (ext == ".png") return write_file(path, encode_png16(quantize_png16(img)));
  unknown_extension(path);
}

MaskImage read_mask(const fs::path& path) {
  const auto ext = extension(path);
  if (ext != ".png") unknown_extension(path);
  const Png16 png = decode_png(read_file(path));
  if (png.channels != 1) throw io_error(io_errc::unsupported, "mask PNG must be gray");
  MaskImage out(png.width, png.height);
  for (size_t i = 0; i < out.size(); ++i) out[i] = png.samples[i] > 0 ? 1 : 0;
  return out;
}

void write_mask(const fs::path& path, const MaskImage& mask) {
  if (extension(path) != ".png") unknown_extension(path);
  write_file(path, encode_png1(mask));
}

EnvMap read_env(const fs::path& path) {
  RgbImage img = read_rgb(path);
  if (img.width() != 2 * img.height())
    throw io_error(io_errc::unsupported, "environment map must be 2:1, got " +
                                             std::to_string(img.width()) + "x" +
                                             std::to_string(img.height()));
  for (const auto& t : img.pixels())
    if (!is_finite(t) || t.r < 0 || t.g < 0 || t.b < 0)
      throw io_error(io_errc::out_of_range, "environment map has negative or non-finite texels");
  return EnvMap(std::move(img));
}

void write_env(const fs::path& path, const EnvMap& env) { write_rgb(path, env.image()); }

RgbImage tonemap_log(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i)
    for (int c = 0; c < 3; ++c)
      out[i][c] = std::clamp(std::log1p(std::max(img[i][c], 0.0)), 0.0, 1.0);
  return out;
}

}  // namespace relight

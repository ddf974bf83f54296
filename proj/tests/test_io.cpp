#include <doctest.h>

#include <cstring>

#include "relight/io.h"
#include "support.h"

using namespace relight;
using doctest::Approx;

namespace {

FloatImage random_float_image(int w, int h, int channels, uint64_t seed) {
  FloatImage img{w, h, channels, {}};
  CounterRng rng(seed);
  for (int i = 0; i < w * h * channels; ++i)
    img.samples.push_back(static_cast<float>(rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8))));
  return img;
}

RgbImage random_hdr(int w, int h, uint64_t seed) {
  RgbImage img(w, h);
  CounterRng rng(seed);
  for (auto& p : img.pixels()) {
    const double scale = std::pow(10.0, rng.uniform(-3, 4));
    p = {rng.uniform() * scale, rng.uniform() * scale, rng.uniform() * scale};
  }
  return img;
}

// Decoding either succeeds or throws io_error; anything else fails the test.
template <typename F>
void survives(F&& decode, std::vector<uint8_t> bytes, uint64_t seed, int rounds) {
  CounterRng rng(seed);
  for (size_t len = 0; len < bytes.size(); len += 1 + len / 8) {
    try {
      decode(std::span<const uint8_t>(bytes.data(), len));
    } catch (const io_error&) {
    }
  }
  for (int i = 0; i < rounds; ++i) {
    std::vector<uint8_t> m = bytes;
    const int flips = rng.uniform_int(1, 8);
    for (int f = 0; f < flips; ++f) {
      const size_t at = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(m.size()) - 1));
      m[at] = static_cast<uint8_t>(rng.uniform_int(0, 255));
    }
    if (rng.uniform() < 0.3) m.resize(static_cast<size_t>(rng.uniform_int(0, static_cast<int>(m.size()))));
    try {
      decode(std::span<const uint8_t>(m));
    } catch (const io_error&) {
    }
  }
  for (int i = 0; i < rounds / 4; ++i) {
    std::vector<uint8_t> noise(static_cast<size_t>(rng.uniform_int(0, 512)));
    for (auto& b : noise) b = static_cast<uint8_t>(rng.uniform_int(0, 255));
    try {
      decode(std::span<const uint8_t>(noise));
    } catch (const io_error&) {
    }
  }
}

std::vector<uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("pfm round trip is bit-exact") {
  for (int channels : {1, 3}) {
    const FloatImage img = random_float_image(17, 9, channels, 3 + channels);
    const FloatImage back = decode_pfm(encode_pfm(img));
    CHECK(back.width == 17);
    CHECK(back.height == 9);
    CHECK(back.channels == channels);
    REQUIRE(back.samples.size() == img.samples.size());
    CHECK(std::memcmp(back.samples.data(), img.samples.data(), img.samples.size() * sizeof(float)) == 0);
  }
  // Rows are stored bottom to top.
  FloatImage two{1, 2, 1, {1.0f, 2.0f}};
  const auto bytes = encode_pfm(two);
  float last;
  std::memcpy(&last, bytes.data() + bytes.size() - 4, 4);
  CHECK(last == 1.0f);
}

TEST_CASE("pfm decodes big-endian files") {
  std::string s = "Pf\n2 1\n1.0\n";
  for (float f : {0.5f, -3.25f}) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int k = 3; k >= 0; --k) s.push_back(static_cast<char>((u >> (8 * k)) & 0xff));
  }
  const FloatImage img = decode_pfm(bytes_of(s));
  CHECK(img.samples == std::vector<float>{0.5f, -3.25f});
}

TEST_CASE("pfm error taxonomy") {
  const auto code = [](const std::string& s) {
    try {
      decode_pfm(bytes_of(s));
    } catch (const io_error& e) {
      return e.code();
    }
    return io_errc::corrupt;  // not thrown: flagged by the CHECKs below
  };
  CHECK(code("P6\n1 1\n-1.0\n") == io_errc::bad_magic);
  CHECK(code("PF\n1 x\n-1.0\n") == io_errc::bad_header);
  CHECK(code("PF\n1 1\n0\n") == io_errc::bad_header);
  CHECK(code("PF\n0 1\n-1.0\n") == io_errc::bad_header);
  CHECK(code("PF\n2 2\n-1.0\n" + std::string(47, '\0')) == io_errc::truncated);
  CHECK(code("PF\n100000 100000\n-1.0\n") == io_errc::unsupported);
  CHECK(code("") == io_errc::bad_magic);
}

TEST_CASE("rgbe round trip within shared-exponent quantization") {
  const RgbImage img = random_hdr(64, 32, 11);
  const RgbImage back = decode_rgbe(encode_rgbe(img));
  REQUIRE(back.width() == 64);
  REQUIRE(back.height() == 32);
  double worst = 0;
  for (size_t i = 0; i < img.size(); ++i) {
    const double peak = max_component(img[i]);
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::fabs(back[i][c] - img[i][c]) / peak);
  }
  CHECK(worst <= 0.01);
  MESSAGE("rgbe worst error relative to texel peak " << worst);

  // Black stays black, and powers of two survive exactly.
  RgbImage exact(2, 1);
  exact[1] = {1.0, 0.5, 0.25};
  CHECK(decode_rgbe(encode_rgbe(exact)) == exact);

  RgbImage bad(1, 1, Rgb{NAN, 0, 0});
  CHECK_THROWS_AS(encode_rgbe(bad), io_error);
  RgbImage neg(1, 1, Rgb{-1, 0, 0});
  CHECK_THROWS_AS(encode_rgbe(neg), io_error);
}

TEST_CASE("rgbe decodes run-length scanlines") {
  // 8 pixels wide, one row, new-style RLE: each channel as a run of 8.
  std::string s = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 8\n";
  s += std::string{2, 2, 0, 8};
  for (uint8_t v : {128, 64, 32, 129}) {
    s.push_back(static_cast<char>(128 + 8));
    s.push_back(static_cast<char>(v));
  }
  const RgbImage img = decode_rgbe(bytes_of(s));
  REQUIRE(img.width() == 8);
  for (const Rgb& p : img.pixels()) {
    CHECK(p.r == 1.0);
    CHECK(p.g == 0.5);
    CHECK(p.b == 0.25);
  }
  // A run that overflows the scanline is corrupt, not a crash.
  std::string bad = s;
  bad[bad.size() - 2] = static_cast<char>(128 + 9);
  CHECK_THROWS_AS(decode_rgbe(bytes_of(bad)), io_error);
}

TEST_CASE("png16 round trips") {
  CounterRng rng(5);
  RgbImage img(13, 7);
  for (auto& p : img.pixels()) p = {rng.uniform(), rng.uniform(), rng.uniform()};
  const RgbImage back = dequantize_rgb(decode_png(encode_png16(quantize_png16(img))));
  CHECK(test::max_abs_diff(back, img) <= 0.5 / 65535 + 1e-12);

  ScalarImage s(5, 4);
  for (auto& v : s.pixels()) v = rng.uniform();
  const ScalarImage sb = dequantize_scalar(decode_png(encode_png16(quantize_png16(s))));
  for (size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(sb[i] - s[i]) <= 0.5 / 65535 + 1e-12);

  CHECK_THROWS_AS(quantize_png16(RgbImage(1, 1, gray(1.01))), io_error);
  CHECK_THROWS_AS(quantize_png16(ScalarImage(1, 1, -0.01)), io_error);

  MaskImage mask(9, 3);
  mask(2, 1) = mask(8, 2) = 1;
  const Png16 m = decode_png(encode_png1(mask));
  REQUIRE(m.channels == 1);
  for (size_t i = 0; i < mask.size(); ++i) CHECK((m.samples[i] != 0) == (mask[i] != 0));
}

TEST_CASE("normal encoding") {
  NormalImage n(3, 1);
  n[0] = {0, 0, 1};
  n[1] = Direction(-0.3, 0.4, 0.5);
  const RgbImage enc = encode_normals(n);
  CHECK(enc[0] == Rgb{0.5, 0.5, 1.0});
  CHECK(enc[2] == Rgb{0.5, 0.5, 0.5});
  const NormalImage dec = decode_normals(dequantize_rgb(quantize_png16(enc)));
  CHECK(dec[2] == vec3{});
  for (int i = 0; i < 2; ++i) {
    CHECK(length(dec[i]) == Approx(1).epsilon(1e-12));
    CHECK(test::angle_deg(dec[i], n[i]) < 0.01);
  }
  // Decoding renormalizes off-sphere codes.
  RgbImage off(1, 1, Rgb{0.5, 0.5, 0.9});
  CHECK(decode_normals(off)[0] == vec3{0, 0, 1});
}

TEST_CASE("file helpers dispatch on extension") {
  test::TempDir dir("io");
  const RgbImage img = random_hdr(8, 4, 2);
  write_rgb(dir / "a.pfm", img);
  const RgbImage pfm = read_rgb(dir / "a.pfm");
  for (size_t i = 0; i < img.size(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(pfm[i][c] == static_cast<float>(img[i][c]));
  write_rgb(dir / "a.hdr", img);
  CHECK(read_rgb(dir / "a.hdr").width() == 8);

  ScalarImage s(4, 4, 0.25);
  write_scalar(dir / "s.png", s);
  CHECK(read_scalar(dir / "s.png")[3] == Approx(0.25).epsilon(1e-4));

  MaskImage m(4, 4);
  m[5] = 1;
  write_mask(dir / "m.png", m);
  CHECK(read_mask(dir / "m.png") == m);

  const EnvMap env = test::textured_env(4);
  write_env(dir / "env.pfm", env);
  const EnvMap back = read_env(dir / "env.pfm");
  CHECK(back.height() == env.height());
  CHECK(back.at(3, 5).r == static_cast<float>(env.at(3, 5).r));

  write_rgb(dir / "wide.pfm", RgbImage(10, 4));
  CHECK_THROWS_AS(read_env(dir / "wide.pfm"), io_error);
  write_rgb(dir / "neg.pfm", RgbImage(8, 4, Rgb{-1, 0, 0}));
  CHECK_THROWS_AS(read_env(dir / "neg.pfm"), io_error);

  CHECK_THROWS_AS(write_rgb(dir / "a.jpg", img), io_error);
  CHECK_THROWS_AS(read_rgb(dir / "absent.pfm"), io_error);
  try {
    read_rgb(dir / "absent.pfm");
  } catch (const io_error& e) {
    CHECK(e.code() == io_errc::open_failed);
  }
}

TEST_CASE("decoders survive truncated and corrupted input") {
  const RgbImage img = random_hdr(24, 12, 9);
  survives([](auto b) { decode_pfm(b); }, encode_pfm(to_float_image(img)), 1, 2000);
  survives([](auto b) { decode_rgbe(b); }, encode_rgbe(img), 2, 2000);
  RgbImage ldr = img;
  for (auto& p : ldr.pixels()) p = {std::min(p.r, 1.0), std::min(p.g, 1.0), std::min(p.b, 1.0)};
  survives([](auto b) { decode_png(b); }, encode_png16(quantize_png16(ldr)), 3, 2000);
  survives([](auto b) { decode_png(b); }, encode_png1(MaskImage(30, 20, 1)), 4, 1000);
  CHECK(true);
}

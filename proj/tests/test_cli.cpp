#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../tools/cli.h"
#include "relight/bundle.h"
#include "relight/io.h"
#include "support.h"

using namespace relight;
using doctest::Approx;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "relight");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string str(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const Result none = run({});
  CHECK(none.code == cli::exit_usage);

  const Result unknown = run({"teleport"});
  CHECK(unknown.code == cli::exit_usage);
  CHECK(unknown.err.find("teleport") != std::string::npos);

  const Result flag = run({"gen-scene", "--seed", "1", "--out", "x", "--colour", "red"});
  CHECK(flag.code == cli::exit_usage);
  CHECK(flag.err.find("--colour") != std::string::npos);
  CHECK(flag.err.find("Usage") != std::string::npos);

  CHECK(run({"gen-scene", "--out", "x"}).code == cli::exit_usage);
  CHECK(run({"gen-masks", "--out", "x"}).code == cli::exit_usage);
  CHECK(run({"gen-scene", "--seed", "1", "--out", "x", "--kind", "cube"}).code == cli::exit_usage);
  CHECK(run({"recover-albedo", "--render", "r.pfm", "--out", "a.pfm"}).code == cli::exit_usage);

  const Result help = run({"--help"});
  CHECK(help.code == cli::exit_ok);
  CHECK(help.out.find("relight") != std::string::npos);
}

TEST_CASE("data errors exit with 3") {
  test::TempDir dir("cli-bad");
  const Result missing = run({"relight", "--bundle", str(dir / "none"), "--env", str(dir / "e.pfm"),
                              "--out", str(dir / "o.pfm")});
  CHECK(missing.code == cli::exit_data);
  CHECK_FALSE(missing.err.empty());

  std::ofstream(dir / "junk.pfm") << "PF\n2 2\n-1.0\nshort";
  CHECK(run({"eval", "--pred", str(dir / "junk.pfm"), "--ref", str(dir / "junk.pfm")}).code == cli::exit_data);
}

TEST_CASE("generate, render, relight and evaluate") {
  test::TempDir dir("cli");
  const auto bundle = dir / "scene";
  REQUIRE(run({"gen-scene", "--seed", "7", "--out", str(bundle), "--resolution", "32"}).code == 0);
  REQUIRE(run({"gen-env", "--seed", "3", "--out", str(dir / "sky.pfm"), "--height", "16"}).code == 0);

  // Determinism: the same seed gives the same bundle.
  REQUIRE(run({"gen-scene", "--seed", "7", "--out", str(dir / "again"), "--resolution", "32"}).code == 0);
  CHECK(read_bundle(bundle) == read_bundle(dir / "again"));

  const Result r = run({"render", "--bundle", str(bundle), "--env", str(dir / "sky.pfm"), "--out", str(dir / "render")});
  REQUIRE(r.code == 0);
  const RgbImage pbr = read_rgb(dir / "render" / "pbr.pfm");
  CHECK(pbr.width() == 32);
  CHECK(std::filesystem::exists(dir / "render" / "diffuse.pfm"));
  CHECK(std::filesystem::exists(dir / "render" / "specular.pfm"));

  REQUIRE(run({"relight", "--bundle", str(bundle), "--env", str(dir / "sky.pfm"), "--out", str(dir / "relit.pfm")}).code == 0);
  const RgbImage relit = read_rgb(dir / "relit.pfm");
  CHECK(relit == pbr);
  // The library agrees with the tool (up to float storage).
  const RgbImage direct = relight::relight(read_bundle(bundle), read_env(dir / "sky.pfm"));
  for (size_t i = 0; i < direct.size(); ++i) CHECK(relit[i].r == static_cast<float>(direct[i].r));

  const Result same = run({"eval", "--pred", str(dir / "relit.pfm"), "--ref", str(dir / "relit.pfm")});
  REQUIRE(same.code == 0);
  CHECK(same.out.find("\"ssim\":1.0") != std::string::npos);
  CHECK(same.out.find("\"mae\":0.0") != std::string::npos);
  CHECK(same.out.find("\"space\":\"log1p\"") != std::string::npos);

  const Result diff = run({"eval", "--pred", str(dir / "relit.pfm"), "--ref", str(dir / "render" / "diffuse.pfm"), "--linear"});
  REQUIRE(diff.code == 0);
  CHECK(diff.out.find("\"space\":\"linear\"") != std::string::npos);

  REQUIRE(run({"validate", "--bundle", str(bundle)}).code == 0);
}

TEST_CASE("light stage and intrinsics subcommands") {
  test::TempDir dir("cli-olat");
  const auto bundle = dir / "scene";
  REQUIRE(run({"gen-scene", "--seed", "2", "--out", str(bundle), "--resolution", "24"}).code == 0);
  REQUIRE(run({"gen-env", "--seed", "5", "--out", str(dir / "sky.hdr"), "--height", "16"}).code == 0);
  REQUIRE(run({"olat-render", "--bundle", str(bundle), "--out", str(dir / "olat"), "--lights", "40"}).code == 0);
  CHECK(read_olat(dir / "olat").rig.count() == 40);
  REQUIRE(run({"olat-composite", "--olat", str(dir / "olat"), "--env", str(dir / "sky.hdr"), "--out", str(dir / "c.pfm")}).code == 0);
  CHECK(read_rgb(dir / "c.pfm").width() == 24);

  const Result ps = run({"photometric-stereo", "--olat", str(dir / "olat"), "--out", str(dir / "ps")});
  REQUIRE(ps.code == 0);
  CHECK(ps.out.find("invalid_pixels") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "ps" / "normal.pfm"));

  REQUIRE(run({"convolve-hdri", "--env", str(dir / "sky.hdr"), "--out", str(dir / "conv"), "--exponents", "1,16",
               "--height", "16"})
              .code == 0);
  CHECK(read_env(dir / "conv" / "env_p16.pfm").height() == 16);

  REQUIRE(run({"render", "--bundle", str(bundle), "--env", str(dir / "sky.hdr"), "--out", str(dir / "r")}).code == 0);
  const Result rec = run({"recover-albedo", "--render", str(dir / "r" / "diffuse.pfm"), "--env", str(dir / "sky.hdr"),
                          "--bundle", str(bundle), "--out", str(dir / "albedo.pfm")});
  REQUIRE(rec.code == 0);
  CHECK(rec.out.find("flagged_pixels") != std::string::npos);

  REQUIRE(run({"export-viewer", "--bundle", str(bundle), "--env", str(dir / "sky.hdr"), "--out", str(dir / "viewer"),
               "--encoding", "png16"})
              .code == 0);
  CHECK(std::filesystem::exists(dir / "viewer" / "reference.png"));
  CHECK(load_bundle(dir / "viewer").encoding == MapEncoding::png16);
}

TEST_CASE("gen-masks writes reproducible masks") {
  test::TempDir dir("cli-masks");
  REQUIRE(run({"gen-masks", "--count", "4", "--seed", "10", "--out", str(dir / "a"), "--height", "32", "--width", "48"}).code == 0);
  REQUIRE(run({"gen-masks", "--count", "4", "--seed", "10", "--out", str(dir / "b"), "--height", "32", "--width", "48"}).code == 0);
  for (int i = 0; i < 4; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mask_%04d.png", i);
    const MaskImage a = read_mask(dir / "a" / name);
    CHECK(a.width() == 48);
    CHECK(a == read_mask(dir / "b" / name));
    CHECK(a == sample_mask(MaskPolicy{}, 32, 48, 10 + i).bits());
  }
  CHECK(std::filesystem::exists(dir / "a" / "policy.json"));
}

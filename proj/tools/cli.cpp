#include "cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include "relight/bundle.h"
#include "relight/envmap.h"
#include "relight/intrinsics.h"
#include "relight/io.h"
#include "relight/lightstage.h"
#include "relight/masks.h"
#include "relight/metrics.h"
#include "relight/render.h"
#include "relight/rng.h"
#include "relight/scene.h"

namespace relight::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for argument combinations CLI11 cannot express.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& p, const std::string& text) {
  write_file(p, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io_error(io_errc::write_failed, "cannot create " + dir.string());
}

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png";
}

// Linear images go to .pfm/.hdr as is; .png gets the log(1+x) display map.
void write_render(const fs::path& p, const RgbImage& img) {
  write_rgb(p, is_png(p) ? tonemap_log(img) : img);
}

Direction parse_view(const std::vector<double>& v) {
  if (v.size() != 3) throw usage_error("--view needs three components");
  return Direction(v[0], v[1], v[2]);
}

// Procedural sky: a vertical gradient plus a few soft suns.
EnvMap synth_sky(int height, uint64_t seed) {
  CounterRng rng(seed, 0x5c1e);
  struct Sun {
    vec3 dir;
    double width;
    Rgb color;
  };
  std::vector<Sun> suns;
  const int count = rng.uniform_int(1, 3);
  for (int i = 0; i < count; ++i) {
    const double phi = rng.uniform(0, 2 * pi);
    const double y = rng.uniform(0.1, 0.9);
    const double r = std::sqrt(1 - y * y);
    const double strength = rng.uniform(20, 60);
    const double warm = rng.uniform(0.7, 1.0);
    suns.push_back({{r * std::sin(phi), y, -r * std::cos(phi)},
                    rng.uniform(0.08, 0.2),
                    {strength, strength * warm, strength * warm * warm}});
  }
  EnvMap env(height, 2 * height);
  for (int row = 0; row < height; ++row)
    for (int col = 0; col < env.width(); ++col) {
      const vec3 d = texel_to_dir(row, col, height, env.width());
      Rgb c = d.y > 0 ? Rgb{0.25, 0.35, 0.6} * (0.4 + 0.6 * d.y) : Rgb{0.12, 0.1, 0.08};
      for (const auto& s : suns) {
        const double ang = std::acos(std::clamp(dot(d, s.dir), -1.0, 1.0));
        c += s.color * std::exp(-0.5 * (ang / s.width) * (ang / s.width));
      }
      env.at(row, col) = c;
    }
  return env;
}

json check_json(const Diagnostics& d) {
  json checks = json::object();
  for (const auto& c : d.checks)
    checks[c.name] = {{"passed", c.passed}, {"magnitude", c.magnitude}, {"x", c.worst_x}, {"y", c.worst_y}};
  return checks;
}

RgbImage normals_image(const NormalImage& n) {
  RgbImage out(n.width(), n.height());
  for (size_t i = 0; i < n.size(); ++i) out[i] = {n[i].x, n[i].y, n[i].z};
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relighting engine and synthetic light-stage toolkit", "relight"};
  app.require_subcommand(1, 1);

  struct Args {
    std::string scene_kind = "sphere", spec_file, encoding = "pfm", format = "pfm";
    int resolution = 64;
    int env_height = default_env_height;
    double uniform = -1;
    std::vector<int> exponents = default_phong_exponents();
    int conv_height = default_convolved_height;
    int lights = default_rig_lights;
    double energy = default_olat_energy;
    double threshold = default_shadow_threshold;
    std::string render_path, shading_path;
    double eps = default_shading_eps;
    int count = 1, mask_height = 256, mask_width = 256;
    std::string policy_path, pred, ref, mask_path;
    bool linear = false;
  } a;

  std::map<CLI::App*, std::function<void()>> actions;
  const auto command = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

  // Options shared by several subcommands are declared per subcommand so
  // each one's help lists only what it reads.
  std::string bundle_path, env_path, out_path, olat_path;
  uint64_t seed = 0;
  int workers = 0;
  std::vector<double> view_v = {0, 0, 1};
  const auto add_view = [&](CLI::App* c) {
    c->add_option("--view", view_v, "View direction x,y,z")->delimiter(',')->expected(3);
    c->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  };

  // gen-scene
  {
    auto* c = command("gen-scene", "Generate a procedural intrinsic bundle");
    c->add_option("--seed", seed, "Random seed")->required();
    c->add_option("--out", out_path, "Output bundle directory")->required();
    c->add_option("--kind", a.scene_kind, "sphere | heightfield")->check(CLI::IsMember({"sphere", "heightfield"}));
    c->add_option("--resolution", a.resolution, "Pixels per side");
    c->add_option("--spec", a.spec_file, "Scene spec JSON (seed comes from --seed)");
    c->add_option("--encoding", a.encoding, "pfm | png16")->check(CLI::IsMember({"pfm", "png16"}));
    actions[c] = [&, c] {
      SceneSpec spec;
      if (!a.spec_file.empty()) spec = scene_spec_from_json(read_text(a.spec_file));
      if (c->count("--kind") || a.spec_file.empty()) spec.kind = parse_scene_kind(a.scene_kind);
      if (c->count("--resolution") || a.spec_file.empty()) spec.resolution = a.resolution;
      spec.seed = seed;
      const IntrinsicBundle b = generate(spec);
      write_bundle(out_path, b, {parse_map_encoding(a.encoding), spec});
      out << "wrote " << to_string(spec.kind) << " bundle " << spec.resolution << "x"
          << spec.resolution << " to " << out_path << "\n";
    };
  }

  // gen-env
  {
    auto* c = command("gen-env", "Generate a procedural environment map");
    c->add_option("--seed", seed, "Random seed")->required();
    c->add_option("--out", out_path, "Output .pfm or .hdr")->required();
    c->add_option("--height", a.env_height, "Rows (width is twice this)")->check(CLI::PositiveNumber);
    c->add_option("--uniform", a.uniform, "Constant radiance instead of a sky")->check(CLI::NonNegativeNumber);
    actions[c] = [&] {
      const EnvMap env = a.uniform >= 0 ? EnvMap(a.env_height, 2 * a.env_height, gray(a.uniform)) : synth_sky(a.env_height, seed);
      write_env(out_path, env);
      out << "wrote " << env.height() << "x" << env.width() << " environment to " << out_path << "\n";
    };
  }

  // render
  {
    auto* c = command("render", "Diffuse, specular and PBR renders of a bundle");
    c->add_option("--bundle", bundle_path, "Bundle directory or manifest")->required();
    c->add_option("--env", env_path, "Environment map")->required();
    c->add_option("--out", out_path, "Output directory")->required();
    c->add_option("--format", a.format, "pfm | hdr | png")->check(CLI::IsMember({"pfm", "hdr", "png"}));
    add_view(c);
    actions[c] = [&] {
      const RenderOutput r = render_pbr(read_bundle(bundle_path), read_env(env_path), parse_view(view_v), {workers});
      ensure_dir(out_path);
      write_render(fs::path(out_path) / ("diffuse." + a.format), r.diffuse);
      write_render(fs::path(out_path) / ("specular." + a.format), r.specular);
      write_render(fs::path(out_path) / ("pbr." + a.format), r.pbr);
      out << "wrote diffuse, specular, pbr to " << out_path << "\n";
    };
  }

  // relight
  {
    auto* c = command("relight", "Re-render a bundle under a target environment");
    c->add_option("--bundle", bundle_path, "Bundle directory or manifest")->required();
    c->add_option("--env", env_path, "Target environment map")->required();
    c->add_option("--out", out_path, "Output image (.pfm, .hdr or .png)")->required();
    add_view(c);
    actions[c] = [&] {
      const RgbImage img = relight(read_bundle(bundle_path), read_env(env_path), parse_view(view_v), {workers});
      write_render(out_path, img);
      out << "wrote " << out_path << "\n";
    };
  }

  // convolve-hdri
  {
    auto* c = command("convolve-hdri", "Phong-lobe convolutions of an environment map");
    c->add_option("--env", env_path, "Environment map")->required();
    c->add_option("--out", out_path, "Output directory")->required();
    c->add_option("--exponents", a.exponents, "Comma-separated Phong exponents")->delimiter(',');
    c->add_option("--height", a.conv_height, "Output rows (width is twice this)")->check(CLI::PositiveNumber);
    c->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    actions[c] = [&] {
      const ConvolvedEnvMap conv = convolve_phong(read_env(env_path), a.exponents, a.conv_height, 2 * a.conv_height, {4, workers});
      ensure_dir(out_path);
      for (size_t i = 0; i < conv.exponents.size(); ++i) {
        const fs::path p = fs::path(out_path) / ("env_p" + std::to_string(conv.exponents[i]) + ".pfm");
        write_env(p, conv.maps[i]);
        out << "wrote " << p.string() << "\n";
      }
    };
  }

  // olat-render
  {
    auto* c = command("olat-render", "Render a one-light-at-a-time stack");
    c->add_option("--bundle", bundle_path, "Bundle directory or manifest")->required();
    c->add_option("--out", out_path, "Output OLAT directory")->required();
    c->add_option("--lights", a.lights, "Rig size")->check(CLI::Range(3, 100000));
    c->add_option("--seed", seed, "Rig rotation seed (0 = canonical layout)");
    c->add_option("--energy", a.energy, "Energy per light")->check(CLI::PositiveNumber);
    add_view(c);
    actions[c] = [&] {
      const OlatStack stack = render_olat(read_bundle(bundle_path), make_rig(a.lights, seed), parse_view(view_v),
                                          {}, a.energy, {workers});
      write_olat(out_path, stack);
      out << "wrote " << stack.rig.count() << " OLAT images to " << out_path << "\n";
    };
  }

  // olat-composite
  {
    auto* c = command("olat-composite", "Relight an OLAT stack with an environment map");
    c->add_option("--olat", olat_path, "OLAT directory")->required();
    c->add_option("--env", env_path, "Environment map")->required();
    c->add_option("--out", out_path, "Output image")->required();
    actions[c] = [&] {
      const OlatStack stack = read_olat(olat_path);
      write_render(out_path, composite(stack, project_env_to_rig(read_env(env_path), stack.rig)));
      out << "wrote " << out_path << "\n";
    };
  }

  // photometric-stereo
  {
    auto* c = command("photometric-stereo", "Recover normals and albedo from an OLAT stack");
    c->add_option("--olat", olat_path, "OLAT directory")->required();
    c->add_option("--out", out_path, "Output directory")->required();
    c->add_option("--threshold", a.threshold, "Shadow threshold on luminance")->check(CLI::NonNegativeNumber);
    c->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    actions[c] = [&] {
      const auto r = photometric_stereo(read_olat(olat_path), a.threshold, workers);
      ensure_dir(out_path);
      write_rgb(fs::path(out_path) / "normal.pfm", normals_image(r.normal));
      write_rgb(fs::path(out_path) / "albedo.pfm", r.albedo);
      write_mask(fs::path(out_path) / "valid.png", r.valid);
      write_scalar(fs::path(out_path) / "residual.pfm", r.residual);
      out << json({{"invalid_pixels", r.invalid_count}}).dump() << "\n";
    };
  }

  // recover-albedo
  {
    auto* c = command("recover-albedo", "Albedo from a diffuse render divided by shading");
    c->add_option("--render", a.render_path, "Diffuse render")->required();
    c->add_option("--shading", a.shading_path, "Shading image; otherwise computed from --env and --bundle normals");
    c->add_option("--env", env_path, "Environment map");
    c->add_option("--bundle", bundle_path, "Bundle providing normals");
    c->add_option("--out", out_path, "Output albedo image")->required();
    c->add_option("--eps", a.eps, "Shading floor")->check(CLI::PositiveNumber);
    actions[c] = [&] {
      RgbImage shading;
      if (!a.shading_path.empty()) {
        shading = read_rgb(a.shading_path);
      } else {
        if (env_path.empty() || bundle_path.empty())
          throw usage_error("recover-albedo needs --shading, or both --env and --bundle");
        shading = diffuse_shading(convolve_phong(read_env(env_path), {1}), read_bundle(bundle_path).normal);
      }
      const auto r = recover_albedo(read_rgb(a.render_path), shading, a.eps);
      write_rgb(out_path, r.albedo);
      out << json({{"flagged_pixels", r.flagged_count}}).dump() << "\n";
    };
  }

  // gen-masks
  {
    auto* c = command("gen-masks", "Sample training masks");
    c->add_option("--count", a.count, "Number of masks")->check(CLI::PositiveNumber);
    c->add_option("--seed", seed, "Seed of the first mask; mask i uses seed + i")->required();
    c->add_option("--out", out_path, "Output directory")->required();
    c->add_option("--height", a.mask_height, "Mask rows")->check(CLI::PositiveNumber);
    c->add_option("--width", a.mask_width, "Mask columns")->check(CLI::PositiveNumber);
    c->add_option("--policy", a.policy_path, "Mask policy JSON");
    actions[c] = [&] {
      const MaskPolicy policy = a.policy_path.empty() ? MaskPolicy{} : mask_policy_from_json(read_text(a.policy_path));
      validate(policy);
      ensure_dir(out_path);
      write_text(fs::path(out_path) / "policy.json", mask_policy_to_json(policy) + "\n");
      json index = json::array();
      for (int i = 0; i < a.count; ++i) {
        const Mask m = sample_mask(policy, a.mask_height, a.mask_width, seed + static_cast<uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%04d.png", i);
        write_mask(fs::path(out_path) / name, m.bits());
        index.push_back({{"file", name}, {"kind", to_string(m.kind())}, {"seed", m.seed()},
                         {"ratio", m.measured_ratio()}});
      }
      write_text(fs::path(out_path) / "masks.json", index.dump(2) + "\n");
      out << "wrote " << a.count << " masks to " << out_path << "\n";
    };
  }

  // eval
  {
    auto* c = command("eval", "MAE, MSE and SSIM between two images");
    c->add_option("--pred", a.pred, "Predicted image")->required();
    c->add_option("--ref", a.ref, "Reference image")->required();
    c->add_option("--mask", a.mask_path, "Restrict MAE to pixels where this mask is 1");
    c->add_flag("--linear", a.linear, "Compare linear values instead of log(1+x)");
    actions[c] = [&] {
      RgbImage x = read_rgb(a.pred), y = read_rgb(a.ref);
      require_same_shape(x, y, "eval");
      if (!a.linear) {
        x = log_encode(x);
        y = log_encode(y);
      }
      std::optional<Mask> mask;
      if (!a.mask_path.empty()) mask = Mask(read_mask(a.mask_path), MaskKind::patch, 0);
      json r = {{"space", a.linear ? "linear" : "log1p"},
                {"mae", l1(x, y, mask)},
                {"mse", mse(x, y)},
                {"ssim", ssim(x, y)},
                {"lpips", nullptr}};
      out << r.dump() << "\n";
    };
  }

  // validate
  {
    auto* c = command("validate", "Check a bundle's maps");
    c->add_option("--bundle", bundle_path, "Bundle directory or manifest")->required();
    actions[c] = [&] {
      const Diagnostics d = validate_bundle(read_bundle(bundle_path));
      out << json({{"ok", d.ok()}, {"checks", check_json(d)}}).dump(2) << "\n";
      if (!d.ok()) throw std::invalid_argument("bundle failed validation");
    };
  }

  // export-viewer
  {
    auto* c = command("export-viewer", "Export a bundle, its environment and a reference render for the viewer");
    c->add_option("--bundle", bundle_path, "Bundle directory or manifest")->required();
    c->add_option("--env", env_path, "Environment map")->required();
    c->add_option("--out", out_path, "Output directory")->required();
    c->add_option("--encoding", a.encoding, "pfm | png16")->check(CLI::IsMember({"pfm", "png16"}));
    actions[c] = [&] {
      const LoadedBundle b = load_bundle(bundle_path);
      export_viewer_bundle(b.bundle, read_env(env_path), out_path, {parse_map_encoding(a.encoding), b.scene});
      out << "exported viewer bundle to " << out_path << "\n";
    };
  }

  if (argc >= 2 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return exit_usage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return exit_usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    actions.at(sub)();
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return exit_usage;
  } catch (const io_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_ok;
}

}  // namespace relight::cli

#include "relight/bundle.h"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <fstream>

#include "relight/io.h"

namespace relight {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* bundle_format_tag = "relight-bundle";
constexpr const char* olat_format_tag = "relight-olat";
constexpr const char* olat_manifest_name = "olat.json";

// JSON errors become io_error so callers see one taxonomy.
json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(io_errc::corrupt, what + ": " + e.what());
  }
}

json load_json(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse_json(std::string(bytes.begin(), bytes.end()), path.string());
}

void save_json(const fs::path& path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  write_file(path, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw io_error(io_errc::bad_header, where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw io_error(io_errc::bad_header, where + ": bad value for '" + key + "'");
  }
}

// Referenced files must stay inside the bundle directory.
fs::path resolve(const fs::path& dir, const std::string& name) {
  const fs::path rel(name);
  if (name.empty() || rel.is_absolute() || rel.has_root_name())
    throw io_error(io_errc::bad_header, "file reference '" + name + "' is not relative");
  for (const auto& part : rel)
    if (part == "..") throw io_error(io_errc::bad_header, "file reference '" + name + "' escapes the bundle");
  return dir / rel;
}

void check_size(int w, int h, int ew, int eh, const std::string& what) {
  if (w != ew || h != eh)
    throw io_error(io_errc::corrupt, what + " is " + std::to_string(w) + "x" + std::to_string(h) +
                                         ", manifest says " + std::to_string(ew) + "x" +
                                         std::to_string(eh));
}

json rgb_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw io_error(io_errc::bad_header, where + ": expected [r, g, b]");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    throw io_error(io_errc::bad_header, where + ": expected numbers");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!obj.is_object()) throw io_error(io_errc::bad_header, where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw io_error(io_errc::bad_header, where + ": unknown key '" + k + "'");
  }
}

// ---------------------------------------------------------------------------
// Map encodings

RgbImage normals_as_rgb(const NormalImage& n) {
  RgbImage out(n.width(), n.height());
  for (size_t i = 0; i < n.size(); ++i) out[i] = {n[i].x, n[i].y, n[i].z};
  return out;
}

NormalImage rgb_as_normals(const RgbImage& img) {
  NormalImage out(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i) out[i] = {img[i].r, img[i].g, img[i].b};
  return out;
}

Png16 encode_normal_png(const NormalImage& n) { return quantize_png16(encode_normals(n)); }
NormalImage decode_normal_png(const Png16& p) { return decode_normals(dequantize_rgb(p)); }

double to_float(double v) { return static_cast<float>(v); }

// 16-bit code of one unit normal, and its decoded (renormalized) vector.
using NormalCode = std::array<long, 3>;

NormalCode normal_code(const vec3& n) {
  const auto code = [](double v) { return std::lround(std::clamp((v + 1) / 2, 0.0, 1.0) * 65535.0); };
  return {code(n.x), code(n.y), code(n.z)};
}

vec3 decode_code(const NormalCode& c) {
  const vec3 e = {2 * (c[0] / 65535.0) - 1, 2 * (c[1] / 65535.0) - 1, 2 * (c[2] / 65535.0) - 1};
  const double len = length(e);
  return len > 1e-3 ? e / len : vec3{};
}

// Renormalizing on decode moves a vector by up to a code step, so the
// nearest code need not reproduce itself. Pick the self-reproducing code
// closest in angle among the nearest code and its neighbours.
vec3 snap_normal(const vec3& n) {
  if (n == vec3{}) return n;
  const NormalCode c0 = normal_code(n);
  vec3 best = decode_code(c0);
  if (normal_code(best) == c0) return best;
  double best_dot = -2;
  for (int radius = 1; radius <= 3 && best_dot < -1; ++radius)
    for (long dx = -radius; dx <= radius; ++dx)
      for (long dy = -radius; dy <= radius; ++dy)
        for (long dz = -radius; dz <= radius; ++dz) {
          const NormalCode c = {c0[0] + dx, c0[1] + dy, c0[2] + dz};
          if (std::min({c[0], c[1], c[2]}) < 0 || std::max({c[0], c[1], c[2]}) > 65535) continue;
          const vec3 d = decode_code(c);
          if (normal_code(d) != c) continue;
          if (dot(d, n) > best_dot) best_dot = dot(d, n), best = d;
        }
  return best;
}

NormalImage snap_normals(const NormalImage& normals) {
  NormalImage out = normals;
  for (auto& n : out.pixels()) n = snap_normal(n);
  return out;
}

json field_json(const Field<Rgb>& f) {
  return {{"kind", to_string(f.kind)}, {"a", rgb_json(f.a)}, {"b", rgb_json(f.b)}, {"cells", f.cells}};
}

json field_json(const Field<double>& f) {
  return {{"kind", to_string(f.kind)}, {"a", f.a}, {"b", f.b}, {"cells", f.cells}};
}

template <typename T>
Field<T> field_from(const json& j, Field<T> f, const std::string& where) {
  reject_unknown(j, {"kind", "a", "b", "cells"}, where);
  try {
    if (j.contains("kind")) f.kind = parse_field_kind(get<std::string>(j, "kind", where));
  } catch (const std::invalid_argument& e) {
    throw io_error(io_errc::bad_header, where + ": " + e.what());
  }
  if (j.contains("cells")) f.cells = get<int>(j, "cells", where);
  if constexpr (std::is_same_v<T, Rgb>) {
    if (j.contains("a")) f.a = rgb_from(j["a"], where + ".a");
    if (j.contains("b")) f.b = rgb_from(j["b"], where + ".b");
    else if (j.contains("a")) f.b = f.a;
  } else {
    if (j.contains("a")) f.a = get<double>(j, "a", where);
    if (j.contains("b")) f.b = get<double>(j, "b", where);
    else if (j.contains("a")) f.b = f.a;
  }
  return f;
}

json scene_json(const SceneSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"resolution", s.resolution},
          {"seed", s.seed},
          {"albedo", field_json(s.albedo)},
          {"roughness", field_json(s.roughness)},
          {"f0", field_json(s.f0)},
          {"height_amplitude", s.height_amplitude},
          {"height_cells", s.height_cells}};
}

SceneSpec scene_from(const json& j) {
  const std::string where = "scene";
  reject_unknown(j, {"kind", "resolution", "seed", "albedo", "roughness", "f0",
                     "height_amplitude", "height_cells"},
                 where);
  SceneSpec s;
  try {
    if (j.contains("kind")) s.kind = parse_scene_kind(get<std::string>(j, "kind", where));
  } catch (const std::invalid_argument& e) {
    throw io_error(io_errc::bad_header, where + ": " + e.what());
  }
  if (j.contains("resolution")) s.resolution = get<int>(j, "resolution", where);
  if (j.contains("seed")) s.seed = get<uint64_t>(j, "seed", where);
  if (j.contains("albedo")) s.albedo = field_from(j["albedo"], s.albedo, "scene.albedo");
  if (j.contains("roughness")) s.roughness = field_from(j["roughness"], s.roughness, "scene.roughness");
  if (j.contains("f0")) s.f0 = field_from(j["f0"], s.f0, "scene.f0");
  if (j.contains("height_amplitude")) s.height_amplitude = get<double>(j, "height_amplitude", where);
  if (j.contains("height_cells")) s.height_cells = get<int>(j, "height_cells", where);
  return s;
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw io_error(io_errc::bad_header, where + ": expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json write_maps(const fs::path& dir, const IntrinsicBundle& b, MapEncoding e) {
  json maps;
  const auto put = [&](const char* key, const std::string& file, const char* encoding) {
    maps[key] = {{"file", file}, {"encoding", encoding}};
  };
  if (e == MapEncoding::pfm) {
    write_file(dir / "normal.pfm", encode_pfm(to_float_image(normals_as_rgb(b.normal))));
    put("normal", "normal.pfm", "pfm-xyz");
    write_rgb(dir / "albedo.pfm", b.albedo);
    put("albedo", "albedo.pfm", "pfm-linear");
    write_scalar(dir / "roughness.pfm", b.roughness);
    put("roughness", "roughness.pfm", "pfm-linear");
    write_scalar(dir / "f0.pfm", b.f0);
    put("f0", "f0.pfm", "pfm-linear");
  } else {
    write_file(dir / "normal.png", encode_png16(encode_normal_png(b.normal)));
    put("normal", "normal.png", "png16-unit");
    write_rgb(dir / "albedo.png", b.albedo);
    put("albedo", "albedo.png", "png16");
    write_scalar(dir / "roughness.png", b.roughness);
    put("roughness", "roughness.png", "png16");
    write_scalar(dir / "f0.png", b.f0);
    put("f0", "f0.png", "png16");
  }
  write_mask(dir / "mask.png", b.mask);
  put("mask", "mask.png", "png1");
  return maps;
}

json bundle_manifest(const fs::path& dir, const IntrinsicBundle& q, const BundleWriteOptions& opts) {
  json m;
  m["format"] = bundle_format_tag;
  m["version"] = bundle_manifest_version;
  m["width"] = q.width();
  m["height"] = q.height();
  m["encoding"] = to_string(opts.encoding);
  m["env_convention"] = env_convention_tag;
  m["maps"] = write_maps(dir, q, opts.encoding);
  if (opts.scene) m["scene"] = scene_json(*opts.scene);
  return m;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io_error(io_errc::write_failed, "cannot create " + dir.string());
}

}  // namespace

const char* to_string(MapEncoding e) { return e == MapEncoding::pfm ? "pfm" : "png16"; }

MapEncoding parse_map_encoding(const std::string& s) {
  if (s == "pfm") return MapEncoding::pfm;
  if (s == "png16") return MapEncoding::png16;
  throw std::invalid_argument("unknown map encoding '" + s + "'");
}

IntrinsicBundle quantize_bundle(const IntrinsicBundle& b, MapEncoding e) {
  b.check_shape();
  IntrinsicBundle q = b;
  for (auto& m : q.mask.pixels()) m = m ? 1 : 0;
  if (e == MapEncoding::pfm) {
    for (auto& n : q.normal.pixels()) n = {to_float(n.x), to_float(n.y), to_float(n.z)};
    for (auto& a : q.albedo.pixels()) a = {to_float(a.r), to_float(a.g), to_float(a.b)};
    for (auto& r : q.roughness.pixels()) r = to_float(r);
    for (auto& f : q.f0.pixels()) f = to_float(f);
    return q;
  }
  q.albedo = dequantize_rgb(quantize_png16(b.albedo));
  q.roughness = dequantize_scalar(quantize_png16(b.roughness));
  q.f0 = dequantize_scalar(quantize_png16(b.f0));
  q.normal = snap_normals(b.normal);
  return q;
}

void write_bundle(const fs::path& dir, const IntrinsicBundle& bundle, const BundleWriteOptions& opts) {
  const IntrinsicBundle q = quantize_bundle(bundle, opts.encoding);
  prepare_dir(dir);
  save_json(dir / bundle_manifest_name, bundle_manifest(dir, q, opts));
}

LoadedBundle load_bundle(const fs::path& dir_or_manifest) {
  const bool is_dir = fs::is_directory(dir_or_manifest);
  const fs::path manifest = is_dir ? dir_or_manifest / bundle_manifest_name : dir_or_manifest;
  const fs::path dir = is_dir ? dir_or_manifest : dir_or_manifest.parent_path();
  const json m = load_json(manifest);
  const std::string where = manifest.string();
  if (get<std::string>(m, "format", where) != bundle_format_tag)
    throw io_error(io_errc::bad_magic, where + ": not a bundle manifest");
  const int version = get<int>(m, "version", where);
  if (version != bundle_manifest_version)
    throw io_error(io_errc::unsupported, where + ": manifest version " + std::to_string(version));
  const std::string convention = get<std::string>(m, "env_convention", where);
  if (convention != env_convention_tag)
    throw io_error(io_errc::unsupported, where + ": env convention '" + convention + "'");
  const int w = get<int>(m, "width", where);
  const int h = get<int>(m, "height", where);

  LoadedBundle out;
  try {
    out.encoding = parse_map_encoding(get<std::string>(m, "encoding", where));
  } catch (const std::invalid_argument& e) {
    throw io_error(io_errc::unsupported, where + ": " + e.what());
  }
  const json& maps = m.contains("maps") ? m["maps"] : json();
  const auto map_path = [&](const char* key, const char* expected) {
    const std::string sub = where + ".maps." + key;
    if (!maps.is_object() || !maps.contains(key)) throw io_error(io_errc::bad_header, sub + ": missing");
    const std::string enc = get<std::string>(maps[key], "encoding", sub);
    if (enc != expected) throw io_error(io_errc::unsupported, sub + ": encoding '" + enc + "'");
    return resolve(dir, get<std::string>(maps[key], "file", sub));
  };

  IntrinsicBundle& b = out.bundle;
  if (out.encoding == MapEncoding::pfm) {
    b.normal = rgb_as_normals(to_rgb_image(decode_pfm(read_file(map_path("normal", "pfm-xyz")))));
    b.albedo = to_rgb_image(decode_pfm(read_file(map_path("albedo", "pfm-linear"))));
    b.roughness = to_scalar_image(decode_pfm(read_file(map_path("roughness", "pfm-linear"))));
    b.f0 = to_scalar_image(decode_pfm(read_file(map_path("f0", "pfm-linear"))));
  } else {
    b.normal = decode_normal_png(decode_png(read_file(map_path("normal", "png16-unit"))));
    b.albedo = dequantize_rgb(decode_png(read_file(map_path("albedo", "png16"))));
    b.roughness = dequantize_scalar(decode_png(read_file(map_path("roughness", "png16"))));
    b.f0 = dequantize_scalar(decode_png(read_file(map_path("f0", "png16"))));
  }
  b.mask = read_mask(map_path("mask", "png1"));
  check_size(b.normal.width(), b.normal.height(), w, h, "normal map");
  check_size(b.albedo.width(), b.albedo.height(), w, h, "albedo map");
  check_size(b.roughness.width(), b.roughness.height(), w, h, "roughness map");
  check_size(b.f0.width(), b.f0.height(), w, h, "f0 map");
  check_size(b.mask.width(), b.mask.height(), w, h, "mask");
  if (m.contains("scene")) out.scene = scene_from(m["scene"]);
  return out;
}

IntrinsicBundle read_bundle(const fs::path& dir_or_manifest) {
  return load_bundle(dir_or_manifest).bundle;
}

RgbImage export_viewer_bundle(const IntrinsicBundle& bundle, const EnvMap& env, const fs::path& dir,
                              const BundleWriteOptions& opts) {
  bundle.check_shape();
  if (env.height() <= 0) throw std::invalid_argument("export_viewer_bundle: empty environment");
  const int factor = std::max(1, env.height() / viewer_specular_env_height);
  if (env.height() / factor != std::min(env.height(), viewer_specular_env_height) ||
      env.height() % factor != 0)
    throw std::invalid_argument("export_viewer_bundle: env height " + std::to_string(env.height()) +
                                " does not box-filter to " +
                                std::to_string(viewer_specular_env_height) + " rows");
  prepare_dir(dir);
  const IntrinsicBundle q = quantize_bundle(bundle, opts.encoding);
  json m = bundle_manifest(dir, q, opts);

  write_env(dir / "env.pfm", env);
  m["env"] = {{"file", "env.pfm"}, {"height", env.height()}, {"width", env.width()}};

  const ConvolvedEnvMap conv = convolve_phong(env);
  json conv_list = json::array();
  for (size_t i = 0; i < conv.exponents.size(); ++i) {
    const std::string file = "env_p" + std::to_string(conv.exponents[i]) + ".pfm";
    write_env(dir / file, conv.maps[i]);
    conv_list.push_back({{"exponent", conv.exponents[i]},
                         {"file", file},
                         {"height", conv.maps[i].height()},
                         {"width", conv.maps[i].width()}});
  }
  m["convolved"] = conv_list;

  const EnvMap spec_env = downsample_env(env, factor);
  write_env(dir / "env_specular.pfm", spec_env);
  m["specular_env"] = {{"file", "env_specular.pfm"},
                       {"height", spec_env.height()},
                       {"width", spec_env.width()}};

  const RgbImage reference = render_pbr(q, env, default_view).pbr;
  write_rgb(dir / "reference.pfm", reference);
  write_rgb(dir / "reference.png", tonemap_log(reference));
  const vec3& v = default_view;
  m["view"] = json::array({v.x, v.y, v.z});
  m["reference"] = {{"linear", "reference.pfm"}, {"display", "reference.png"}, {"tonemap", "log1p-clamp"}};

  save_json(dir / bundle_manifest_name, m);
  return reference;
}

std::string scene_spec_to_json(const SceneSpec& spec) { return scene_json(spec).dump(2); }

SceneSpec scene_spec_from_json(const std::string& text) { return scene_from(parse_json(text, "scene spec")); }

std::string mask_policy_to_json(const MaskPolicy& p) {
  const auto& s = p.strokes;
  json j = {{"kind_weights", {{"patch", p.kind_weights[0]},
                              {"outpaint", p.kind_weights[1]},
                              {"freeform", p.kind_weights[2]}}},
            {"patch_size", range_json(p.patch_size)},
            {"patch_ratio", range_json(p.patch_ratio)},
            {"outpaint_margin", range_json(p.outpaint_margin)},
            {"strokes", {{"count", json::array({s.min_strokes, s.max_strokes})},
                         {"width", range_json(s.width)},
                         {"vertices", json::array({s.min_vertices, s.max_vertices})},
                         {"segment_length", range_json(s.segment_length)},
                         {"max_turn", s.max_turn}}}};
  return j.dump(2);
}

MaskPolicy mask_policy_from_json(const std::string& text) {
  const json j = parse_json(text, "mask policy");
  const std::string where = "mask policy";
  reject_unknown(j, {"kind_weights", "patch_size", "patch_ratio", "outpaint_margin", "strokes"}, where);
  MaskPolicy p;
  if (j.contains("kind_weights")) {
    const json& w = j["kind_weights"];
    reject_unknown(w, {"patch", "outpaint", "freeform"}, where + ".kind_weights");
    const char* names[] = {"patch", "outpaint", "freeform"};
    for (int i = 0; i < 3; ++i)
      if (w.contains(names[i])) p.kind_weights[i] = get<double>(w, names[i], where + ".kind_weights");
  }
  if (j.contains("patch_size")) p.patch_size = range_from(j["patch_size"], where + ".patch_size");
  if (j.contains("patch_ratio")) p.patch_ratio = range_from(j["patch_ratio"], where + ".patch_ratio");
  if (j.contains("outpaint_margin"))
    p.outpaint_margin = range_from(j["outpaint_margin"], where + ".outpaint_margin");
  if (j.contains("strokes")) {
    const json& s = j["strokes"];
    const std::string sw = where + ".strokes";
    reject_unknown(s, {"count", "width", "vertices", "segment_length", "max_turn"}, sw);
    const auto int_pair = [&](const char* key, int& lo, int& hi) {
      if (!s.contains(key)) return;
      const Range r = range_from(s[key], sw + "." + key);
      lo = static_cast<int>(r.lo);
      hi = static_cast<int>(r.hi);
      if (lo != r.lo || hi != r.hi) throw io_error(io_errc::bad_header, sw + "." + key + ": expected integers");
    };
    int_pair("count", p.strokes.min_strokes, p.strokes.max_strokes);
    int_pair("vertices", p.strokes.min_vertices, p.strokes.max_vertices);
    if (s.contains("width")) p.strokes.width = range_from(s["width"], sw + ".width");
    if (s.contains("segment_length"))
      p.strokes.segment_length = range_from(s["segment_length"], sw + ".segment_length");
    if (s.contains("max_turn")) p.strokes.max_turn = get<double>(s, "max_turn", sw);
  }
  return p;
}

void write_olat(const fs::path& dir, const OlatStack& stack) {
  stack.check();
  prepare_dir(dir);
  json lights = json::array();
  for (int i = 0; i < stack.rig.count(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "light_%03d.pfm", i);
    write_rgb(dir / name, stack.images[i]);
    const Direction& d = stack.rig.directions[i];
    lights.push_back({{"file", name}, {"direction", json::array({d.x(), d.y(), d.z()})}});
  }
  const json m = {{"format", olat_format_tag},
                  {"version", bundle_manifest_version},
                  {"width", stack.width()},
                  {"height", stack.height()},
                  {"light_energy", stack.light_energy},
                  {"env_convention", env_convention_tag},
                  {"lights", lights}};
  save_json(dir / olat_manifest_name, m);
}

OlatStack read_olat(const fs::path& dir) {
  const fs::path manifest = dir / olat_manifest_name;
  const json m = load_json(manifest);
  const std::string where = manifest.string();
  if (get<std::string>(m, "format", where) != olat_format_tag)
    throw io_error(io_errc::bad_magic, where + ": not an OLAT manifest");
  if (get<int>(m, "version", where) != bundle_manifest_version)
    throw io_error(io_errc::unsupported, where + ": unknown version");
  if (get<std::string>(m, "env_convention", where) != env_convention_tag)
    throw io_error(io_errc::unsupported, where + ": unknown env convention");
  const int w = get<int>(m, "width", where);
  const int h = get<int>(m, "height", where);
  OlatStack stack;
  stack.light_energy = get<double>(m, "light_energy", where);
  if (!(stack.light_energy > 0) || !std::isfinite(stack.light_energy))
    throw io_error(io_errc::bad_header, where + ": light_energy must be positive");
  if (!m.contains("lights") || !m["lights"].is_array())
    throw io_error(io_errc::bad_header, where + ": missing lights");
  for (const auto& light : m["lights"]) {
    const vec3 v = [&] {
      const Rgb c = rgb_from(light.contains("direction") ? light["direction"] : json(), where + ".direction");
      return vec3{c.r, c.g, c.b};
    }();
    if (!(std::fabs(length(v) - 1) <= 1e-9))
      throw io_error(io_errc::bad_header, where + ": light direction is not unit length");
    stack.rig.directions.push_back(Direction::from_unit(v));
    RgbImage img = read_rgb(resolve(dir, get<std::string>(light, "file", where)));
    check_size(img.width(), img.height(), w, h, "OLAT image");
    stack.images.push_back(std::move(img));
  }
  if (stack.rig.count() < 3) throw io_error(io_errc::bad_header, where + ": fewer than 3 lights");
  return stack;
}

}  // namespace relight

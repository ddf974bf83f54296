// On-disk intrinsic bundles, the viewer export, and JSON documents for
// scene specs, mask policies and OLAT stacks. Layouts are described in
// docs/formats.md.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "relight/envmap.h"
#include "relight/lightstage.h"
#include "relight/masks.h"
#include "relight/render.h"
#include "relight/scene.h"

namespace relight {

inline constexpr int bundle_manifest_version = 1;
inline constexpr const char* bundle_manifest_name = "bundle.json";
// Largest environment the viewer's specular sum reads.
inline constexpr int viewer_specular_env_height = 16;

enum class MapEncoding { pfm, png16 };
const char* to_string(MapEncoding e);
MapEncoding parse_map_encoding(const std::string& s);

// Rounds every map to what `encoding` stores, so that writing and reading
// the result returns it unchanged. Normals under png16 are snapped to a
// code whose decoded unit vector re-encodes to the same code.
IntrinsicBundle quantize_bundle(const IntrinsicBundle& bundle, MapEncoding encoding);

struct BundleWriteOptions {
  MapEncoding encoding = MapEncoding::pfm;
  std::optional<SceneSpec> scene;
};

// Writes the maps and bundle.json into `dir` (created if missing).
void write_bundle(const std::filesystem::path& dir, const IntrinsicBundle& bundle,
                  const BundleWriteOptions& opts = {});

struct LoadedBundle {
  IntrinsicBundle bundle;
  MapEncoding encoding = MapEncoding::pfm;
  std::optional<SceneSpec> scene;
};

// Accepts the bundle directory or its manifest path. Throws io_error for an
// unknown version, convention tag, missing file or size mismatch.
LoadedBundle load_bundle(const std::filesystem::path& dir_or_manifest);
IntrinsicBundle read_bundle(const std::filesystem::path& dir_or_manifest);

// Bundle plus everything the viewer needs: the source env, its Phong
// convolutions, a downsampled env for the specular sum, and a reference
// PBR render (linear PFM and log-tonemapped PNG) of the quantized bundle.
// Returns the reference render.
RgbImage export_viewer_bundle(const IntrinsicBundle& bundle, const EnvMap& env,
                              const std::filesystem::path& dir,
                              const BundleWriteOptions& opts = {});

std::string scene_spec_to_json(const SceneSpec& spec);
// Missing keys keep their defaults; unknown keys are rejected.
SceneSpec scene_spec_from_json(const std::string& text);

std::string mask_policy_to_json(const MaskPolicy& policy);
MaskPolicy mask_policy_from_json(const std::string& text);

// olat.json plus light_###.pfm, one per rig light.
void write_olat(const std::filesystem::path& dir, const OlatStack& stack);
OlatStack read_olat(const std::filesystem::path& dir);

}  // namespace relight

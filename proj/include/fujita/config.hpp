#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fujita/evolution.hpp"

namespace fujita::config {

/// Flat `key = value` document; `#` starts a comment. Keys keep their
/// sorted order so serialization is canonical.
struct Document {
  std::map<std::string, std::string> entries;

  static Document parse(std::string_view text);
  static Document load_file(const std::string& path);
  std::string serialize() const;
  bool operator==(const Document&) const = default;
};

struct KernelSettings {
  double dt = 1e-3;
  double t0 = 0.25;
  double t1 = 4.0;
  int per_octave = 4;
  double pole = 0.0;  // first coordinate of the pole, other coordinates 0
};

struct PicardSettings {
  int iterations = 8;
  int slices = 64;
  double tau = 0.0;  // 0 selects the local window
};

struct ExperimentConfig {
  evolution::RunConfig run;
  std::uint64_t seed = 1;
  std::string output_dir = "fujita_out";
  std::vector<double> sweep_p;
  std::vector<double> sweep_alpha;
  KernelSettings kernel;
  PicardSettings picard;
};

/// Every key is range-checked; unknown keys, missing required keys
/// (weight.kind, weight.exponent, dim) and malformed values raise ConfigError
/// naming the key.
ExperimentConfig from_document(const Document& doc);
Document to_document(const ExperimentConfig& cfg);

/// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const Document& doc);

std::vector<std::string_view> known_keys();

}  // namespace fujita::config

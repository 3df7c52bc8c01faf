#pragma once

// File-backed run configuration (JSON) with strict key checking.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catsim/dynamics.hpp"
#include "catsim/protocol.hpp"
#include "catsim/spectra.hpp"

namespace catsim {

/// Configuration problem; what() names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct SpectrumSettings {
  double linewidth_hz{2.0};
  FrequencyGrid grid{};
  double threshold{0.01};
  double thermal_epsilon{1e-2};
};

struct OutputSettings {
  std::filesystem::path directory{"out"};
  std::vector<std::string> formats{"csv", "json"};

  bool wants(std::string_view fmt) const;
};

struct RunConfig {
  SpinSystem sys = SpinSystem::benzene_13c();
  NoiseModel noise = NoiseModel::none(7);
  NoiseMode noise_mode{NoiseMode::analytic};
  bool include_flip_relaxation{false};
  CatWeights weights = CatWeights::balanced();
  double purity_fraction{1.0};
  std::vector<double> delays{0.0, 0.1, 0.2};
  std::uint64_t seed{1};

  std::vector<double> nq_scan_delays;
  std::vector<double> diagonal_scan_delays;
  std::vector<double> scaling_delays;
  std::optional<double> scaling_dephasing_rate;

  SpectrumSettings spectrum;
  OutputSettings output;

  std::uint64_t config_hash{};

  ProtocolConfig protocol(double delay) const;
};

RunConfig parse_config(std::string_view json_text);
/// Reads and parses; unreadable files raise ConfigError with path "<file>".
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the raw config text, as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

}  // namespace catsim

#pragma once

// Subcommand bodies behind the catsim executable. Each returns a process
// exit code and writes its files only after all computation succeeded.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace catsim::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kInvariantViolation = 2,
  kAnalysisFailure = 3,
};

struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;  // overrides output.directory
  std::optional<std::uint64_t> seed;         // overrides protocol.seed
  std::optional<std::string> format;         // "csv" or "json"; default: config formats
};

enum class DecayKind { nq, diagonal };

struct SpectrumOptions {
  std::string state{"up-u"};
  std::optional<std::filesystem::path> state_file;
  bool decouple{false};
};

int cmd_run_protocol(const CommonOptions& opt, std::ostream& out, std::ostream& err);
int cmd_decay_scan(const CommonOptions& opt, DecayKind which, std::ostream& out, std::ostream& err);
int cmd_spectrum(const CommonOptions& opt, const SpectrumOptions& sopt, std::ostream& out, std::ostream& err);
int cmd_scaling(const CommonOptions& opt, std::size_t n_min, std::size_t n_max, std::ostream& out,
                std::ostream& err);

/// Exit code a subcommand reports for an escaped exception.
int exit_code_for(const std::exception& e) noexcept;

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace catsim::cli

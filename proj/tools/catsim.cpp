// catsim command-line front end.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "catsim/commands.hpp"
#include "catsim/kernels.hpp"

namespace {

void add_common(CLI::App* sub, catsim::cli::CommonOptions& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required();
  sub->add_option("--out", o.out, "output directory (overrides output.directory)");
  sub->add_option("--seed", o.seed, "RNG seed (overrides protocol.seed)");
  sub->add_option("--format", o.format, "write only this format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace catsim::cli;
  CLI::App app{"catsim: density-matrix simulator for the cat-state resurrection experiment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "catsim 0.1.0");

  CommonOptions run_opt, decay_opt, spec_opt, scale_opt;

  auto* run = app.add_subcommand("run-protocol", "run steps A-E for every configured delay");
  add_common(run, run_opt);

  auto* decay = app.add_subcommand("decay-scan", "scan the delay and fit an exponential lifetime");
  add_common(decay, decay_opt);
  DecayKind which = DecayKind::nq;
  decay->add_option("--which", which, "nq or diagonal")
      ->transform(CLI::CheckedTransformer(std::map<std::string, DecayKind>{{"nq", DecayKind::nq},
                                                                            {"diagonal", DecayKind::diagonal}}));

  auto* spec = app.add_subcommand("spectrum", "linear-response spectrum of the proton spins");
  add_common(spec, spec_opt);
  SpectrumOptions sopt;
  auto* state_opt = spec->add_option("--state", sopt.state,
                                     "up-u, up-d, down-u, down-d, cat, entangled, mixture, thermal, resurrected");
  spec->add_option("--state-file", sopt.state_file, "JSON density matrix {\"real\": [[...]], \"imag\": [[...]]}")
      ->check(CLI::ExistingFile)
      ->excludes(state_opt);
  spec->add_flag("--decouple", sopt.decouple, "drop couplings to the control spin during detection");

  auto* scale = app.add_subcommand("scaling", "NQ decay rate versus cluster size");
  add_common(scale, scale_opt);
  std::size_t n_min = 2, n_max = 7;
  scale->add_option("--n-min", n_min, "smallest N");
  scale->add_option("--n-max", n_max, "largest N (at most 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run_protocol(run_opt, std::cout, std::cerr);
  if (*decay) return cmd_decay_scan(decay_opt, which, std::cout, std::cerr);
  if (*spec) return cmd_spectrum(spec_opt, sopt, std::cout, std::cerr);
  if (*scale) return cmd_scaling(scale_opt, n_min, n_max, std::cout, std::cerr);
  return kConfigError;
}

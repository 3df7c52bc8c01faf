#include "catsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace catsim {

namespace {

using json = nlohmann::json;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(join(path, it.key()), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
  return v;
}

std::uint64_t get_uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], index_path(path, i)));
  return v;
}

std::vector<double> get_delays(const json& j, const std::string& path) {
  auto v = get_number_list(j, path);
  if (v.empty()) throw ConfigError(path, "need at least one delay");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0) throw ConfigError(index_path(path, i), "delays must be >= 0");
  return v;
}

/// Scalar (broadcast to n) or per-spin array of non-negative rates.
std::vector<double> get_rates(const json& j, const std::string& path, std::size_t n) {
  if (j.is_number()) {
    const double v = get_number(j, path);
    if (v < 0.0) throw ConfigError(path, "rates must be >= 0");
    return std::vector<double>(n, v);
  }
  auto v = get_number_list(j, path);
  if (v.size() != n)
    throw ConfigError(path, "expected " + std::to_string(n) + " per-spin values, got " + std::to_string(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0) throw ConfigError(index_path(path, i), "rates must be >= 0");
  return v;
}

cplx get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return get_number(j, path);
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a number or [re, im]");
  return {get_number(j[0], index_path(path, 0)), get_number(j[1], index_path(path, 1))};
}

SpinSystem parse_system(const json& j, const std::string& path) {
  check_keys(j, path, {"preset", "spins", "couplings"});
  if (j.contains("preset")) {
    if (j.contains("spins") || j.contains("couplings"))
      throw ConfigError(join(path, "preset"), "cannot be combined with explicit spins/couplings");
    const std::string name = get_string(j["preset"], join(path, "preset"));
    if (name == "benzene-13c") return SpinSystem::benzene_13c();
    throw ConfigError(join(path, "preset"), "unknown preset '" + name + "' (known: benzene-13c)");
  }
  if (!j.contains("spins")) throw ConfigError(join(path, "spins"), "missing (or give a preset)");
  const std::string sp = join(path, "spins");
  const json& spins = j["spins"];
  if (!spins.is_array() || spins.empty()) throw ConfigError(sp, "expected a non-empty array");
  std::vector<SpinRole> roles;
  std::vector<double> offsets;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const std::string p = index_path(sp, i);
    check_keys(spins[i], p, {"label", "role", "offset_hz"});
    if (spins[i].contains("label")) get_string(spins[i]["label"], join(p, "label"));
    if (!spins[i].contains("role")) throw ConfigError(join(p, "role"), "missing");
    const std::string role = get_string(spins[i]["role"], join(p, "role"));
    if (role == "control") roles.push_back(SpinRole::control);
    else if (role == "system") roles.push_back(SpinRole::system);
    else throw ConfigError(join(p, "role"), "expected 'control' or 'system'");
    offsets.push_back(spins[i].contains("offset_hz") ? get_number(spins[i]["offset_hz"], join(p, "offset_hz")) : 0.0);
  }
  std::vector<Coupling> couplings;
  if (j.contains("couplings")) {
    const std::string cp = join(path, "couplings");
    const json& cs = j["couplings"];
    if (!cs.is_array()) throw ConfigError(cp, "expected an array");
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::string p = index_path(cp, k);
      check_keys(cs[k], p, {"i", "j", "hz", "kind"});
      for (auto key : {"i", "j", "hz", "kind"})
        if (!cs[k].contains(key)) throw ConfigError(join(p, key), "missing");
      Coupling c;
      c.i = get_uint(cs[k]["i"], join(p, "i"));
      c.j = get_uint(cs[k]["j"], join(p, "j"));
      c.hz = get_number(cs[k]["hz"], join(p, "hz"));
      const std::string kind = get_string(cs[k]["kind"], join(p, "kind"));
      if (kind == "homonuclear_dipolar") c.kind = CouplingKind::homonuclear_dipolar;
      else if (kind == "heteronuclear_zz") c.kind = CouplingKind::heteronuclear_zz;
      else throw ConfigError(join(p, "kind"), "expected 'homonuclear_dipolar' or 'heteronuclear_zz'");
      if (c.i >= spins.size() || c.j >= spins.size()) throw ConfigError(p, "spin index out of range");
      if (c.i == c.j) throw ConfigError(p, "a spin cannot couple to itself");
      couplings.push_back(c);
    }
  }
  try {
    return SpinSystem(std::move(roles), std::move(offsets), std::move(couplings));
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_noise(const json& j, const std::string& path, RunConfig& cfg) {
  check_keys(j, path,
             {"mode", "include_flip_relaxation", "dephasing_per_s", "flip_per_s", "calibration", "mc_trajectories"});
  const std::size_t n = cfg.sys.n_spins();
  if (j.contains("mode")) {
    const std::string m = get_string(j["mode"], join(path, "mode"));
    if (m == "analytic") cfg.noise_mode = NoiseMode::analytic;
    else if (m == "monte_carlo") cfg.noise_mode = NoiseMode::monte_carlo;
    else throw ConfigError(join(path, "mode"), "expected 'analytic' or 'monte_carlo'");
  }
  if (j.contains("include_flip_relaxation"))
    cfg.include_flip_relaxation = get_bool(j["include_flip_relaxation"], join(path, "include_flip_relaxation"));

  NoiseModel noise = NoiseModel::none(n);
  if (j.contains("calibration")) {
    const std::string cp = join(path, "calibration");
    if (j.contains("dephasing_per_s") || j.contains("flip_per_s"))
      throw ConfigError(cp, "cannot be combined with explicit dephasing_per_s / flip_per_s");
    check_keys(j["calibration"], cp, {"nq_lifetime_s", "diagonal_lifetime_s"});
    if (!j["calibration"].contains("nq_lifetime_s")) throw ConfigError(join(cp, "nq_lifetime_s"), "missing");
    const double tau_nq = get_positive(j["calibration"]["nq_lifetime_s"], join(cp, "nq_lifetime_s"));
    std::optional<double> tau_diag;
    if (j["calibration"].contains("diagonal_lifetime_s"))
      tau_diag = get_positive(j["calibration"]["diagonal_lifetime_s"], join(cp, "diagonal_lifetime_s"));
    try {
      // Flip-induced coherence loss only counts against the NQ budget when
      // flips actually run during the delay.
      noise = calibrated_noise(n, tau_nq, cfg.include_flip_relaxation ? tau_diag : std::nullopt);
      if (tau_diag && !cfg.include_flip_relaxation) noise.flip_rates.assign(n, 1.0 / (4.0 * *tau_diag));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(cp, e.what());
    }
  } else {
    if (j.contains("dephasing_per_s")) noise.dephasing_rates = get_rates(j["dephasing_per_s"], join(path, "dephasing_per_s"), n);
    if (j.contains("flip_per_s")) noise.flip_rates = get_rates(j["flip_per_s"], join(path, "flip_per_s"), n);
  }
  if (j.contains("mc_trajectories")) {
    noise.mc_trajectories = get_uint(j["mc_trajectories"], join(path, "mc_trajectories"));
    if (noise.mc_trajectories < 1) throw ConfigError(join(path, "mc_trajectories"), "must be >= 1");
  } else if (cfg.noise_mode == NoiseMode::monte_carlo) {
    noise.mc_trajectories = 1000;
  }
  cfg.noise = std::move(noise);
}

void parse_protocol(const json& j, const std::string& path, RunConfig& cfg) {
  check_keys(j, path, {"a", "b", "purity_fraction", "delays_s", "seed"});
  if (j.contains("a") != j.contains("b")) throw ConfigError(join(path, j.contains("a") ? "b" : "a"), "missing (give both a and b)");
  if (j.contains("a")) {
    const cplx a = get_complex(j["a"], join(path, "a"));
    const cplx b = get_complex(j["b"], join(path, "b"));
    CatWeights w{a, b};
    if (w.norm_error() > 1e-9) throw ConfigError(join(path, "a"), "|a|^2 + |b|^2 must equal 1");
    cfg.weights = w;
  }
  if (j.contains("purity_fraction")) {
    const double f = get_number(j["purity_fraction"], join(path, "purity_fraction"));
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError(join(path, "purity_fraction"), "must lie in (0, 1]");
    cfg.purity_fraction = f;
  }
  if (j.contains("delays_s")) cfg.delays = get_delays(j["delays_s"], join(path, "delays_s"));
  if (j.contains("seed")) cfg.seed = get_uint(j["seed"], join(path, "seed"));
}

void parse_spectrum(const json& j, const std::string& path, SpectrumSettings& s) {
  check_keys(j, path, {"linewidth_hz", "min_hz", "max_hz", "points", "threshold", "thermal_epsilon"});
  if (j.contains("linewidth_hz")) s.linewidth_hz = get_positive(j["linewidth_hz"], join(path, "linewidth_hz"));
  if (j.contains("min_hz")) s.grid.min_hz = get_number(j["min_hz"], join(path, "min_hz"));
  if (j.contains("max_hz")) s.grid.max_hz = get_number(j["max_hz"], join(path, "max_hz"));
  if (j.contains("points")) s.grid.points = get_uint(j["points"], join(path, "points"));
  if (s.grid.points < 2) throw ConfigError(join(path, "points"), "must be >= 2");
  if (!(s.grid.max_hz > s.grid.min_hz)) throw ConfigError(join(path, "max_hz"), "must exceed min_hz");
  if (j.contains("threshold")) {
    s.threshold = get_number(j["threshold"], join(path, "threshold"));
    if (!(s.threshold > 0.0 && s.threshold < 1.0)) throw ConfigError(join(path, "threshold"), "must lie in (0, 1)");
  }
  if (j.contains("thermal_epsilon")) s.thermal_epsilon = get_positive(j["thermal_epsilon"], join(path, "thermal_epsilon"));
}

void parse_output(const json& j, const std::string& path, OutputSettings& o) {
  check_keys(j, path, {"directory", "formats"});
  if (j.contains("directory")) o.directory = get_string(j["directory"], join(path, "directory"));
  if (j.contains("formats")) {
    const std::string fp = join(path, "formats");
    if (!j["formats"].is_array() || j["formats"].empty()) throw ConfigError(fp, "expected a non-empty array");
    o.formats.clear();
    for (std::size_t i = 0; i < j["formats"].size(); ++i) {
      const std::string f = get_string(j["formats"][i], index_path(fp, i));
      if (f != "csv" && f != "json") throw ConfigError(index_path(fp, i), "expected 'csv' or 'json'");
      o.formats.push_back(f);
    }
  }
}

}  // namespace

bool OutputSettings::wants(std::string_view fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

ProtocolConfig RunConfig::protocol(double delay) const {
  ProtocolConfig p;
  p.sys = sys;
  p.noise = noise;
  p.weights = weights;
  p.delay = delay;
  p.purity_fraction = purity_fraction;
  p.include_flip_relaxation = include_flip_relaxation;
  p.noise_mode = noise_mode;
  p.seed = seed;
  return p;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "", {"system", "noise", "protocol", "decay_scan", "scaling", "spectrum", "output"});

  RunConfig cfg;
  cfg.config_hash = fnv1a64(text);
  if (root.contains("system")) cfg.sys = parse_system(root["system"], "system");
  cfg.noise = NoiseModel::none(cfg.sys.n_spins());
  if (root.contains("noise")) parse_noise(root["noise"], "noise", cfg);
  if (root.contains("protocol")) parse_protocol(root["protocol"], "protocol", cfg);

  cfg.nq_scan_delays = linspace(0.0, 0.11, 12);
  cfg.diagonal_scan_delays = linspace(0.0, 1.5, 12);
  cfg.scaling_delays = linspace(0.0, 0.05, 8);
  if (root.contains("decay_scan")) {
    const json& d = root["decay_scan"];
    check_keys(d, "decay_scan", {"nq_delays_s", "diagonal_delays_s"});
    if (d.contains("nq_delays_s")) cfg.nq_scan_delays = get_delays(d["nq_delays_s"], "decay_scan.nq_delays_s");
    if (d.contains("diagonal_delays_s"))
      cfg.diagonal_scan_delays = get_delays(d["diagonal_delays_s"], "decay_scan.diagonal_delays_s");
  }
  if (root.contains("scaling")) {
    const json& s = root["scaling"];
    check_keys(s, "scaling", {"delays_s", "dephasing_per_s"});
    if (s.contains("delays_s")) cfg.scaling_delays = get_delays(s["delays_s"], "scaling.delays_s");
    if (s.contains("dephasing_per_s")) {
      const double g = get_number(s["dephasing_per_s"], "scaling.dephasing_per_s");
      if (g < 0.0) throw ConfigError("scaling.dephasing_per_s", "must be >= 0");
      cfg.scaling_dephasing_rate = g;
    }
  }
  if (root.contains("spectrum")) parse_spectrum(root["spectrum"], "spectrum", cfg.spectrum);
  if (root.contains("output")) parse_output(root["output"], "output", cfg.output);

  // Module-level invariants (exactly one control spin at site 0, ...).
  try {
    cfg.protocol(0.0).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(root.contains("system") ? "system" : "<root>", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace catsim

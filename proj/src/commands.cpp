#include "catsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

#include "catsim/analysis.hpp"
#include "catsim/config.hpp"
#include "catsim/protocol.hpp"
#include "catsim/spectra.hpp"

namespace catsim::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Context {
  std::string command;
  RunConfig cfg;
  fs::path dir;
  bool csv{};
  bool json{};
};

Context load(const CommonOptions& opt, std::string command) {
  Context c;
  c.command = std::move(command);
  c.cfg = load_config(opt.config);
  if (opt.seed) c.cfg.seed = *opt.seed;
  c.dir = opt.out ? *opt.out : c.cfg.output.directory;
  if (opt.format) {
    if (*opt.format != "csv" && *opt.format != "json") throw ConfigError("--format", "expected csv or json");
    c.csv = *opt.format == "csv";
    c.json = *opt.format == "json";
  } else {
    c.csv = c.cfg.output.wants("csv");
    c.json = c.cfg.output.wants("json");
  }
  return c;
}

std::string csv_header(const Context& c, std::string_view what) {
  std::ostringstream os;
  os << "# catsim " << c.command << ": " << what << '\n'
     << "# config_hash: " << hex64(c.cfg.config_hash) << '\n'
     << "# seed: " << c.cfg.seed << '\n';
  return os.str();
}

json meta(const Context& c) {
  return {{"command", c.command}, {"config_hash", hex64(c.cfg.config_hash)}, {"seed", c.cfg.seed}};
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

// Collects files and writes them in one go at the end.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
  void commit(std::ostream& out) const {
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      write_atomic(dir_ / name, content);
      out << "wrote " << (dir_ / name).string() << '\n';
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    static constexpr const char* kLabel[] = {"ok", "config error", "invariant violation", "analysis failure"};
    err << kLabel[code] << ": " << e.what() << '\n';
    return code;
  }
}

json step_json(const StepRecord& s) {
  json weights = json::object();
  for (const auto& [q, w] : s.coherence_weights) weights[std::to_string(q)] = w;
  return {{"name", s.name},
          {"fidelity_to_ideal", s.fidelity_to_ideal},
          {"coherence_weights", weights},
          {"control_entropy", s.control_entropy},
          {"system_entropy", s.system_entropy},
          {"total_magnetization", s.total_magnetization},
          {"full_nq_amplitude", complex_json(s.full_nq_amplitude)}};
}

std::vector<Sample> to_samples(const std::vector<DecayPoint>& pts) {
  std::vector<Sample> s;
  s.reserve(pts.size());
  for (const auto& p : pts) s.push_back({p.delay, p.value});
  return s;
}

DensityMatrix basis_projector(std::size_t n_total, std::size_t index) {
  std::vector<cplx> psi(std::size_t{1} << n_total);
  psi[index] = 1.0;
  return pure_state(psi);
}

DensityMatrix read_state_file(const fs::path& path, std::size_t n_total) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(where, "cannot open state file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(where, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError(where, "expected an object with 'real' (and optional 'imag')");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "real" && it.key() != "imag") throw ConfigError(where + ":" + it.key(), "unknown key");
  if (!j.contains("real")) throw ConfigError(where + ":real", "missing");
  const std::size_t dim = std::size_t{1} << n_total;
  ComplexMatrix m(dim);
  auto read_part = [&](const char* key, bool imag) {
    const json& a = j[key];
    const std::string p = where + ":" + key;
    if (!a.is_array() || a.size() != dim) throw ConfigError(p, "expected " + std::to_string(dim) + " rows");
    for (std::size_t r = 0; r < dim; ++r) {
      if (!a[r].is_array() || a[r].size() != dim)
        throw ConfigError(p + "[" + std::to_string(r) + "]", "expected " + std::to_string(dim) + " columns");
      for (std::size_t c = 0; c < dim; ++c) {
        if (!a[r][c].is_number()) throw ConfigError(p + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", "expected a number");
        const double v = a[r][c].get<double>();
        if (imag) m(r, c) += cplx(0.0, v);
        else m(r, c) += v;
      }
    }
  };
  read_part("real", false);
  if (j.contains("imag")) read_part("imag", true);
  try {
    DensityMatrix rho(m);
    rho.validate();
    return rho;
  } catch (const InvalidStateError& e) {
    throw ConfigError(where, e.what());
  }
}

DensityMatrix spectrum_state(const Context& c, const SpectrumOptions& s) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.sys.n_spins();
  if (s.state_file) return read_state_file(*s.state_file, n);
  const std::size_t ns = n - 1;
  const std::size_t all_down = (std::size_t{1} << ns) - 1;
  const std::size_t control_down = std::size_t{1} << ns;
  const auto& name = s.state;
  std::optional<DensityMatrix> target;
  if (name == "up-u") target = basis_projector(n, 0);
  else if (name == "up-d") target = basis_projector(n, all_down);
  else if (name == "down-u") target = basis_projector(n, control_down);
  else if (name == "down-d") target = basis_projector(n, control_down | all_down);
  else if (name == "cat") {
    std::vector<cplx> psi(std::size_t{1} << n);
    psi[0] = cfg.weights.a;
    psi[all_down] = cfg.weights.b;
    target = pure_state(psi);
  } else if (name == "entangled") target = entangled_pair_state(ns, cfg.weights);
  else if (name == "mixture") target = decohered_mixture(ns, cfg.weights);
  else if (name == "thermal") return thermal_state(cfg.sys, cfg.spectrum.thermal_epsilon);
  else if (name == "resurrected") {
    const ProtocolConfig p = cfg.protocol(cfg.delays.front());
    auto rho = step_a_initialize(p);
    rho = step_b_create_cat(rho, p);
    rho = step_c_entangle(rho, p);
    rho = step_d_decohere(rho, p);
    return step_e_resurrect(rho, p);
  } else {
    throw ConfigError("--state", "unknown state '" + name +
                                     "' (up-u, up-d, down-u, down-d, cat, entangled, mixture, thermal, resurrected)");
  }
  return pseudopure(n, *target, cfg.purity_fraction);
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const InvalidStateError*>(&e) || dynamic_cast<const NotHermitianError*>(&e))
    return kInvariantViolation;
  if (dynamic_cast<const FitError*>(&e)) return kAnalysisFailure;
  // Output directory problems and parameter combinations the modules reject.
  if (dynamic_cast<const fs::filesystem_error*>(&e) || dynamic_cast<const std::invalid_argument*>(&e))
    return kConfigError;
  return kInvariantViolation;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw fs::filesystem_error("cannot create", tmp, std::make_error_code(std::errc::io_error));
    os << content;
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw fs::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
    }
  }
  fs::rename(tmp, path);
}

int cmd_run_protocol(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context c = load(opt, "run-protocol");
    std::vector<ProtocolReport> reports;
    for (double d : c.cfg.delays) reports.push_back(run_protocol(c.cfg.protocol(d)));

    Outputs files(c.dir);
    if (c.json) {
      json runs = json::array();
      for (const auto& r : reports) {
        json steps = json::array();
        for (const auto& s : r.steps) steps.push_back(step_json(s));
        runs.push_back({{"delay_s", r.delay},
                        {"final_proton_fidelity", r.final_proton_fidelity},
                        {"final_control_entropy", r.final_control_entropy},
                        {"final_total_magnetization", r.final_total_magnetization},
                        {"final_proton_polarization", r.final_proton_polarization},
                        {"steps", steps}});
      }
      json doc = {{"meta", meta(c)},
                  {"n_spins", c.cfg.sys.n_spins()},
                  {"weights", {{"a", complex_json(c.cfg.weights.a)}, {"b", complex_json(c.cfg.weights.b)}}},
                  {"purity_fraction", c.cfg.purity_fraction},
                  {"runs", runs}};
      files.add_json("protocol_report.json", doc);
    }
    if (c.csv) {
      std::string orders = csv_header(c, "coherence-order weights per step") + "# delay_s,step,order,weight\n";
      std::string summary = csv_header(c, "final recovery per delay") +
                            "# delay_s,proton_fidelity,control_entropy,total_magnetization,proton_polarization\n";
      for (const auto& r : reports) {
        for (const auto& s : r.steps)
          for (const auto& [q, w] : s.coherence_weights)
            orders += fmt17(r.delay) + "," + s.name + "," + std::to_string(q) + "," + fmt17(w) + "\n";
        summary += fmt17(r.delay) + "," + fmt17(r.final_proton_fidelity) + "," + fmt17(r.final_control_entropy) +
                   "," + fmt17(r.final_total_magnetization) + "," + fmt17(r.final_proton_polarization) + "\n";
      }
      files.add("coherence_orders.csv", orders);
      files.add("protocol_summary.csv", summary);
    }
    for (const auto& r : reports) {
      char line[160];
      std::snprintf(line, sizeof line, "delay %.4g s: proton fidelity %.6f, control entropy %.6f (ln 2 = %.6f)\n",
                    r.delay, r.final_proton_fidelity, r.final_control_entropy, std::log(2.0));
      out << line;
    }
    files.commit(out);
    return kOk;
  });
}

int cmd_decay_scan(const CommonOptions& opt, DecayKind which, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context c = load(opt, "decay-scan");
    const ProtocolConfig p = c.cfg.protocol(0.0);
    const bool nq = which == DecayKind::nq;
    std::vector<DecayPoint> pts;
    if (nq) {
      pts = measure_7q_decay(p, c.cfg.nq_scan_delays);
    } else {
      if (!c.cfg.include_flip_relaxation || !c.cfg.noise.has_flips())
        throw ConfigError("noise.flip_per_s", "diagonal scan needs include_flip_relaxation and flip rates > 0");
      pts = measure_diagonal_decay(p, c.cfg.diagonal_scan_delays);
    }
    const auto samples = to_samples(pts);
    DecayFit fit;
    try {
      fit = fit_exponential(samples);
    } catch (const FitError& e) {
      throw FitError(std::string(e.what()) + " (is any noise configured for this channel?)");
    }
    const std::string tag = nq ? "nq" : "diagonal";

    Outputs files(c.dir);
    if (c.csv) {
      std::string s = csv_header(c, tag + " decay scan");
      s += "# fit: tau_s=" + fmt17(fit.tau) + " amplitude=" + fmt17(fit.amplitude) + " r_squared=" +
           fmt17(fit.r_squared) + "\n";
      s += "# delay_s,normalized_amplitude\n";
      for (const auto& pt : pts) s += fmt17(pt.delay) + "," + fmt17(pt.value) + "\n";
      files.add("decay_" + tag + ".csv", s);
    }
    if (c.json) {
      json points = json::array();
      for (const auto& pt : pts) points.push_back({pt.delay, pt.value});
      files.add_json("decay_" + tag + "_fit.json", {{"meta", meta(c)},
                                                    {"which", tag},
                                                    {"tau_s", fit.tau},
                                                    {"amplitude", fit.amplitude},
                                                    {"r_squared", fit.r_squared},
                                                    {"residual_rms", fit.residual_rms},
                                                    {"points", points}});
    }
    char line[128];
    std::snprintf(line, sizeof line, "%s decay: tau = %.6g s, R^2 = %.8f\n", tag.c_str(), fit.tau, fit.r_squared);
    out << line;
    files.commit(out);
    return kOk;
  });
}

int cmd_spectrum(const CommonOptions& opt, const SpectrumOptions& sopt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context c = load(opt, "spectrum");
    const DensityMatrix rho = spectrum_state(c, sopt);
    const auto observe = c.cfg.sys.system_sites();
    const std::vector<std::size_t> decouple = sopt.decouple ? c.cfg.sys.control_sites() : std::vector<std::size_t>{};
    const auto& ss = c.cfg.spectrum;
    const Spectrum spec = linear_response_spectrum(rho, c.cfg.sys, observe, decouple, ss.linewidth_hz, ss.grid);
    const auto peaks = peak_list(spec, ss.threshold);

    const std::string stem =
        "spectrum_" + (sopt.state_file ? sopt.state_file->stem().string() : sopt.state) + (sopt.decouple ? "_decoupled" : "");
    Outputs files(c.dir);
    if (c.csv) {
      std::ostringstream trace, sticks;
      trace << csv_header(c, "broadened trace");
      write_trace_table(trace, spec);
      sticks << csv_header(c, "stick list");
      write_stick_table(sticks, spec);
      files.add(stem + ".csv", trace.str());
      files.add(stem + "_sticks.csv", sticks.str());
    }
    if (c.json) {
      json js = json::array(), jp = json::array();
      for (const auto& s : spec.sticks) js.push_back({{"freq_hz", s.freq_hz}, {"amplitude", complex_json(s.amplitude)}});
      for (const auto& p : peaks) jp.push_back({{"freq_hz", p.freq_hz}, {"amplitude", p.amplitude}});
      files.add_json(stem + ".json", {{"meta", meta(c)},
                                      {"state", sopt.state_file ? sopt.state_file->string() : sopt.state},
                                      {"decoupled", sopt.decouple},
                                      {"linewidth_hz", spec.linewidth_hz},
                                      {"threshold", ss.threshold},
                                      {"sticks", js},
                                      {"peaks", jp}});
    }
    out << "peaks: " << peaks.size() << '\n';
    for (const auto& p : peaks) {
      char line[96];
      std::snprintf(line, sizeof line, "  %12.4f Hz  %+.6g\n", p.freq_hz, p.amplitude);
      out << line;
    }
    files.commit(out);
    return kOk;
  });
}

int cmd_scaling(const CommonOptions& opt, std::size_t n_min, std::size_t n_max, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Context c = load(opt, "scaling");
    if (n_max > 10) throw ConfigError("--n-max", "must be <= 10 (dense matrices grow as 4^N)");
    if (n_min < 1 || n_min >= n_max) throw ConfigError("--n-min", "need 1 <= n-min < n-max");
    NoiseModel noise = c.cfg.noise;
    auto& rates = noise.dephasing_rates;
    if (c.cfg.scaling_dephasing_rate) rates.assign(1, *c.cfg.scaling_dephasing_rate);
    else if (!rates.empty() && std::all_of(rates.begin(), rates.end(), [&](double g) { return g == rates.front(); }))
      rates.resize(1);
    else if (rates.size() < n_max)
      throw ConfigError("scaling.dephasing_per_s", "per-spin rates cover " + std::to_string(rates.size()) +
                                                       " spins; set a single scaling rate for N up to " +
                                                       std::to_string(n_max));
    if (c.cfg.noise_mode == NoiseMode::monte_carlo && noise.mc_trajectories < 1) noise.mc_trajectories = 1000;
    std::vector<std::size_t> ns;
    for (std::size_t n = n_min; n <= n_max; ++n) ns.push_back(n);
    const auto pts = scaling_study(ns, noise, c.cfg.scaling_delays, c.cfg.noise_mode, c.cfg.seed);
    std::vector<double> x, y;
    for (const auto& p : pts) {
      x.push_back(static_cast<double>(p.n));
      y.push_back(p.rate);
    }
    const LinearFit fit = linear_regression(x, y);

    Outputs files(c.dir);
    if (c.csv) {
      std::string s = csv_header(c, "NQ decay rate versus N");
      s += "# fit: slope=" + fmt17(fit.slope) + " intercept=" + fmt17(fit.intercept) + " r=" + fmt17(fit.r) + "\n";
      s += "# n,rate_per_s\n";
      for (const auto& p : pts) s += std::to_string(p.n) + "," + fmt17(p.rate) + "\n";
      files.add("scaling.csv", s);
    }
    if (c.json) {
      json jp = json::array();
      for (const auto& p : pts) jp.push_back({{"n", p.n}, {"rate_per_s", p.rate}});
      files.add_json("scaling.json", {{"meta", meta(c)},
                                      {"mode", c.cfg.noise_mode == NoiseMode::analytic ? "analytic" : "monte_carlo"},
                                      {"slope", fit.slope},
                                      {"intercept", fit.intercept},
                                      {"r", fit.r},
                                      {"slope_stderr", fit.slope_stderr},
                                      {"intercept_stderr", fit.intercept_stderr},
                                      {"points", jp}});
    }
    char line[160];
    std::snprintf(line, sizeof line, "slope %.8g 1/s per spin, intercept %.3g 1/s, r = %.9f\n", fit.slope,
                  fit.intercept, fit.r);
    out << line;
    files.commit(out);
    return kOk;
  });
}

}  // namespace catsim::cli

#include "catsim/protocol.hpp"

#include <cmath>
#include <string>

namespace catsim {

namespace {

constexpr std::size_t kControl = 0;

Sites system_sites_of(const ProtocolConfig& cfg) {
  Sites s;
  for (std::size_t i = 1; i < cfg.sys.n_spins(); ++i) s.push_back(i);
  return s;
}

std::vector<std::size_t> step_c_permutation(std::size_t n_system) {
  // Swap |up>|d> and |down>|d>: flip the control iff every system spin is down.
  const std::size_t dim = std::size_t{1} << (n_system + 1);
  std::vector<std::size_t> perm(dim);
  for (std::size_t r = 0; r < dim; ++r) perm[r] = r;
  const std::size_t up_d = (std::size_t{1} << n_system) - 1;
  const std::size_t down_d = dim - 1;
  perm[up_d] = down_d;
  perm[down_d] = up_d;
  return perm;
}

double control_referenced_polarization(const DensityMatrix& rho, std::size_t n_system) {
  // <2 Sz_c * sum_i Sz_i> is diagonal in the product basis.
  const std::size_t n = n_system + 1;
  double s = 0.0;
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    const double zc = is_down(r, kControl, n) ? -0.5 : 0.5;
    double zs = 0.0;
    for (std::size_t i = 1; i < n; ++i) zs += is_down(r, i, n) ? -0.5 : 0.5;
    s += 2.0 * zc * zs * rho(r, r).real();
  }
  return s;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (sys.n_spins() < 2) throw std::invalid_argument("protocol needs a control spin and at least one system spin");
  if (sys.n_spins() > 12) throw std::invalid_argument("protocol limited to 12 spins (dense storage)");
  const std::size_t c = sys.control_site();
  if (c != kControl) throw std::invalid_argument("control spin must be at site 0, found at site " + std::to_string(c));
  noise.validate(sys.n_spins());
  if (weights.norm_error() > 1e-9) throw std::invalid_argument("cat weights are not normalized");
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw std::invalid_argument("delay must be finite and >= 0");
  if (!(purity_fraction > 0.0 && purity_fraction <= 1.0))
    throw std::invalid_argument("purity_fraction must lie in (0, 1]");
  if (noise_mode == NoiseMode::monte_carlo && noise.mc_trajectories < 1)
    throw std::invalid_argument("monte_carlo mode needs mc_trajectories >= 1");
}

NoiseModel calibrated_noise(std::size_t n_total, double nq_lifetime, std::optional<double> diagonal_lifetime) {
  if (n_total == 0) throw std::invalid_argument("calibrated_noise: no spins");
  if (!(nq_lifetime > 0.0)) throw std::invalid_argument("calibrated_noise: nq lifetime must be > 0");
  double kappa = 0.0;
  if (diagonal_lifetime) {
    if (!(*diagonal_lifetime > 0.0)) throw std::invalid_argument("calibrated_noise: diagonal lifetime must be > 0");
    // Two independent flip channels (control and one system spin) each decay
    // <Sz> at 2 kappa, so the correlator decays at 4 kappa.
    kappa = 1.0 / (4.0 * *diagonal_lifetime);
  }
  // Each spin's coherence decays at gamma/2 + kappa.
  const double per_spin = 1.0 / (nq_lifetime * static_cast<double>(n_total));
  const double gamma = 2.0 * (per_spin - kappa);
  if (gamma < 0.0)
    throw std::invalid_argument("calibrated_noise: flip relaxation alone decays the NQ coherence faster than requested");
  return NoiseModel::uniform(n_total, gamma, kappa);
}

ComplexMatrix cat_creation_unitary(std::size_t n_system, const CatWeights& w) {
  if (w.norm_error() > 1e-9) throw std::invalid_argument("cat_creation_unitary: weights are not normalized");
  const std::size_t dim = std::size_t{1} << (n_system + 1);
  const std::size_t half = dim / 2;
  ComplexMatrix u = ComplexMatrix::identity(dim);
  // [[a, -b*], [b, a*]] on span{|c>|u>, |c>|d>} for each control value c.
  for (std::size_t base : {std::size_t{0}, half}) {
    const std::size_t iu = base;
    const std::size_t id = base + half - 1;
    u(iu, iu) = w.a;
    u(id, iu) = w.b;
    u(iu, id) = -std::conj(w.b);
    u(id, id) = std::conj(w.a);
  }
  return u;
}

DensityMatrix step_a_initialize(const ProtocolConfig& cfg) {
  const std::size_t n = cfg.sys.n_spins();
  return pseudopure(n, ferro_state(n, Ferro::alive), cfg.purity_fraction);
}

DensityMatrix step_b_create_cat(const DensityMatrix& rho, const ProtocolConfig& cfg) {
  return apply_unitary(rho, cat_creation_unitary(cfg.n_system(), cfg.weights));
}

DensityMatrix step_c_entangle(const DensityMatrix& rho, const ProtocolConfig& cfg) {
  return apply_permutation(rho, step_c_permutation(cfg.n_system()));
}

DensityMatrix step_c_inverse(const DensityMatrix& rho, const ProtocolConfig& cfg) {
  return apply_permutation(rho, step_c_permutation(cfg.n_system()));
}

DensityMatrix step_d_decohere(const DensityMatrix& rho, const ProtocolConfig& cfg) {
  if (!(cfg.delay >= 0.0)) throw std::invalid_argument("step D: delay must be >= 0");
  if (cfg.delay == 0.0) return rho;
  DensityMatrix out = rho;
  if (cfg.noise_mode == NoiseMode::analytic) {
    out = apply_dephasing(out, cfg.noise, cfg.delay);
  } else {
    // Gaussian kicks with variance gamma_i * t reproduce exp(-gamma_i t / 2).
    NoiseModel kicks = cfg.noise;
    std::vector<double> sigma(cfg.sys.n_spins());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::sqrt(cfg.noise.dephasing_rates[i] * cfg.delay);
    kicks.mc_phase_sigma = std::move(sigma);
    out = apply_phase_kicks_mc(out, kicks, cfg.seed);
  }
  if (cfg.include_flip_relaxation) out = apply_flip_relaxation(out, cfg.noise, cfg.delay);
  return out;
}

DensityMatrix step_e_resurrect(const DensityMatrix& rho, const ProtocolConfig& cfg) {
  return controlled_not_all(rho, SpinIndex(kControl, SpinRole::control), system_sites_of(cfg));
}

std::vector<DensityMatrix> ideal_step_states(const ProtocolConfig& cfg) {
  const std::size_t n = cfg.sys.n_spins();
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t half = dim / 2;
  const auto& w = cfg.weights;
  std::vector<cplx> psi(dim);

  std::vector<DensityMatrix> out;
  out.push_back(ferro_state(n, Ferro::alive));
  psi[0] = w.a;
  psi[half - 1] = w.b;
  out.push_back(pure_state(psi));
  out.push_back(entangled_pair_state(n - 1, w));
  out.push_back(entangled_pair_state(n - 1, w));
  std::fill(psi.begin(), psi.end(), cplx{});
  psi[0] = w.a;
  psi[half] = w.b;
  out.push_back(pure_state(psi));
  return out;
}

ProtocolReport run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.sys.n_spins();
  const Sites control{kControl};
  const Sites system = system_sites_of(cfg);
  const std::vector<DensityMatrix> ideal = ideal_step_states(cfg);
  const ComplexMatrix sz_total = total_sz(n);

  ProtocolReport report;
  report.delay = cfg.delay;
  auto record = [&](const char* name, const DensityMatrix& rho, std::size_t k) {
    rho.validate();
    StepRecord s;
    s.name = name;
    s.fidelity_to_ideal = fidelity(rho, ideal[k]);
    s.coherence_weights = coherence_weights(rho.matrix());
    s.control_entropy = von_neumann_entropy(reduced_state(rho, control));
    s.system_entropy = von_neumann_entropy(reduced_state(rho, system));
    s.total_magnetization = expectation(rho, sz_total);
    s.full_nq_amplitude = rho(0, rho.dim() - 1);
    report.steps.push_back(std::move(s));
  };

  DensityMatrix rho = step_a_initialize(cfg);
  record("A", rho, 0);
  rho = step_b_create_cat(rho, cfg);
  record("B", rho, 1);
  rho = step_c_entangle(rho, cfg);
  record("C", rho, 2);
  rho = step_d_decohere(rho, cfg);
  record("D", rho, 3);
  rho = step_e_resurrect(rho, cfg);
  record("E", rho, 4);

  const DensityMatrix protons = reduced_state(rho, system);
  report.final_proton_fidelity = fidelity(protons, ferro_state(n - 1, Ferro::alive));
  report.final_control_entropy = report.steps.back().control_entropy;
  report.final_total_magnetization = report.steps.back().total_magnetization;
  report.final_proton_polarization = expectation(protons, total_sz(n - 1));
  return report;
}

std::vector<DecayPoint> measure_7q_decay(const ProtocolConfig& cfg, const std::vector<double>& delays) {
  cfg.validate();
  const Sites system = system_sites_of(cfg);
  const DensityMatrix prepared = step_c_entangle(step_b_create_cat(step_a_initialize(cfg), cfg), cfg);
  const double baseline = std::abs(nq_amplitude(step_c_inverse(prepared, cfg), system));
  if (baseline < 1e-14) throw std::invalid_argument("measure_7q_decay: the prepared state carries no NQ coherence");

  std::vector<DecayPoint> out;
  ProtocolConfig c = cfg;
  for (std::size_t k = 0; k < delays.size(); ++k) {
    if (!(delays[k] >= 0.0)) throw std::invalid_argument("measure_7q_decay: delays must be >= 0");
    c.delay = delays[k];
    c.seed = cfg.seed + k;
    const DensityMatrix readout = step_c_inverse(step_d_decohere(prepared, c), c);
    out.push_back({delays[k], std::abs(nq_amplitude(readout, system)) / baseline});
  }
  return out;
}

std::vector<DecayPoint> measure_diagonal_decay(const ProtocolConfig& cfg, const std::vector<double>& delays) {
  cfg.validate();
  if (!cfg.include_flip_relaxation)
    throw std::invalid_argument("measure_diagonal_decay: flip relaxation is disabled");
  const std::size_t ns = cfg.n_system();
  const DensityMatrix prepared = step_c_entangle(step_b_create_cat(step_a_initialize(cfg), cfg), cfg);
  const double baseline = control_referenced_polarization(prepared, ns);
  if (std::abs(baseline) < 1e-14) throw std::invalid_argument("measure_diagonal_decay: zero initial polarization");

  std::vector<DecayPoint> out;
  ProtocolConfig c = cfg;
  for (std::size_t k = 0; k < delays.size(); ++k) {
    if (!(delays[k] >= 0.0)) throw std::invalid_argument("measure_diagonal_decay: delays must be >= 0");
    c.delay = delays[k];
    c.seed = cfg.seed + k;
    out.push_back({delays[k], control_referenced_polarization(step_d_decohere(prepared, c), ns) / baseline});
  }
  return out;
}

}  // namespace catsim

#include "spinpair/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "spinpair/constants.hpp"

namespace spinpair {

void ModelParams::validate() const {
  if (!(d_m > 0)) throw std::invalid_argument("model: d_m must be positive");
  if (!(b0_t > 0)) throw std::invalid_argument("model: b0_t must be positive");
  if (!std::isfinite(grad_static_t_per_m))
    throw std::invalid_argument("model: grad_static_t_per_m must be finite");
  noise.validate();
  instrument.validate();
}

double ModelParams::xi() const { return coupling_strength(d_m); }

double ModelParams::static_detuning() const {
  return gradient_detuning(grad_static_t_per_m, d_m);
}

double CellCounts::p_uu() const { return total() ? static_cast<double>(n_uu) / total() : 0.0; }
double CellCounts::p_dd() const { return total() ? static_cast<double>(n_dd) / total() : 0.0; }
double CellCounts::p_one() const { return total() ? static_cast<double>(n_one) / total() : 0.0; }

double CellCounts::correlator() const {
  const long n = total();
  if (n == 0) return 0.0;
  return static_cast<double>(n_uu + n_dd - n_one) / static_cast<double>(n);
}

double CellCounts::correlator_sigma() const {
  const long n = total();
  if (n == 0) return 0.0;
  const double c = correlator();
  return std::sqrt(std::max(0.0, 1.0 - c * c) / static_cast<double>(n));
}

namespace {

/// Closed-form slice coefficients: two sector phases plus the 2x2 DFS
/// rotation (diagonal a_ud/a_du, symmetric off-diagonal b).
struct SliceCoeffs {
  cplx uu, dd, a_ud, a_du, b;
};

/// sum = (omega1 + omega2) / 2 and delta = omega1 - omega2 are taken
/// separately: forming delta as a difference of the two full precession
/// rates would lose the detuning to rounding at high field.
SliceCoeffs slice_coeffs(double sum, double delta, double xi, double dt) {
  const double two_xi = 2.0 * xi;

  SliceCoeffs k;
  k.uu = std::polar(1.0, -(sum + two_xi) * dt);
  k.dd = std::polar(1.0, -(-sum + two_xi) * dt);

  const double w = std::hypot(delta, 2.0 * two_xi);
  const cplx common = std::polar(1.0, two_xi * dt);
  if (w == 0.0) {
    k.a_ud = k.a_du = common;
    k.b = 0.0;
    return k;
  }
  const double half = 0.5 * w * dt;
  const double c = std::cos(half);
  const double sw = std::sin(half) / w;
  k.a_ud = common * cplx(c, -sw * delta);
  k.a_du = common * cplx(c, +sw * delta);
  k.b = common * cplx(0.0, sw * 2.0 * two_xi);
  return k;
}

void apply_slice(Mat4& u, const SliceCoeffs& k) {
  for (std::size_t j = 0; j < 4; ++j) {
    u[kUU][j] *= k.uu;
    u[kDD][j] *= k.dd;
    const cplx ud = u[kUD][j];
    const cplx du = u[kDU][j];
    u[kUD][j] = k.a_ud * ud + k.b * du;
    u[kDU][j] = k.b * ud + k.a_du * du;
  }
}

Mat4 matmul(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t l = 0; l < 4; ++l) {
      const cplx v = a[i][l];
      if (v == cplx(0.0)) continue;
      for (std::size_t j = 0; j < 4; ++j) out[i][j] += v * b[l][j];
    }
  return out;
}

Mat4 identity4() {
  Mat4 u{};
  for (std::size_t i = 0; i < 4; ++i) u[i][i] = 1.0;
  return u;
}

BasisIndex init_basis(InitKind kind) {
  switch (kind) {
    case InitKind::kBothUp: return kUU;
    case InitKind::kUpDown: return kUD;
    case InitKind::kDownUp: return kDU;
    case InitKind::kBothDown: return kDD;
    case InitKind::kPsiPlus: break;
  }
  throw std::logic_error("init_basis: not a product state");
}

struct PrepBranch {
  TwoSpinState state;
  double weight;
};

/// The preparation channel as an explicit mixture, matching the sampling in
/// InstrumentModel exactly.
std::vector<PrepBranch> prep_branches(const InstrumentModel& inst, InitKind init) {
  std::vector<PrepBranch> out;
  if (init == InitKind::kPsiPlus) {
    out.push_back({psi_plus(), inst.psi_plus_fidelity});
    const double w = (1.0 - inst.psi_plus_fidelity) / 4.0;
    for (int i = 0; i < 4; ++i)
      out.push_back({basis_state(static_cast<BasisIndex>(i)), w});
    return out;
  }
  const int target = static_cast<int>(init_basis(init));
  const double f = inst.prep_fidelity;
  for (int i = 0; i < 4; ++i) {
    const double w1 = ((i >> 1) & 1) == ((target >> 1) & 1) ? f : 1.0 - f;
    const double w2 = (i & 1) == (target & 1) ? f : 1.0 - f;
    out.push_back({basis_state(static_cast<BasisIndex>(i)), w1 * w2});
  }
  return out;
}

}  // namespace

Mat4 slice_propagator(double omega1, double omega2, double xi, double dt_s) {
  Mat4 u = identity4();
  apply_slice(u, slice_coeffs(0.5 * (omega1 + omega2), omega1 - omega2, xi, dt_s));
  return u;
}

Mat4 propagate_window(const ModelParams& model, const EchoTrain& train,
                      const NoiseRealization& noise) {
  const double dt = noise.dt;
  if (!(dt > 0)) throw std::invalid_argument("propagate: noise grid dt must be positive");
  const double xi = model.xi();
  const double guard = max_slice_dt(model.noise, model.static_detuning(), 4.0 * xi);
  if (dt > guard * (1.0 + 1e-12))
    throw std::invalid_argument("propagate: dt coarser than the slicing guard");

  const Mat4 flip = pi_pulse_gate(model.instrument.pulse_error_rad);
  Mat4 u = identity4();

  double t = 0.0;
  std::size_t next_pulse = 0;
  const double t_end = train.duration_s;
  while (t < t_end - 1e-15) {
    const auto cell = static_cast<std::size_t>(std::floor(t / dt + 1e-6));
    double t_next = std::min(static_cast<double>(cell + 1) * dt, t_end);
    bool pulse_here = false;
    if (next_pulse < train.pulse_times_s.size() &&
        train.pulse_times_s[next_pulse] <= t_next + 1e-15) {
      t_next = train.pulse_times_s[next_pulse];
      pulse_here = true;
      ++next_pulse;
    }
    const double h = t_next - t;
    if (h > 1e-15) {
      const std::size_t idx = std::min(cell, noise.delta_b_t.empty()
                                                 ? std::size_t{0}
                                                 : noise.delta_b_t.size() - 1);
      const double b_common =
          model.b0_t + (noise.delta_b_t.empty() ? 0.0 : noise.delta_b_t[idx]);
      const double grad =
          model.grad_static_t_per_m + (noise.grad_t_per_m.empty() ? 0.0 : noise.grad_t_per_m[idx]);
      const double split = grad * model.d_m;  // field offset seen by spin 2
      const double sum = constants::gyro * (b_common + 0.5 * split);
      const double delta = -constants::gyro * split;
      apply_slice(u, slice_coeffs(sum, delta, xi, h));
    }
    if (pulse_here) u = matmul(flip, u);
    t = t_next;
  }
  return u;
}

TwoSpinState evolve_state(TwoSpinState psi, const ModelParams& model, const EchoTrain& train,
                          double dt_s, RandomStream& rng) {
  const NoiseRealization nr = sample_noise(model.noise, train.duration_s, dt_s, rng);
  return apply_gate(propagate_window(model, train, nr), psi);
}

ShotOutput run_single_shot(const ModelParams& model, const SequenceSpec& spec, double dt_s,
                           RandomStream& rng) {
  const EchoTrain train = build_echo_train(spec.t_s, spec.f0_hz);
  const NoiseRealization nr = sample_noise(model.noise, spec.t_s, dt_s, rng);
  Mat4 window = propagate_window(model, train, nr);
  if (spec.analysis_pulse) {
    window = matmul(differential_phase_gate(spec.total_phase()), window);
    window = matmul(analysis_gate(), window);
  }

  TwoSpinState prepared = spec.init == InitKind::kPsiPlus
                              ? model.instrument.prepare_entangled(rng)
                              : basis_state(model.instrument.prepare_basis(init_basis(spec.init), rng));

  ShotOutput out;
  for (const auto& br : prep_branches(model.instrument, spec.init)) {
    const auto p = model.instrument.outcome_probabilities(apply_gate(window, br.state), spec.t_s);
    for (int c = 0; c < 3; ++c)
      out.oracle[static_cast<std::size_t>(c)] += br.weight * p[static_cast<std::size_t>(c)];
  }
  out.outcome = model.instrument.detect(apply_gate(window, prepared), spec.t_s, rng);
  return out;
}

CellResult run_cell(const ModelParams& model, const SequenceSpec& spec,
                    const std::string& label, const RunSettings& run) {
  model.validate();
  spec.validate();
  if (run.shots <= 0) throw std::invalid_argument("run: shots must be positive");
  if (!(run.dt_s > 0)) throw std::invalid_argument("run: dt_s must be positive");
  if (run.dt_s > max_slice_dt(model.noise, model.static_detuning(), 4.0 * model.xi()))
    throw std::invalid_argument("run: dt_s coarser than the slicing guard");
  if (run.threads < 0) throw std::invalid_argument("run: threads must be non-negative");

  const auto n = static_cast<std::size_t>(run.shots);
  std::vector<Outcome> outcomes(n);
  std::vector<std::array<double, 3>> oracle(n);

  auto body = [&](long lo, long hi) {
    for (long k = lo; k < hi; ++k) {
      RandomStream rng(shot_seed(run.seed, label, static_cast<std::uint64_t>(k)));
      const ShotOutput shot = run_single_shot(model, spec, run.dt_s, rng);
      outcomes[static_cast<std::size_t>(k)] = shot.outcome;
      oracle[static_cast<std::size_t>(k)] = shot.oracle;
    }
  };

  unsigned workers = run.threads > 0 ? static_cast<unsigned>(run.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(static_cast<long>(workers), run.shots));
  if (workers <= 1) {
    body(0, run.shots);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long chunk = (run.shots + static_cast<long>(workers) - 1) / static_cast<long>(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const long lo = static_cast<long>(w) * chunk;
      const long hi = std::min(run.shots, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  CellResult res;
  res.label = label;
  res.spec = spec;
  if (run.record_shots) res.shot_values.reserve(n);
  std::array<double, 3> var{};
  for (std::size_t k = 0; k < n; ++k) {
    switch (outcomes[k]) {
      case Outcome::kBothUp: ++res.counts.n_uu; break;
      case Outcome::kBothDown: ++res.counts.n_dd; break;
      case Outcome::kOneOne: ++res.counts.n_one; break;
    }
    for (int c = 0; c < 3; ++c) {
      const double p = oracle[k][static_cast<std::size_t>(c)];
      res.oracle_mean[static_cast<std::size_t>(c)] += p;
      var[static_cast<std::size_t>(c)] += p * (1.0 - p);
    }
    if (run.record_shots)
      res.shot_values.push_back(outcomes[k] == Outcome::kOneOne ? -1 : +1);
  }
  const auto dn = static_cast<double>(n);
  for (int c = 0; c < 3; ++c) {
    res.oracle_mean[static_cast<std::size_t>(c)] /= dn;
    res.oracle_sigma[static_cast<std::size_t>(c)] =
        std::sqrt(var[static_cast<std::size_t>(c)]) / dn;
  }
  return res;
}

}  // namespace spinpair

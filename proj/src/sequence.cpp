#include "spinpair/sequence.hpp"

#include <cmath>
#include <stdexcept>

#include "spinpair/constants.hpp"

namespace spinpair {

EchoTrain build_echo_train(double duration_s, double f0_hz) {
  if (duration_s <= 0) throw std::invalid_argument("echo train: duration must be positive");
  if (f0_hz < 0) throw std::invalid_argument("echo train: pulse rate must be non-negative");
  EchoTrain train;
  train.duration_s = duration_s;
  if (f0_hz == 0.0) return train;

  const double m_real = duration_s * f0_hz;
  if (m_real < 1.0) return train;  // window shorter than a pulse period
  const auto m = static_cast<long>(std::llround(m_real));
  if (std::abs(m_real - static_cast<double>(m)) > 1e-9 * std::max(1.0, m_real))
    throw std::invalid_argument("echo train: duration * f0 must be an integer");
  if (m % 2 != 0)
    throw std::invalid_argument("echo train: pulse count must be even to close the echo");

  train.pulse_times_s.reserve(static_cast<std::size_t>(m));
  for (long k = 0; k < m; ++k)
    train.pulse_times_s.push_back((static_cast<double>(k) + 0.5) / f0_hz);
  return train;
}

InitKind parse_init(const std::string& name) {
  if (name == "uu") return InitKind::kBothUp;
  if (name == "ud") return InitKind::kUpDown;
  if (name == "du") return InitKind::kDownUp;
  if (name == "dd") return InitKind::kBothDown;
  if (name == "psi_plus") return InitKind::kPsiPlus;
  throw std::invalid_argument("unknown init state: " + name);
}

std::string init_name(InitKind kind) {
  switch (kind) {
    case InitKind::kBothUp: return "uu";
    case InitKind::kUpDown: return "ud";
    case InitKind::kDownUp: return "du";
    case InitKind::kBothDown: return "dd";
    case InitKind::kPsiPlus: return "psi_plus";
  }
  throw std::logic_error("init_name: bad enum");
}

double SequenceSpec::total_phase() const {
  return phi_rad + (init_flip ? constants::pi : 0.0);
}

void SequenceSpec::validate() const {
  if (t_s <= 0) throw std::invalid_argument("sequence: t_s must be positive");
  if (f0_hz < 0) throw std::invalid_argument("sequence: f0_hz must be non-negative");
  if (!std::isfinite(phi_rad)) throw std::invalid_argument("sequence: phi_rad must be finite");
  build_echo_train(t_s, f0_hz);  // surfaces incompatible t/f0 pairs early
}

Mat4 differential_phase_gate(double phi_rad) {
  Mat4 g{};
  const cplx half_up = std::polar(1.0, +0.5 * phi_rad);
  const cplx half_dn = std::polar(1.0, -0.5 * phi_rad);
  g[kUU][kUU] = 1.0;
  g[kUD][kUD] = half_up;
  g[kDU][kDU] = half_dn;
  g[kDD][kDD] = 1.0;
  return g;
}

namespace {

Mat4 kron2(const std::array<std::array<cplx, 2>, 2>& u) {
  Mat4 g{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          g[static_cast<std::size_t>(2 * a + c)][static_cast<std::size_t>(2 * b + d)] =
              u[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
              u[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
  return g;
}

}  // namespace

Mat4 analysis_gate() {
  const double c = std::sqrt(0.5);
  // exp(-i (pi/2) sigma_y / 2)
  const std::array<std::array<cplx, 2>, 2> u = {{{cplx(c, 0), cplx(-c, 0)},
                                                 {cplx(c, 0), cplx(c, 0)}}};
  return kron2(u);
}

Mat4 pi_pulse_gate(double error_rad) {
  const double half = 0.5 * (constants::pi + error_rad);
  const cplx diag(std::cos(half), 0.0);
  const cplx off(0.0, -std::sin(half));
  const std::array<std::array<cplx, 2>, 2> u = {{{diag, off}, {off, diag}}};
  return kron2(u);
}

TwoSpinState apply_gate(const Mat4& gate, const TwoSpinState& state) {
  TwoSpinState out;
  for (std::size_t i = 0; i < 4; ++i) {
    cplx acc = 0;
    for (std::size_t j = 0; j < 4; ++j) acc += gate[i][j] * state.amp[j];
    out.amp[i] = acc;
  }
  return out;
}

}  // namespace spinpair

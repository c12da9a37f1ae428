#include "spinpair/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spinpair {

double AffineFidelity::value(double t_s) const {
  return std::clamp(intercept + slope * t_s, 0.5, 1.0);
}

AffineFidelity fit_fidelity_curve(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_fidelity_curve: need at least two calibration points");
  std::set<double> times;
  double st = 0, sf = 0, stt = 0, stf = 0;
  for (const auto& [t, f] : points) {
    times.insert(t);
    st += t;
    sf += f;
    stt += t * t;
    stf += t * f;
  }
  if (times.size() < 2)
    throw std::invalid_argument("fit_fidelity_curve: calibration times must not all coincide");
  const auto n = static_cast<double>(points.size());
  const double denom = n * stt - st * st;
  AffineFidelity out;
  out.slope = (n * stf - st * sf) / denom;
  out.intercept = (sf - out.slope * st) / n;
  return out;
}

std::array<std::array<double, 3>, 3> confusion_matrix(double d_up, double d_down) {
  if (d_up < 0 || d_up > 1 || d_down < 0 || d_down > 1)
    throw std::invalid_argument("confusion_matrix: fidelities must lie in [0, 1]");
  const double eu = 1.0 - d_up;
  const double ed = 1.0 - d_down;
  return {{
      {d_up * d_up, eu * eu, 2.0 * d_up * eu},
      {ed * ed, d_down * d_down, 2.0 * d_down * ed},
      {d_up * ed, eu * d_down, d_up * d_down + eu * ed},
  }};
}

void InstrumentModel::validate() const {
  if (prep_fidelity < 0.5 || prep_fidelity > 1)
    throw std::invalid_argument("prep_fidelity must lie in [0.5, 1]");
  if (psi_plus_fidelity < 0 || psi_plus_fidelity > 1)
    throw std::invalid_argument("psi_plus_fidelity must lie in [0, 1]");
  if (!std::isfinite(pulse_error_rad))
    throw std::invalid_argument("pulse_error_rad must be finite");
}

BasisIndex InstrumentModel::prepare_basis(BasisIndex target, RandomStream& rng) const {
  const int idx = static_cast<int>(target);
  int spin1 = (idx >> 1) & 1;  // 0 = up, 1 = down
  int spin2 = idx & 1;
  if (rng.bernoulli(1.0 - prep_fidelity)) spin1 ^= 1;
  if (rng.bernoulli(1.0 - prep_fidelity)) spin2 ^= 1;
  return static_cast<BasisIndex>((spin1 << 1) | spin2);
}

TwoSpinState InstrumentModel::prepare_entangled(RandomStream& rng) const {
  if (rng.bernoulli(psi_plus_fidelity)) return psi_plus();
  const auto k = static_cast<int>(rng.uniform() * 4.0);
  return basis_state(static_cast<BasisIndex>(std::min(k, 3)));
}

Outcome InstrumentModel::detect(const TwoSpinState& state, double t_s,
                                RandomStream& rng) const {
  const auto p = state.probabilities();
  const double u = rng.uniform();
  int idx = 3;
  double acc = 0;
  for (int i = 0; i < 3; ++i) {
    acc += p[static_cast<std::size_t>(i)];
    if (u < acc) {
      idx = i;
      break;
    }
  }
  const double du = det_up.value(t_s);
  const double dd = det_down.value(t_s);
  // report each spin, flipping with the state-dependent error probability
  int spin1 = (idx >> 1) & 1;
  int spin2 = idx & 1;
  if (rng.bernoulli(spin1 == 0 ? 1.0 - du : 1.0 - dd)) spin1 ^= 1;
  if (rng.bernoulli(spin2 == 0 ? 1.0 - du : 1.0 - dd)) spin2 ^= 1;
  if (spin1 == 0 && spin2 == 0) return Outcome::kBothUp;
  if (spin1 == 1 && spin2 == 1) return Outcome::kBothDown;
  return Outcome::kOneOne;
}

std::array<double, 3> InstrumentModel::outcome_probabilities(const TwoSpinState& state,
                                                             double t_s) const {
  const auto p = state.probabilities();
  const auto c = confusion_matrix(det_up.value(t_s), det_down.value(t_s));
  const std::array<double, 3> truth = {p[kUU], p[kDD], p[kUD] + p[kDU]};
  std::array<double, 3> out{};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      out[static_cast<std::size_t>(j)] +=
          truth[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

double InstrumentModel::detection_contrast(double t_s) const {
  const double a = det_up.value(t_s) + det_down.value(t_s) - 1.0;
  return a * a;
}

double InstrumentModel::assumed_contrast(double t_s) const {
  const double a = mle_up.value(t_s) + mle_down.value(t_s) - 1.0;
  return a * a;
}

}  // namespace spinpair

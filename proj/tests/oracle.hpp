// Independent reference implementations used only by the tests. The matrix
// exponential goes through a complex Jacobi eigendecomposition so it shares
// no code path with the closed-form propagators under test.
#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "spinpair/physics.hpp"

namespace oracle {

using spinpair::cplx;
using spinpair::Mat4;
using spinpair::Vec4;

/// Jacobi eigendecomposition of a Hermitian 4x4: m = v diag(w) v^dagger.
inline void hermitian_eig(Mat4 m, std::array<double, 4>& w, Mat4& v) {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) v[r][c] = r == c ? 1.0 : 0.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += std::norm(m[p][q]);
    if (off < 1e-30) break;

    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) {
        const double apq = std::abs(m[p][q]);
        if (apq < 1e-300) continue;
        // phase that makes the (p,q) element real, then a real rotation
        const cplx phase = m[p][q] / apq;
        const double app = m[p][p].real();
        const double aqq = m[q][q].real();
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // columns p and q of the accumulated unitary and of m
        for (int r = 0; r < 4; ++r) {
          const cplx mp = m[r][p];
          const cplx mq = m[r][q];
          m[r][p] = c * mp - s * std::conj(phase) * mq;
          m[r][q] = s * phase * mp + c * mq;
          const cplx vp = v[r][p];
          const cplx vq = v[r][q];
          v[r][p] = c * vp - s * std::conj(phase) * vq;
          v[r][q] = s * phase * vp + c * vq;
        }
        for (int r = 0; r < 4; ++r) {
          const cplx mp = m[p][r];
          const cplx mq = m[q][r];
          m[p][r] = c * mp - s * phase * mq;
          m[q][r] = s * std::conj(phase) * mp + c * mq;
        }
      }
  }
  for (int i = 0; i < 4; ++i) w[i] = m[i][i].real();
}

/// exp(-i h t) for Hermitian h.
inline Mat4 expi(const Mat4& h, double t) {
  std::array<double, 4> w{};
  Mat4 v{};
  hermitian_eig(h, w, v);
  Mat4 u{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx acc = 0;
      for (int k = 0; k < 4; ++k)
        acc += v[r][k] * std::polar(1.0, -w[k] * t) * std::conj(v[c][k]);
      u[r][c] = acc;
    }
  return u;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx acc = 0;
      for (int k = 0; k < 4; ++k) acc += a[r][k] * b[k][c];
      out[r][c] = acc;
    }
  return out;
}

inline double max_abs_diff(const Mat4& a, const Mat4& b) {
  double worst = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(a[r][c] - b[r][c]));
  return worst;
}

}  // namespace oracle

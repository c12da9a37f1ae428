#include "spinpair/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace spinpair {

namespace {

void check_table(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& sigma, std::size_t min_points) {
  if (x.size() != y.size() || x.size() != sigma.size())
    throw std::invalid_argument("fit: input arrays must have equal length");
  if (x.size() < min_points) throw std::invalid_argument("fit: not enough points");
  for (double s : sigma)
    if (!(s > 0)) throw std::invalid_argument("fit: sigmas must be positive");
}

/// Solves the weighted normal equations for y = p0 f0(x) + p1 f1(x).
struct Linear2 {
  double p0, p1, var0, var1, cov, chi2;
};

template <typename F0, typename F1>
Linear2 solve_linear2(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& sigma, F0 f0, F1 f1) {
  double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0, sw = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const double u = f0(x[i]);
    const double v = f1(x[i]);
    sw += w;
    s00 += w * u * u;
    s01 += w * u * v;
    s11 += w * v * v;
    b0 += w * u * y[i];
    b1 += w * v * y[i];
  }
  // a column whose weighted mean square sits at rounding scale was never
  // really sampled (e.g. sin(phi) on a {0, pi} grid)
  if (!(s00 > 1e-12 * sw) || !(s11 > 1e-12 * sw))
    throw std::invalid_argument("fit: design column is numerically null");
  const double det = s00 * s11 - s01 * s01;
  if (!(std::abs(det) > 1e-20 * s00 * s11))
    throw std::invalid_argument("fit: degenerate design matrix");
  Linear2 out{};
  out.p0 = (s11 * b0 - s01 * b1) / det;
  out.p1 = (s00 * b1 - s01 * b0) / det;
  out.var0 = s11 / det;
  out.var1 = s00 / det;
  out.cov = -s01 / det;
  out.chi2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - out.p0 * f0(x[i]) - out.p1 * f1(x[i])) / sigma[i];
    out.chi2 += r * r;
  }
  return out;
}

}  // namespace

double FringeFit::amplitude() const { return std::hypot(a, b); }

double FringeFit::amplitude_sigma() const {
  const double r = amplitude();
  if (r == 0) return std::sqrt(std::max(sigma_a * sigma_a, sigma_b * sigma_b));
  const double var = (a * a * sigma_a * sigma_a + b * b * sigma_b * sigma_b +
                      2.0 * a * b * cov_ab) /
                     (r * r);
  return std::sqrt(std::max(0.0, var));
}

double FringeFit::phase() const { return std::atan2(b, a); }

FringeFit fit_fringe(const std::vector<double>& phi_rad, const std::vector<double>& y,
                     const std::vector<double>& sigma) {
  check_table(phi_rad, y, sigma, 2);
  const auto lin = solve_linear2(
      phi_rad, y, sigma, [](double p) { return std::sin(p); },
      [](double p) { return std::cos(p); });
  FringeFit out;
  out.a = lin.p0;
  out.b = lin.p1;
  out.sigma_a = std::sqrt(lin.var0);
  out.sigma_b = std::sqrt(lin.var1);
  out.cov_ab = lin.cov;
  out.chi2 = lin.chi2;
  out.dof = std::max<long>(static_cast<long>(phi_rad.size()) - 2, 0);
  return out;
}

AmplitudeFit fit_fringe_amplitude(const std::vector<double>& phi_rad,
                                  const std::vector<double>& y,
                                  const std::vector<double>& sigma,
                                  double phase_offset_rad) {
  check_table(phi_rad, y, sigma, 3);
  std::set<double> distinct(phi_rad.begin(), phi_rad.end());
  if (distinct.size() < 3)
    throw std::invalid_argument("fringe fit: need at least three distinct phases");
  double ss = 0, sy = 0, sw = 0;
  for (std::size_t i = 0; i < phi_rad.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const double s = std::sin(phi_rad[i] + phase_offset_rad);
    sw += w;
    ss += w * s * s;
    sy += w * s * y[i];
  }
  if (!(ss > 1e-12 * sw))
    throw std::invalid_argument("fringe fit: rank-deficient phase grid");
  AmplitudeFit out;
  out.amplitude = sy / ss;
  out.sigma = 1.0 / std::sqrt(ss);
  for (std::size_t i = 0; i < phi_rad.size(); ++i) {
    const double r =
        (y[i] - out.amplitude * std::sin(phi_rad[i] + phase_offset_rad)) / sigma[i];
    out.chi2 += r * r;
  }
  out.dof = std::max<long>(static_cast<long>(phi_rad.size()) - 1, 0);
  return out;
}

FitResult fit_decay(const std::vector<double>& t_s, const std::vector<double>& y,
                    const std::vector<double>& sigma) {
  check_table(t_s, y, sigma, 2);

  // log-linear seed from the positive samples
  double sw = 0, st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < t_s.size(); ++i) {
    if (y[i] <= 0) continue;
    const double w = y[i] * y[i] / (sigma[i] * sigma[i]);
    const double l = std::log(y[i]);
    sw += w;
    st += w * t_s[i];
    sl += w * l;
    stt += w * t_s[i] * t_s[i];
    stl += w * t_s[i] * l;
  }
  double v = 1.0, k = 0.0;
  const double det = sw * stt - st * st;
  if (sw > 0 && std::abs(det) > 0) {
    k = -(sw * stl - st * sl) / det;
    v = std::exp((sl + k * st) / sw);
  }

  auto chi2_of = [&](double vv, double kk) {
    double c = 0;
    for (std::size_t i = 0; i < t_s.size(); ++i) {
      const double r = (y[i] - vv * std::exp(-kk * t_s[i])) / sigma[i];
      c += r * r;
    }
    return c;
  };

  // damped Gauss-Newton on (v, k)
  double lambda = 1e-3;
  double chi2 = chi2_of(v, k);
  bool converged = false;
  double h00 = 0, h01 = 0, h11 = 0;
  for (int it = 0; it < 200; ++it) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (std::size_t i = 0; i < t_s.size(); ++i) {
      const double e = std::exp(-k * t_s[i]);
      const double r = (y[i] - v * e) / sigma[i];
      const double j0 = -e / sigma[i];
      const double j1 = v * e * t_s[i] / sigma[i];
      g0 += j0 * r;
      g1 += j1 * r;
      h00 += j0 * j0;
      h01 += j0 * j1;
      h11 += j1 * j1;
    }
    bool stepped = false;
    for (int trial = 0; trial < 30; ++trial) {
      const double a00 = h00 * (1 + lambda);
      const double a11 = h11 * (1 + lambda);
      const double d = a00 * a11 - h01 * h01;
      if (!(std::abs(d) > 0)) break;
      const double dv = (-g0 * a11 + g1 * h01) / d;
      const double dk = (-g1 * a00 + g0 * h01) / d;
      const double nv = v + dv;
      const double nk = k + dk;
      const double nchi = chi2_of(nv, nk);
      if (nchi <= chi2 + 1e-14) {
        const bool small = std::abs(dv) < 1e-12 * std::max(1.0, std::abs(v)) &&
                           std::abs(dk) < 1e-12 * std::max(1e-6, std::abs(k));
        v = nv;
        k = nk;
        chi2 = nchi;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (small || chi2 < 1e-24) converged = true;
        break;
      }
      lambda *= 10;
    }
    if (!stepped || converged) {
      converged = converged || !stepped;
      break;
    }
  }

  FitResult out;
  const double hdet = h00 * h11 - h01 * h01;
  double var_v = 0, var_k = 0;
  if (std::abs(hdet) > 0) {
    var_v = h11 / hdet;
    var_k = h00 / hdet;
  }
  const double tau = k != 0 ? 1.0 / k : std::numeric_limits<double>::infinity();
  const double sigma_tau = k != 0 ? std::sqrt(std::max(0.0, var_k)) / (k * k)
                                  : std::numeric_limits<double>::infinity();
  out.params = {v, tau};
  out.sigmas = {std::sqrt(std::max(0.0, var_v)), sigma_tau};
  out.chi2 = chi2;
  out.dof = std::max<long>(static_cast<long>(t_s.size()) - 2, 0);
  out.converged = converged;
  return out;
}

double two_point_decay_time(double t1_s, double a1, double t2_s, double a2) {
  if (a1 <= 0 || a2 <= 0)
    throw std::invalid_argument("decay time: amplitudes must be positive");
  if (t1_s == t2_s) throw std::invalid_argument("decay time: times must differ");
  const double l = std::log(a1 / a2);
  if (l == 0) return std::numeric_limits<double>::infinity();
  return (t2_s - t1_s) / l;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& sigma) {
  check_table(x, y, sigma, 2);
  std::vector<double> lx, ly, ls;
  lx.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw std::invalid_argument("power law: data must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    ls.push_back(sigma[i] / y[i]);
  }
  const auto lin = solve_linear2(
      lx, ly, ls, [](double u) { return -u; }, [](double) { return 1.0; });
  FitResult out;
  out.params = {lin.p0, lin.p1};  // exponent n, ln c
  out.sigmas = {std::sqrt(lin.var0), std::sqrt(lin.var1)};
  out.chi2 = lin.chi2;
  out.dof = std::max<long>(static_cast<long>(x.size()) - 2, 0);
  return out;
}

XiEstimate xi_from_amplitude(double amplitude, double sigma_a, double t_s, double contrast) {
  if (!(t_s > 0)) throw std::invalid_argument("xi estimate: t_s must be positive");
  if (!(contrast > 0)) throw std::invalid_argument("xi estimate: contrast must be positive");
  if (sigma_a < 0) throw std::invalid_argument("xi estimate: sigma must be non-negative");
  const double r = amplitude / contrast;
  if (std::abs(r) > 1.0)
    throw std::domain_error("xi estimate: amplitude exceeds contrast (unphysical)");
  XiEstimate out;
  out.xi_rad_s = std::asin(r) / (4.0 * t_s);
  const double root = std::sqrt(std::max(0.0, 1.0 - r * r));
  out.sigma_rad_s = root > 0 ? sigma_a / (contrast * 4.0 * t_s * root)
                             : std::numeric_limits<double>::infinity();
  return out;
}

FitResult fit_xi_vs_time(const std::vector<double>& t_s, const std::vector<double>& v,
                         const std::vector<double>& sigma,
                         const std::vector<double>& contrast) {
  check_table(t_s, v, sigma, 2);
  if (contrast.size() != t_s.size())
    throw std::invalid_argument("xi fit: contrast array length mismatch");
  for (std::size_t i = 0; i < t_s.size(); ++i) {
    if (!(t_s[i] > 0)) throw std::invalid_argument("xi fit: times must be positive");
    if (!(contrast[i] > 0)) throw std::invalid_argument("xi fit: contrasts must be positive");
  }

  // seed from the most sensitive (largest T) point
  std::size_t imax = 0;
  for (std::size_t i = 1; i < t_s.size(); ++i)
    if (t_s[i] > t_s[imax]) imax = i;
  double xi = std::asin(std::clamp(v[imax] / contrast[imax], -1.0, 1.0)) / (4.0 * t_s[imax]);

  auto chi2_of = [&](double x) {
    double c = 0;
    for (std::size_t i = 0; i < t_s.size(); ++i) {
      const double r = (v[i] - contrast[i] * std::sin(4.0 * x * t_s[i])) / sigma[i];
      c += r * r;
    }
    return c;
  };

  double chi2 = chi2_of(xi);
  bool converged = false;
  double jj = 0;
  for (int it = 0; it < 100; ++it) {
    double jr = 0;
    jj = 0;
    for (std::size_t i = 0; i < t_s.size(); ++i) {
      const double j = contrast[i] * 4.0 * t_s[i] * std::cos(4.0 * xi * t_s[i]) / sigma[i];
      const double r = (v[i] - contrast[i] * std::sin(4.0 * xi * t_s[i])) / sigma[i];
      jr += j * r;
      jj += j * j;
    }
    if (!(jj > 0)) break;
    double step = jr / jj;
    bool stepped = false;
    for (int half = 0; half < 30; ++half) {
      const double nx = xi + step;
      const double nc = chi2_of(nx);
      if (nc <= chi2 + 1e-14) {
        if (std::abs(step) < 1e-14 * std::max(1e-6, std::abs(xi))) converged = true;
        xi = nx;
        chi2 = nc;
        stepped = true;
        break;
      }
      step *= 0.5;
    }
    if (!stepped || converged) {
      converged = converged || !stepped;
      break;
    }
  }

  FitResult out;
  out.params = {xi};
  out.sigmas = {jj > 0 ? 1.0 / std::sqrt(jj) : std::numeric_limits<double>::infinity()};
  out.chi2 = chi2;
  out.dof = std::max<long>(static_cast<long>(t_s.size()) - 1, 0);
  out.converged = converged;
  return out;
}

MleResult mle_populations(const std::array<long, 3>& counts,
                          const std::array<std::array<double, 3>, 3>& confusion,
                          int max_iter, double tol) {
  long total = 0;
  for (long k : counts) {
    if (k < 0) throw std::invalid_argument("mle: counts must be non-negative");
    total += k;
  }
  if (total == 0) throw std::invalid_argument("mle: need at least one count");
  for (const auto& row : confusion) {
    double s = 0;
    for (double c : row) {
      if (c < 0) throw std::invalid_argument("mle: confusion entries must be non-negative");
      s += c;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("mle: confusion rows must sum to one");
  }

  MleResult out;
  std::array<double, 3> p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const double n = static_cast<double>(total);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::array<double, 3> q{};
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        q[static_cast<std::size_t>(j)] +=
            p[static_cast<std::size_t>(i)] * confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    std::array<double, 3> next{};
    double delta = 0;
    for (int i = 0; i < 3; ++i) {
      double acc = 0;
      for (int j = 0; j < 3; ++j) {
        if (counts[static_cast<std::size_t>(j)] == 0) continue;
        if (q[static_cast<std::size_t>(j)] <= 0) continue;
        acc += confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               static_cast<double>(counts[static_cast<std::size_t>(j)]) / q[static_cast<std::size_t>(j)];
      }
      next[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] * acc / n;
      delta = std::max(delta, std::abs(next[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]));
    }
    double norm = next[0] + next[1] + next[2];
    if (norm <= 0) break;
    for (auto& v : next) v /= norm;
    p = next;
    if (delta < tol) {
      ++it;
      break;
    }
  }

  double ll = 0;
  for (int j = 0; j < 3; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0) continue;
    double q = 0;
    for (int i = 0; i < 3; ++i)
      q += p[static_cast<std::size_t>(i)] * confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ll += q > 0 ? static_cast<double>(counts[static_cast<std::size_t>(j)]) * std::log(q)
                : -std::numeric_limits<double>::infinity();
  }

  out.populations = p;
  out.log_likelihood = ll;
  out.iterations = it;
  out.boundary = std::any_of(p.begin(), p.end(), [](double v) { return v < 1e-6; });
  return out;
}

std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& m) {
  auto minor = [&m](int r0, int r1, int c0, int c1) {
    return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
  };
  const double det =
      m[0][0] * minor(1, 2, 1, 2) - m[0][1] * minor(1, 2, 0, 2) + m[0][2] * minor(1, 2, 0, 1);
  if (std::abs(det) < 1e-12) throw std::runtime_error("invert3: singular matrix");
  std::array<std::array<double, 3>, 3> inv{};
  inv[0][0] = minor(1, 2, 1, 2) / det;
  inv[0][1] = -minor(0, 2, 1, 2) / det;
  inv[0][2] = minor(0, 1, 1, 2) / det;
  inv[1][0] = -minor(1, 2, 0, 2) / det;
  inv[1][1] = minor(0, 2, 0, 2) / det;
  inv[1][2] = -minor(0, 1, 0, 2) / det;
  inv[2][0] = minor(1, 2, 0, 1) / det;
  inv[2][1] = -minor(0, 2, 0, 1) / det;
  inv[2][2] = minor(0, 1, 0, 1) / det;
  return inv;
}

std::vector<AdevPoint> allan_deviation(const std::vector<double>& series, double tau0_s) {
  if (series.size() < 3) throw std::invalid_argument("adev: need at least three samples");
  if (!(tau0_s > 0)) throw std::invalid_argument("adev: tau0 must be positive");
  const auto n = series.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series[i];

  std::vector<AdevPoint> out;
  for (std::size_t m = 1; 2 * m <= n; m *= 2) {
    const std::size_t pairs = n - 2 * m + 1;
    double acc = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const double first = (prefix[k + m] - prefix[k]) / static_cast<double>(m);
      const double second = (prefix[k + 2 * m] - prefix[k + m]) / static_cast<double>(m);
      const double d = second - first;
      acc += d * d;
    }
    AdevPoint pt;
    pt.tau_s = static_cast<double>(m) * tau0_s;
    pt.adev = std::sqrt(acc / (2.0 * static_cast<double>(pairs)));
    pt.window = static_cast<long>(m);
    out.push_back(pt);
  }
  return out;
}

double swap_witness(double p_even, double visibility) { return p_even - visibility; }

}  // namespace spinpair

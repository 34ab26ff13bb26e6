#pragma once

// Characteristic function of the diagonal-subspace linearization and the Hopf
// machinery built on it: critical frequencies, critical delays, transversality,
// and curve tracing over mu at fixed gain.
//
// Delta(lambda) = lambda^2 + mu lambda - b0 - btau e^{-lambda tau},
//   b0   = K mu (-1 + cos2phi),
//   btau = K mu ( 1 + cos2phi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pllhopf/errors.hpp"
#include "pllhopf/model.hpp"

namespace pllhopf {

enum class CrossingDirection { LeftToRight, RightToLeft, Degenerate };

struct HopfPoint {
  double mu = 0.0;
  double tau = 0.0;
  double omega = 0.0;
  int root = 0;       // index of the frequency root, ascending in omega
  int j = 0;          // delay-branch index, tau_j = tau_0 + 2 pi j / omega
  CrossingDirection direction = CrossingDirection::Degenerate;
  double re_dlambda = 0.0;  // Re(d lambda / d tau) at the crossing
  double residual = 0.0;    // |Delta(i omega)|
};

inline double coeff_b0(const ModelParams& p, const Equilibrium& eq) {
  return p.K * p.mu * (-1.0 + eq.cos2phi);
}
inline double coeff_btau(const ModelParams& p, const Equilibrium& eq) {
  return p.K * p.mu * (1.0 + eq.cos2phi);
}

inline std::complex<double> char_fn(std::complex<double> lambda, const ModelParams& p,
                                    const Equilibrium& eq) {
  const double b0 = coeff_b0(p, eq);
  const double bt = coeff_btau(p, eq);
  return lambda * lambda + p.mu * lambda - b0 - bt * std::exp(-lambda * p.tau);
}

// Positive real roots of w^4 + (2 b0 + mu^2) w^2 + (b0^2 - btau^2) = 0,
// sorted ascending.  Zero, one, or two values.
inline std::vector<double> hopf_frequencies(const ModelParams& p, const Equilibrium& eq) {
  const double b0 = coeff_b0(p, eq);
  const double bt = coeff_btau(p, eq);
  const double B = 2.0 * b0 + p.mu * p.mu;
  const double C = b0 * b0 - bt * bt;
  const double disc = B * B - 4.0 * C;
  std::vector<double> out;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  // roots of s^2 + B s + C without cancellation
  double s1, s2;
  if (B >= 0.0) {
    s1 = (-B - sq) / 2.0;
    s2 = (s1 != 0.0) ? C / s1 : (-B + sq) / 2.0;
  } else {
    s2 = (-B + sq) / 2.0;
    s1 = (s2 != 0.0) ? C / s2 : (-B - sq) / 2.0;
  }
  const double scale = 1.0 + std::fabs(B) + std::fabs(C);
  for (double s : {s1, s2})
    if (s > 1e-14 * scale) out.push_back(std::sqrt(s));
  std::sort(out.begin(), out.end());
  // a double root of the quartic yields one frequency
  if (out.size() == 2 && out[1] - out[0] < 1e-10 * (1.0 + out[1])) out.pop_back();
  return out;
}

inline double quartic_residual(double omega, const ModelParams& p, const Equilibrium& eq) {
  const double b0 = coeff_b0(p, eq);
  const double bt = coeff_btau(p, eq);
  const double w2 = omega * omega;
  return w2 * w2 + (2.0 * b0 + p.mu * p.mu) * w2 + (b0 * b0 - bt * bt);
}

// d lambda / d tau at lambda = i omega from implicit differentiation of Delta.
inline std::complex<double> dlambda_dtau(const ModelParams& p, const Equilibrium& eq,
                                         double omega, double tau) {
  const double bt = coeff_btau(p, eq);
  const std::complex<double> lam(0.0, omega);
  const std::complex<double> e = bt * std::exp(-lam * tau);
  return -lam * e / (2.0 * lam + p.mu + tau * e);
}

// tau from the phase condition e^{-i w tau} = (-w^2 + i mu w - b0)/btau,
// with the principal angle mapped into [0, 2 pi) and j counting full turns.
inline HopfPoint hopf_tau(const ModelParams& p, const Equilibrium& eq, double omega, int j) {
  const double b0 = coeff_b0(p, eq);
  const double bt = coeff_btau(p, eq);
  {
    const double q = quartic_residual(omega, p, eq);
    const double w2 = omega * omega;
    const double scale = 1.0 + w2 * w2 + std::fabs(2.0 * b0 + p.mu * p.mu) * w2 +
                         std::fabs(b0 * b0 - bt * bt);
    if (std::fabs(q) > 1e-8 * scale)
      throw InvalidFrequency("hopf_tau: omega does not satisfy the frequency condition");
  }
  const std::complex<double> rhs =
      std::complex<double>(-omega * omega - b0, p.mu * omega) / bt;
  // rhs = cos(w tau) - i sin(w tau)
  double theta = std::atan2(-rhs.imag(), rhs.real());
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;

  HopfPoint pt;
  pt.mu = p.mu;
  pt.omega = omega;
  pt.j = j;
  pt.tau = (theta + 2.0 * std::numbers::pi * j) / omega;

  ModelParams pp = p;
  pp.tau = pt.tau;
  pt.residual = std::abs(char_fn(std::complex<double>(0.0, omega), pp, eq));

  const double re = dlambda_dtau(p, eq, omega, pt.tau).real();
  pt.re_dlambda = re;
  if (std::fabs(re) < 1e-10)
    pt.direction = CrossingDirection::Degenerate;
  else
    pt.direction = re > 0.0 ? CrossingDirection::LeftToRight : CrossingDirection::RightToLeft;
  return pt;
}

// Re(d lambda / d tau) with the direction classification; throws on a tangential
// crossing, which signals a double frequency root.
inline double transversality(const HopfPoint& pt, const ModelParams& p, const Equilibrium& eq) {
  const double re = dlambda_dtau(p, eq, pt.omega, pt.tau).real();
  if (std::fabs(re) < 1e-10)
    throw DegenerateCrossing("transversality: |Re dlambda/dtau| < 1e-10");
  return re;
}

// One point per admissible (mu, frequency root, j <= j_max); grouped by
// (root index, j), each group sorted by mu.
inline std::vector<HopfPoint> trace_curves(double K, double mu_min, double mu_max, int steps,
                                           int j_max, Branch branch, int n_index = 0) {
  if (!(mu_min > 0.0) || !(mu_max > mu_min)) throw InvalidParams("trace_curves: need 0 < mu_min < mu_max");
  if (steps < 2) throw InvalidParams("trace_curves: steps must be >= 2");
  if (j_max < 0) throw InvalidParams("trace_curves: j_max must be >= 0");

  std::vector<HopfPoint> out;
  const int max_roots = 2;
  for (int root = 0; root < max_roots; ++root) {
    for (int j = 0; j <= j_max; ++j) {
      for (int i = 0; i < steps; ++i) {
        const double mu = mu_min + (mu_max - mu_min) * i / (steps - 1);
        ModelParams p;
        p.K = K;
        p.mu = mu;
        p.branch = branch;
        p.n_index = n_index;
        const Equilibrium eq = equilibrium(p);
        const std::vector<double> freqs = hopf_frequencies(p, eq);
        if (static_cast<int>(freqs.size()) <= root) continue;
        HopfPoint pt = hopf_tau(p, eq, freqs[root], j);
        pt.root = root;
        out.push_back(pt);
      }
    }
  }
  return out;
}

}  // namespace pllhopf

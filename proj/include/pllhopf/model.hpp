#pragma once

// The delay-coupled second-order oscillator network: parameters, synchronized
// equilibria, the linearization on the diagonal (fixed-point) subspace, the cubic
// coupling nonlinearity, and right-hand sides for simulation.

#include <cmath>
#include <numbers>
#include <vector>

#include "pllhopf/errors.hpp"
#include "pllhopf/smallmat.hpp"

namespace pllhopf {

enum class Branch { plus, minus };

struct ModelParams {
  double K = 1.05;       // coupling gain, >= 1
  double mu = 0.3;       // damping rate, > 0
  double tau = 0.0;      // delay, >= 0
  int N = 2;             // node count, >= 2
  Branch branch = Branch::minus;
  int n_index = 0;       // equilibrium family offset

  void validate() const {
    if (!(K >= 1.0)) throw InvalidParams("K must be >= 1");
    if (!(mu > 0.0)) throw InvalidParams("mu must be > 0");
    if (!(tau >= 0.0)) throw InvalidParams("tau must be >= 0");
    if (N < 2) throw InvalidParams("N must be >= 2");
  }
};

struct Equilibrium {
  double phi = 0.0;
  double sin2phi = 0.0;  // equals -1/K on both branches
  double cos2phi = 0.0;  // +sqrt(1-1/K^2) on plus, -sqrt(1-1/K^2) on minus
};

struct LinMats {
  Mat A0;    // [[0,1],[K mu (-1+cos2phi), -mu]]
  Mat Atau;  // [[0,0],[K mu (1+cos2phi), 0]]
};

// phi = (asin(-1/K) + 2 n pi)/2 on the plus branch,
// phi = (pi - asin(-1/K) + 2 n pi)/2 on the minus branch.
inline Equilibrium equilibrium(const ModelParams& p) {
  if (!(p.K >= 1.0)) throw InvalidParams("equilibrium: K must be >= 1");
  const double asn = std::asin(-1.0 / p.K);
  const double two_n_pi = 2.0 * std::numbers::pi * p.n_index;
  Equilibrium eq;
  if (p.branch == Branch::plus)
    eq.phi = 0.5 * (asn + two_n_pi);
  else
    eq.phi = 0.5 * (std::numbers::pi - asn + two_n_pi);
  eq.sin2phi = std::sin(2.0 * eq.phi);
  eq.cos2phi = std::cos(2.0 * eq.phi);
  return eq;
}

inline LinMats linearization(const ModelParams& p, const Equilibrium& eq) {
  LinMats lm{Mat(2, 2), Mat(2, 2)};
  lm.A0(0, 1) = 1.0;
  lm.A0(1, 0) = p.K * p.mu * (-1.0 + eq.cos2phi);
  lm.A0(1, 1) = -p.mu;
  lm.Atau(1, 0) = p.K * p.mu * (1.0 + eq.cos2phi);
  return lm;
}

// Quadratic plus cubic part of the diagonal-subspace coupling, u = x1(0), v = x1(-tau).
// The K mu factor is kept on the nonlinear terms so that the expression is the exact
// third-order truncation of the diagonal restriction of the network equations.
inline double f2_nonlinear(double u, double v, const Equilibrium& eq, const ModelParams& p) {
  const double s = v + u;
  const double d = v - u;
  return p.K * p.mu *
         (-0.5 * s * s * eq.sin2phi - (d * d * d + s * s * s * eq.cos2phi) / 6.0);
}

// Full network right-hand side, raw phase coordinates:
//   ddphi_i = -mu dphi_i + mu + (K mu / (N-1)) sum_{j != i} f(phi_i, phi_j(t - tau)),
//   f(a, b) = sin(b - a) + sin(b + a).
// The sum over j is accumulated in the same index order for every node so that
// identical inputs give bitwise identical outputs on all nodes.
inline void full_rhs(const std::vector<double>& phases, const std::vector<double>& rates,
                     const std::vector<double>& delayed_phases, const ModelParams& p,
                     std::vector<double>& dphases, std::vector<double>& drates) {
  const size_t n = static_cast<size_t>(p.N);
  if (phases.size() != n || rates.size() != n || delayed_phases.size() != n)
    throw DimensionMismatch("full_rhs: arrays must have length N");
  dphases.resize(n);
  drates.resize(n);
  const double gain = p.K * p.mu / (p.N - 1);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j)
      acc += std::sin(delayed_phases[j] - phases[i]) + std::sin(delayed_phases[j] + phases[i]);
    acc -= std::sin(delayed_phases[i] - phases[i]) + std::sin(delayed_phases[i] + phases[i]);
    dphases[i] = rates[i];
    drates[i] = -p.mu * rates[i] + p.mu + gain * acc;
  }
}

// Cubic-truncated dynamics on the diagonal subspace, deviation coordinates:
//   dx1 = x2
//   dx2 = -mu x2 + b0 x1 + btau x1(-tau) + f2(x1, x1(-tau))
inline void fix_truncated_rhs(double x1, double x2, double x1_delayed, const ModelParams& p,
                              const Equilibrium& eq, double& dx1, double& dx2) {
  const double b0 = p.K * p.mu * (-1.0 + eq.cos2phi);
  const double bt = p.K * p.mu * (1.0 + eq.cos2phi);
  dx1 = x2;
  dx2 = -p.mu * x2 + b0 * x1 + bt * x1_delayed + f2_nonlinear(x1, x1_delayed, eq, p);
}

// Exact dynamics on the diagonal subspace, deviation coordinates about the equilibrium.
inline void fix_exact_rhs(double x1, double x2, double x1_delayed, const ModelParams& p,
                          const Equilibrium& eq, double& dx1, double& dx2) {
  dx1 = x2;
  dx2 = -p.mu * x2 + p.mu +
        p.K * p.mu *
            (std::sin(x1_delayed - x1) + std::sin(x1_delayed + x1 + 2.0 * eq.phi));
}

}  // namespace pllhopf

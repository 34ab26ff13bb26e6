#pragma once

// Second-order center-manifold data: quadratic partials of the nonlinearity in the
// center coordinates, the sinusoidal forcing of the quadratic-coefficient ODE, the
// particular solution (M, N), the homogeneous coefficient Kh from the boundary
// problem, and the first-component quadratic forms of the correction at theta = 0
// and theta = -tau.
//
// The stacked coefficient h = (h1; h2; h3) obeys
//   dh/dtheta = C h + p cos(w theta) + q sin(w theta),
//   h(theta)  = e^{C theta} Kh + M cos(w theta) + N sin(w theta),
// with the theta = 0 boundary rows  P h(0) + Q h(-tau) = p - r,
//   P = diag(A0, A0, A0) - C,  Q = diag(Atau, Atau, Atau),
//   r = (0, 2 f20, 0, f11, 0, 2 f02)^T.

#include <array>
#include <cmath>

#include "pllhopf/eigenspace.hpp"
#include "pllhopf/errors.hpp"
#include "pllhopf/model.hpp"
#include "pllhopf/smallmat.hpp"

namespace pllhopf {

using Vec6 = std::array<double, 6>;

// Sine-sign convention for evaluating critical-mode quantities at the delayed
// argument.  standard is the e^{+i w theta} convention of the general solutions;
// mirrored reverses the sine sign, matching computations that evaluate the mode
// with the conjugate convention.  All solves stay internally consistent either way.
enum class DelayTrig { standard, mirrored };

inline double delay_sine(DelayTrig trig) {
  return trig == DelayTrig::standard ? 1.0 : -1.0;
}

struct QuadCoeffs {
  double f20 = 0.0;  // (1/2) d2f/dy1^2
  double f11 = 0.0;  // d2f/dy1 dy2
  double f02 = 0.0;  // (1/2) d2f/dy2^2
};

struct ManifoldData {
  Vec6 M{}, N{}, Kh{};
  Vec6 p{}, q{};  // forcing amplitudes, kept for residual checks
  double omega = 0.0;
  double tau = 0.0;
};

struct W1Quad {
  // triples (w20, w11, w02): w1 = (w20 y1^2 + 2 w11 y1 y2 + w02 y2^2)/2
  std::array<double, 3> at0{};
  std::array<double, 3> atTau{};
};

// First components of s1, s2 at theta = -tau under the given sine convention.
inline Vec2 s_first_components_at_delay(const EigenData& ed, DelayTrig trig) {
  const double ct = std::cos(ed.omega * ed.tau);
  const double st = delay_sine(trig) * std::sin(ed.omega * ed.tau);
  // s1(-tau) = ct c1 + st c2,  s2(-tau) = -st c1 + ct c2
  return {ct * ed.c1[0] + st * ed.c2[0], -st * ed.c1[0] + ct * ed.c2[0]};
}

// Quadratic partials of f2 composed with x1(0) = y1 c11 + y2 c21,
// x1(-tau) = y1 s11(-tau) + y2 s21(-tau).  The quadratic part of f2 is
// -(K mu / 2) sin2phi (x1(0) + x1(-tau))^2, a rank-one form in (y1, y2).
inline QuadCoeffs f2_y_partials(const EigenData& ed, const Equilibrium& eq,
                                const ModelParams& p, DelayTrig trig = DelayTrig::standard) {
  const Vec2 sd = s_first_components_at_delay(ed, trig);
  const double sig1 = ed.c1[0] + sd[0];
  const double sig2 = ed.c2[0] + sd[1];
  const double k = -0.5 * p.K * p.mu * eq.sin2phi;
  QuadCoeffs qc;
  qc.f20 = k * sig1 * sig1;
  qc.f11 = 2.0 * k * sig1 * sig2;
  qc.f02 = k * sig2 * sig2;
  return qc;
}

// Forcing amplitudes of dh/dtheta = C h + p cos + q sin, read off by substituting
// s1, s2 into the right-hand sides of the three coefficient equations:
//   p = (2 f20 u; f11 u; 2 f02 u),  q = (2 f20 v; f11 v; 2 f02 v),
//   u = d12 c1 + d22 c2,  v = d22 c1 - d12 c2.
inline std::pair<Vec6, Vec6> build_pq(const QuadCoeffs& qc, const EigenData& ed) {
  const double d12 = ed.d1[1];
  const double d22 = ed.d2[1];
  const Vec2 u = axpy(d12, ed.c1, d22, ed.c2);
  const Vec2 v = axpy(d22, ed.c1, -d12, ed.c2);
  const std::array<double, 3> f{2.0 * qc.f20, qc.f11, 2.0 * qc.f02};
  Vec6 p{}, q{};
  for (int b = 0; b < 3; ++b) {
    p[2 * b] = f[b] * u[0];
    p[2 * b + 1] = f[b] * u[1];
    q[2 * b] = f[b] * v[0];
    q[2 * b + 1] = f[b] * v[1];
  }
  return {p, q};
}

// [[C, -w I], [w I, C]] (M; N) = -(p; q).  Nonsingular for w > 0 because the
// spectrum of C is {0, +-2iw}; a singular solve would signal a resonant mode.
inline std::pair<Vec6, Vec6> solve_MN(double omega, const Vec6& p, const Vec6& q) {
  if (!(omega > 0.0)) throw InvalidParams("solve_MN: omega must be positive");
  const Mat C = c_matrix(omega);
  Mat A(12, 12);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      A(i, j) = C(i, j);
      A(i + 6, j + 6) = C(i, j);
    }
  for (int i = 0; i < 6; ++i) {
    A(i, i + 6) = -omega;
    A(i + 6, i) = omega;
  }
  std::vector<double> rhs(12);
  for (int i = 0; i < 6; ++i) {
    rhs[i] = -p[i];
    rhs[i + 6] = -q[i];
  }
  const std::vector<double> sol = solve_linear(A, rhs);
  Vec6 M{}, N{};
  for (int i = 0; i < 6; ++i) {
    M[i] = sol[i];
    N[i] = sol[i + 6];
  }
  return {M, N};
}

namespace detail {

inline Mat stack_diag(const Mat& block) {
  Mat D(6, 6);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) D(2 * b + i, 2 * b + j) = block(i, j);
  return D;
}

inline Vec6 boundary_r(const QuadCoeffs& qc) {
  return {0.0, 2.0 * qc.f20, 0.0, qc.f11, 0.0, 2.0 * qc.f02};
}

// trigonometric part of h(-tau) under the chosen sine convention
inline Vec6 h_trig_at_delay(const Vec6& M, const Vec6& N, double omega, double tau,
                            DelayTrig trig) {
  const double ct = std::cos(omega * tau);
  const double st = delay_sine(trig) * std::sin(omega * tau);
  Vec6 out{};
  for (int i = 0; i < 6; ++i) out[i] = M[i] * ct - N[i] * st;
  return out;
}

}  // namespace detail

// (P + Q e^{-C tau}) Kh = (p - r) - P M - Q (M cos(w tau) - N sin(w tau))
inline Vec6 solve_Kh(const LinMats& lm, const Vec6& M, const Vec6& N, const QuadCoeffs& qc,
                     const EigenData& ed, double omega, double tau,
                     DelayTrig trig = DelayTrig::standard) {
  const Mat C = c_matrix(omega);
  const Mat P = detail::stack_diag(lm.A0) - C;
  const Mat Q = detail::stack_diag(lm.Atau);
  const Mat E = exp_c(omega, -tau);
  const auto [p, q] = build_pq(qc, ed);
  const Vec6 r = detail::boundary_r(qc);
  const Vec6 htrig = detail::h_trig_at_delay(M, N, omega, tau, trig);

  Mat A = P + Q * E;
  std::vector<double> rhs(6);
  for (int i = 0; i < 6; ++i) {
    double pm = 0.0, qh = 0.0;
    for (int j = 0; j < 6; ++j) {
      pm += P(i, j) * M[j];
      qh += Q(i, j) * htrig[j];
    }
    rhs[i] = p[i] - r[i] - pm - qh;
  }
  const std::vector<double> sol = solve_linear(A, rhs);
  Vec6 Kh{};
  for (int i = 0; i < 6; ++i) Kh[i] = sol[i];
  return Kh;
}

// h(theta) = e^{C theta} Kh + M cos(w theta) + N sin(w theta), theta in [-tau, 0]
inline Vec6 h_value(const ManifoldData& md, double theta) {
  const Mat E = exp_c(md.omega, theta);
  const double ct = std::cos(md.omega * theta);
  const double st = std::sin(md.omega * theta);
  Vec6 h{};
  for (int i = 0; i < 6; ++i) {
    double e = 0.0;
    for (int j = 0; j < 6; ++j) e += E(i, j) * md.Kh[j];
    h[i] = e + md.M[i] * ct + md.N[i] * st;
  }
  return h;
}

// max |dh/dtheta - C h - p cos - q sin| over a uniform theta grid in [-tau, 0]
inline double manifold_interior_residual(const ManifoldData& md, int samples = 10) {
  const Mat C = c_matrix(md.omega);
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double theta = -md.tau * k / samples;
    const Mat E = exp_c(md.omega, theta);
    const double ct = std::cos(md.omega * theta);
    const double st = std::sin(md.omega * theta);
    Vec6 h{}, hp{};
    for (int i = 0; i < 6; ++i) {
      double e = 0.0;
      for (int j = 0; j < 6; ++j) e += E(i, j) * md.Kh[j];
      h[i] = e + md.M[i] * ct + md.N[i] * st;
    }
    // h' = C e^{C theta} Kh - w M sin + w N cos
    for (int i = 0; i < 6; ++i) {
      double ce = 0.0;
      for (int j = 0; j < 6; ++j) {
        double e = 0.0;
        for (int l = 0; l < 6; ++l) e += E(j, l) * md.Kh[l];
        ce += C(i, j) * e;
      }
      hp[i] = ce - md.omega * md.M[i] * st + md.omega * md.N[i] * ct;
    }
    for (int i = 0; i < 6; ++i) {
      double ch = 0.0;
      for (int j = 0; j < 6; ++j) ch += C(i, j) * h[j];
      worst = std::max(worst, std::fabs(hp[i] - ch - md.p[i] * ct - md.q[i] * st));
    }
  }
  return worst;
}

// max | P h(0) + Q h(-tau) - (p - r) |
inline double manifold_boundary_residual(const ManifoldData& md, const LinMats& lm,
                                         const QuadCoeffs& qc,
                                         DelayTrig trig = DelayTrig::standard) {
  const Mat C = c_matrix(md.omega);
  const Mat P = detail::stack_diag(lm.A0) - C;
  const Mat Q = detail::stack_diag(lm.Atau);
  const Mat E = exp_c(md.omega, -md.tau);
  const Vec6 r = detail::boundary_r(qc);
  const Vec6 htrig = detail::h_trig_at_delay(md.M, md.N, md.omega, md.tau, trig);
  Vec6 h0{}, hT{};
  for (int i = 0; i < 6; ++i) {
    h0[i] = md.Kh[i] + md.M[i];
    double e = 0.0;
    for (int j = 0; j < 6; ++j) e += E(i, j) * md.Kh[j];
    hT[i] = e + htrig[i];
  }
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j) s += P(i, j) * h0[j] + Q(i, j) * hT[j];
    worst = std::max(worst, std::fabs(s - (md.p[i] - r[i])));
  }
  return worst;
}

// Full second-order solve at a Hopf point.
inline ManifoldData solve_manifold(const LinMats& lm, const QuadCoeffs& qc,
                                   const EigenData& ed, double omega, double tau,
                                   DelayTrig trig = DelayTrig::standard) {
  ManifoldData md;
  md.omega = omega;
  md.tau = tau;
  const auto [p, q] = build_pq(qc, ed);
  md.p = p;
  md.q = q;
  const auto [M, N] = solve_MN(omega, p, q);
  md.M = M;
  md.N = N;
  md.Kh = solve_Kh(lm, M, N, qc, ed, omega, tau, trig);
  return md;
}

// First-component (x1 row) quadratic forms of the correction at theta = 0 and -tau:
// entries 1, 3, 5 (1-based) of h(0) = Kh + M and of
// h(-tau) = e^{-C tau} Kh + M cos(w tau) - N sin(w tau).
inline W1Quad w1_quadratic(const ManifoldData& md, DelayTrig trig = DelayTrig::standard) {
  W1Quad w;
  const Mat E = exp_c(md.omega, -md.tau);
  const Vec6 htrig = detail::h_trig_at_delay(md.M, md.N, md.omega, md.tau, trig);
  for (int b = 0; b < 3; ++b) {
    const int idx = 2 * b;
    w.at0[b] = md.Kh[idx] + md.M[idx];
    double e = 0.0;
    for (int j = 0; j < 6; ++j) e += E(idx, j) * md.Kh[j];
    w.atTau[b] = e + htrig[idx];
  }
  return w;
}

}  // namespace pllhopf

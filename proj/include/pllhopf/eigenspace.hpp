#pragma once

// Real eigenfunction pair of the critical mode and its adjoint counterpart,
// the bilinear pairing between them, and the normalization <n, s> = I.
//
// General solutions on theta in [-tau, 0] and [0, tau]:
//   s1 = cos(w th) c1 - sin(w th) c2,   s2 = sin(w th) c1 + cos(w th) c2
//   n1 = cos(w th) d1 - sin(w th) d2,   n2 = sin(w th) d1 + cos(w th) d2
// The c pair is gauge-fixed (c11 = 1, c21 = 0); the d pair carries the two
// remaining degrees of freedom that the normalization determines.

#include <array>
#include <cmath>
#include <complex>

#include "pllhopf/errors.hpp"
#include "pllhopf/hopf.hpp"
#include "pllhopf/model.hpp"
#include "pllhopf/smallmat.hpp"

namespace pllhopf {

using Vec2 = std::array<double, 2>;

inline Vec2 axpy(double a, const Vec2& x, double b, const Vec2& y) {
  return {a * x[0] + b * y[0], a * x[1] + b * y[1]};
}

struct EigenData {
  double omega = 0.0;
  double tau = 0.0;
  Vec2 c1{}, c2{};  // c1 = (c11, c12), c2 = (c21, c22)
  Vec2 d1{}, d2{};
  bool normalized = false;
};

namespace detail {

// Blocks of the boundary system:  B = A0 + cos(w tau) Atau,  W = w I + sin(w tau) Atau.
inline void boundary_blocks(const ModelParams& p, const Equilibrium& eq, double omega,
                            Mat& B, Mat& W) {
  const LinMats lm = linearization(p, eq);
  const double ct = std::cos(omega * p.tau);
  const double st = std::sin(omega * p.tau);
  B = lm.A0 + ct * lm.Atau;
  W = st * lm.Atau;
  W(0, 0) += omega;
  W(1, 1) += omega;
}

// residual of [B, sw W; -sw W, B] (x1; x2) = 0 where sw = +1 for the eigenpair
// system and -1 for the adjoint (transposed) system
inline double block_residual(const Mat& B, const Mat& W, const Vec2& x1, const Vec2& x2,
                             bool transpose) {
  auto ap = [&](const Mat& M, const Vec2& v, int row) {
    return transpose ? M(0, row) * v[0] + M(1, row) * v[1]
                     : M(row, 0) * v[0] + M(row, 1) * v[1];
  };
  const double sw = transpose ? -1.0 : 1.0;
  double worst = 0.0;
  for (int r = 0; r < 2; ++r) {
    worst = std::max(worst, std::fabs(ap(B, x1, r) + sw * ap(W, x2, r)));
    worst = std::max(worst, std::fabs(-sw * ap(W, x1, r) + ap(B, x2, r)));
  }
  return worst;
}

}  // namespace detail

// Solve the boundary systems for the c and d coefficient pairs at a Hopf point.
// c comes from the gauge-fixed homogeneous system; d is the matching adjoint pair
// with its two free parameters left at a reference value for normalize() to fix.
inline EigenData eigenfunction_coeffs(const ModelParams& p, const Equilibrium& eq,
                                      double omega) {
  const std::complex<double> lam(0.0, omega);
  const double rres = std::abs(char_fn(lam, p, eq));
  if (rres > 1e-8) throw NotAHopfPoint("eigenfunction_coeffs: |Delta(i omega)| > 1e-8");
  // simple eigenvalue requires Delta'(i omega) != 0
  const double bt = coeff_btau(p, eq);
  const std::complex<double> dprime =
      2.0 * lam + p.mu + p.tau * bt * std::exp(-lam * p.tau);
  if (std::abs(dprime) < 1e-10)
    throw RankDeficiency("eigenfunction_coeffs: Delta'(i omega) vanishes");

  Mat B(2, 2), W(2, 2);
  detail::boundary_blocks(p, eq, omega, B, W);

  // gauge c11 = 1, c21 = 0; rows 0 and 2 of the block system determine (c12, c22)
  Mat S(2, 2);
  S(0, 0) = B(0, 1);
  S(0, 1) = W(0, 1);
  S(1, 0) = -W(0, 1);
  S(1, 1) = B(0, 1);
  const std::vector<double> rhs{-B(0, 0), W(0, 0)};
  const std::vector<double> sol = solve_linear(S, rhs);

  EigenData ed;
  ed.omega = omega;
  ed.tau = p.tau;
  ed.c1 = {1.0, sol[0]};
  ed.c2 = {0.0, sol[1]};
  // adjoint left-nullvector (mu + i w, 1), split as w = d1 - i d2
  ed.d1 = {p.mu, 1.0};
  ed.d2 = {-omega, 0.0};
  ed.normalized = false;

  const double scale = 1.0 + std::fabs(B(1, 0)) + omega;
  if (detail::block_residual(B, W, ed.c1, ed.c2, false) > 1e-8 * scale ||
      detail::block_residual(B, W, ed.d1, ed.d2, true) > 1e-8 * scale)
    throw RankDeficiency("eigenfunction_coeffs: boundary system residual too large");
  return ed;
}

// complex eigenvector of the critical eigenvalue i omega: v = c1 + i c2; its
// conjugate spans the -i omega direction
inline CVec2 critical_eigenvector(const EigenData& ed) {
  return {ed.c1[0], ed.c2[0], ed.c1[1], ed.c2[1]};
}

// s pair at theta in [-tau, 0]
inline std::pair<Vec2, Vec2> eval_s(const EigenData& ed, double theta) {
  if (theta < -ed.tau - 1e-12 || theta > 1e-12)
    throw OutOfDomain("eval_s: theta outside [-tau, 0]");
  const double c = std::cos(ed.omega * theta);
  const double s = std::sin(ed.omega * theta);
  return {axpy(c, ed.c1, -s, ed.c2), axpy(s, ed.c1, c, ed.c2)};
}

// n pair at theta in [0, tau]
inline std::pair<Vec2, Vec2> eval_n(const EigenData& ed, double theta) {
  if (theta < -1e-12 || theta > ed.tau + 1e-12)
    throw OutOfDomain("eval_n: theta outside [0, tau]");
  const double c = std::cos(ed.omega * theta);
  const double s = std::sin(ed.omega * theta);
  return {axpy(c, ed.d1, -s, ed.d2), axpy(s, ed.d1, c, ed.d2)};
}

// Pairing <x, y> = x(0)^T y(0) + int_{-tau}^0 x(xi + tau)^T Atau y(xi) dxi for the
// sinusoidal eigenfunctions.  The integrands are products of sines and cosines, so
// the integral is evaluated in closed form:
//   Icc = (tau cos(w tau) + sin(w tau)/w)/2      Ics = -tau sin(w tau)/2
//   Isc =  tau sin(w tau)/2                      Iss = (tau cos(w tau) - sin(w tau)/w)/2
inline Mat bilinear(const EigenData& ed, const Mat& Atau, double tau) {
  const double w = ed.omega;
  const double ct = std::cos(w * tau);
  const double st = std::sin(w * tau);
  const double Icc = 0.5 * (tau * ct + st / w);
  const double Ics = -0.5 * tau * st;
  const double Isc = 0.5 * tau * st;
  const double Iss = 0.5 * (tau * ct - st / w);

  auto quad = [&](const Vec2& x, const Vec2& y) {  // x^T Atau y
    return x[0] * (Atau(0, 0) * y[0] + Atau(0, 1) * y[1]) +
           x[1] * (Atau(1, 0) * y[0] + Atau(1, 1) * y[1]);
  };
  // theta-coefficient pairs: f(theta) = cos(w theta) fc + sin(w theta) fs
  const Vec2 n1c = ed.d1, n1s = {-ed.d2[0], -ed.d2[1]};
  const Vec2 n2c = ed.d2, n2s = ed.d1;
  const Vec2 s1c = ed.c1, s1s = {-ed.c2[0], -ed.c2[1]};
  const Vec2 s2c = ed.c2, s2s = ed.c1;

  auto entry = [&](const Vec2& nc, const Vec2& ns, const Vec2& sc, const Vec2& ss) {
    const double head = nc[0] * sc[0] + nc[1] * sc[1];  // n(0)^T s(0)
    return head + quad(nc, sc) * Icc + quad(nc, ss) * Ics + quad(ns, sc) * Isc +
           quad(ns, ss) * Iss;
  };

  Mat G(2, 2);
  G(0, 0) = entry(n1c, n1s, s1c, s1s);
  G(0, 1) = entry(n1c, n1s, s2c, s2s);
  G(1, 0) = entry(n2c, n2s, s1c, s1s);
  G(1, 1) = entry(n2c, n2s, s2c, s2s);
  return G;
}

// Fix the two free parameters of the adjoint pair so that the pairing matrix is the
// identity.  The pairing of rotation-structured pairs always has the form
// [[g1, g2], [-g2, g1]], so the mixing d <- alpha d + beta (rotated d) is determined
// by a 2x2 solve.
inline EigenData normalize(const EigenData& ed, const Mat& Atau, double tau) {
  const Mat G = bilinear(ed, Atau, tau);
  const double g1 = G(0, 0);
  const double g2 = G(0, 1);
  const double det = g1 * g1 + g2 * g2;
  const double scale = std::max({1.0, std::fabs(g1), std::fabs(g2)});
  if (det < 1e-12 * scale * scale)
    throw DegeneratePairing("normalize: pairing matrix singular");
  const double alpha = g1 / det;
  const double beta = -g2 / det;
  EigenData out = ed;
  out.d1 = axpy(alpha, ed.d1, beta, ed.d2);
  out.d2 = axpy(alpha, ed.d2, -beta, ed.d1);
  out.normalized = true;
  return out;
}

}  // namespace pllhopf

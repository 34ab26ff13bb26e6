#pragma once

// Planar cubic reduced system on the center manifold and its first Lyapunov
// coefficient:
//   dy1 =  w y2 + sum a_ij y1^i y2^j
//   dy2 = -w y1 + sum b_ij y1^i y2^j
// with
//   16 a = g2_03 + g2_21 + g1_12 + g1_30
//        + [g2_11 (g2_02 + g2_20) - g1_11 (g1_02 + g1_20)
//           - g2_02 g1_02 + g2_20 g1_20] / w,
// where gr_ij are raw partial derivatives of the nonlinear parts at the origin.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pllhopf/eigenspace.hpp"
#include "pllhopf/errors.hpp"
#include "pllhopf/hopf.hpp"
#include "pllhopf/manifold.hpp"
#include "pllhopf/model.hpp"

namespace pllhopf {

struct PlanarCubic {
  double omega = 0.0;
  double a20 = 0, a11 = 0, a02 = 0, a30 = 0, a21 = 0, a12 = 0, a03 = 0;
  double b20 = 0, b11 = 0, b02 = 0, b30 = 0, b21 = 0, b12 = 0, b03 = 0;
};

enum class Stability { Stable, Unstable };

struct LyapunovResult {
  double a = 0.0;
  Stability stability = Stability::Stable;
  bool inconclusive = false;  // |a| below 1e-8 of the formula's own term scale
  double mu = 0.0, tau = 0.0, omega = 0.0;
};

// Substitute x1(0) = y1 c11 + y2 c21 + w1(0)(y), x1(-tau) = y1 s11(-tau) +
// y2 s21(-tau) + w1(-tau)(y) into f2 and truncate at total degree three.  The
// cubic coefficients collect the cubic part of f2 on the linear substitution plus
// the quadratic part crossed with the w1 quadratic forms.  Only the second
// component of the adjoint pair enters the projection, so the row multipliers are
// d12 and d22.
inline PlanarCubic assemble(const EigenData& ed, const W1Quad& w1, const Equilibrium& eq,
                            const ModelParams& p, DelayTrig trig = DelayTrig::standard) {
  const Vec2 sd = s_first_components_at_delay(ed, trig);
  const double e1 = ed.c1[0], e2 = ed.c2[0];
  const double sig1 = e1 + sd[0], sig2 = e2 + sd[1];
  const double del1 = sd[0] - e1, del2 = sd[1] - e2;
  const double pref = p.K * p.mu;
  const double s2 = eq.sin2phi, c2 = eq.cos2phi;

  const double W20 = w1.at0[0] + w1.atTau[0];
  const double W11 = w1.at0[1] + w1.atTau[1];
  const double W02 = w1.at0[2] + w1.atTau[2];

  // quadratic part: -(pref/2) s2 sigma^2
  const double k = -0.5 * pref * s2;
  const double f20 = k * sig1 * sig1;
  const double f11 = 2.0 * k * sig1 * sig2;
  const double f02 = k * sig2 * sig2;

  // cubic part: -pref s2 sigma W - (pref/6) (delta^3 + c2 sigma^3)
  const double C30 = pref * (-s2 * (sig1 * 0.5 * W20) -
                             (del1 * del1 * del1 + c2 * sig1 * sig1 * sig1) / 6.0);
  const double C21 = pref * (-s2 * (sig1 * W11 + sig2 * 0.5 * W20) -
                             0.5 * (del1 * del1 * del2 + c2 * sig1 * sig1 * sig2));
  const double C12 = pref * (-s2 * (sig1 * 0.5 * W02 + sig2 * W11) -
                             0.5 * (del1 * del2 * del2 + c2 * sig1 * sig2 * sig2));
  const double C03 = pref * (-s2 * (sig2 * 0.5 * W02) -
                             (del2 * del2 * del2 + c2 * sig2 * sig2 * sig2) / 6.0);

  const double d12 = ed.d1[1], d22 = ed.d2[1];
  PlanarCubic pc;
  pc.omega = ed.omega;
  pc.a20 = d12 * f20;
  pc.a11 = d12 * f11;
  pc.a02 = d12 * f02;
  pc.a30 = d12 * C30;
  pc.a21 = d12 * C21;
  pc.a12 = d12 * C12;
  pc.a03 = d12 * C03;
  pc.b20 = d22 * f20;
  pc.b11 = d22 * f11;
  pc.b02 = d22 * f02;
  pc.b30 = d22 * C30;
  pc.b21 = d22 * C21;
  pc.b12 = d22 * C12;
  pc.b03 = d22 * C03;
  return pc;
}

namespace detail {

// monomial coefficients -> raw partial derivatives, and the two formula brackets
inline double lyapunov_terms(const PlanarCubic& pc, double* cubic_out, double* quad_out) {
  const double g1_30 = 6.0 * pc.a30, g1_12 = 2.0 * pc.a12;
  const double g2_21 = 2.0 * pc.b21, g2_03 = 6.0 * pc.b03;
  const double g1_20 = 2.0 * pc.a20, g1_11 = pc.a11, g1_02 = 2.0 * pc.a02;
  const double g2_20 = 2.0 * pc.b20, g2_11 = pc.b11, g2_02 = 2.0 * pc.b02;
  const double cubic = (g2_03 + g2_21 + g1_12 + g1_30) / 16.0;
  const double quad = (g2_11 * (g2_02 + g2_20) - g1_11 * (g1_02 + g1_20) -
                       g2_02 * g1_02 + g2_20 * g1_20) /
                      (16.0 * pc.omega);
  if (cubic_out) *cubic_out = cubic;
  if (quad_out) *quad_out = quad;
  return cubic + quad;
}

}  // namespace detail

inline double lyapunov_a(const PlanarCubic& pc) {
  if (!(pc.omega > 0.0)) throw InvalidParams("lyapunov_a: omega must be positive");
  return detail::lyapunov_terms(pc, nullptr, nullptr);
}

// Independent check: all partial derivatives by fourth-order central finite
// differences of the composed maps (y1, y2) -> (g1, g2), then the same formula.
inline double lyapunov_fd_oracle(const EigenData& ed, const W1Quad& w1, const Equilibrium& eq,
                                 const ModelParams& p, DelayTrig trig = DelayTrig::standard,
                                 double state_scale = 1.0) {
  const Vec2 sd = s_first_components_at_delay(ed, trig);
  const double e1 = ed.c1[0], e2 = ed.c2[0];
  auto x0 = [&](double y1, double y2) {
    return y1 * e1 + y2 * e2 +
           0.5 * w1.at0[0] * y1 * y1 + w1.at0[1] * y1 * y2 + 0.5 * w1.at0[2] * y2 * y2;
  };
  auto xt = [&](double y1, double y2) {
    return y1 * sd[0] + y2 * sd[1] +
           0.5 * w1.atTau[0] * y1 * y1 + w1.atTau[1] * y1 * y2 + 0.5 * w1.atTau[2] * y2 * y2;
  };
  auto g = [&](int r, double y1, double y2) {
    const double f = f2_nonlinear(x0(y1, y2), xt(y1, y2), eq, p);
    return (r == 1 ? ed.d1[1] : ed.d2[1]) * f;
  };

  const double h = 1e-3 * std::max(1.0, state_scale);
  // fourth-order central stencils, offsets -2..2 and -3..3
  const std::array<double, 5> w1st{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const std::array<double, 5> w2nd{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  const std::array<double, 7> w3rd{1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};

  auto D20 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w2nd[i] * g(r, (i - 2) * h, 0.0);
    return s / (h * h);
  };
  auto D02 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w2nd[i] * g(r, 0.0, (i - 2) * h);
    return s / (h * h);
  };
  auto D11 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) s += w1st[i] * w1st[j] * g(r, (i - 2) * h, (j - 2) * h);
    return s / (h * h);
  };
  auto D30 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 7; ++i) s += w3rd[i] * g(r, (i - 3) * h, 0.0);
    return s / (h * h * h);
  };
  auto D03 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 7; ++i) s += w3rd[i] * g(r, 0.0, (i - 3) * h);
    return s / (h * h * h);
  };
  auto D21 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) s += w2nd[i] * w1st[j] * g(r, (i - 2) * h, (j - 2) * h);
    return s / (h * h * h);
  };
  auto D12 = [&](int r) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) s += w1st[i] * w2nd[j] * g(r, (i - 2) * h, (j - 2) * h);
    return s / (h * h * h);
  };

  const double g1_30 = D30(1), g1_12 = D12(1), g1_20 = D20(1), g1_02 = D02(1), g1_11 = D11(1);
  const double g2_03 = D03(2), g2_21 = D21(2), g2_20 = D20(2), g2_02 = D02(2), g2_11 = D11(2);
  return (g2_03 + g2_21 + g1_12 + g1_30) / 16.0 +
         (g2_11 * (g2_02 + g2_20) - g1_11 * (g1_02 + g1_20) - g2_02 * g1_02 +
          g2_20 * g1_20) /
             (16.0 * ed.omega);
}

// All intermediate data of the reduction at one Hopf point.
struct ReducedPoint {
  ModelParams params;
  Equilibrium eq;
  LinMats lin;
  EigenData ed;       // normalized
  QuadCoeffs qc;
  ManifoldData md;
  W1Quad w1;
  PlanarCubic pc;
};

inline ReducedPoint reduce_at_point(const ModelParams& params_template, const HopfPoint& pt,
                                    DelayTrig trig = DelayTrig::standard) {
  ReducedPoint rp;
  rp.params = params_template;
  rp.params.mu = pt.mu;
  rp.params.tau = pt.tau;
  rp.params.validate();
  rp.eq = equilibrium(rp.params);
  rp.lin = linearization(rp.params, rp.eq);
  EigenData raw = eigenfunction_coeffs(rp.params, rp.eq, pt.omega);
  rp.ed = normalize(raw, rp.lin.Atau, pt.tau);
  rp.qc = f2_y_partials(rp.ed, rp.eq, rp.params, trig);
  rp.md = solve_manifold(rp.lin, rp.qc, rp.ed, pt.omega, pt.tau, trig);
  rp.w1 = w1_quadratic(rp.md, trig);
  rp.pc = assemble(rp.ed, rp.w1, rp.eq, rp.params, trig);
  return rp;
}

struct ScanEntry {
  HopfPoint point;
  std::optional<LyapunovResult> result;
  std::string note;  // nonempty when the reduction failed at this point
};

inline LyapunovResult classify(const PlanarCubic& pc, const HopfPoint& pt) {
  double cubic = 0.0, quad = 0.0;
  const double a = detail::lyapunov_terms(pc, &cubic, &quad);
  LyapunovResult r;
  r.a = a;
  r.mu = pt.mu;
  r.tau = pt.tau;
  r.omega = pt.omega;
  r.stability = a < 0.0 ? Stability::Stable : Stability::Unstable;
  const double scale = std::max({1.0, std::fabs(cubic), std::fabs(quad)});
  r.inconclusive = std::fabs(a) <= 1e-8 * scale;
  return r;
}

// Full pipeline per point; failures are recorded and the scan continues.
inline std::vector<ScanEntry> scan_lyapunov(const std::vector<HopfPoint>& points,
                                            const ModelParams& params_template,
                                            DelayTrig trig = DelayTrig::standard) {
  std::vector<ScanEntry> out;
  out.reserve(points.size());
  for (const HopfPoint& pt : points) {
    ScanEntry e;
    e.point = pt;
    try {
      const ReducedPoint rp = reduce_at_point(params_template, pt, trig);
      e.result = classify(rp.pc, pt);
    } catch (const std::exception& ex) {
      e.note = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace pllhopf

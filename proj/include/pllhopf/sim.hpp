#pragma once

// Time integration: adaptive Dormand-Prince 4(5) for the reduced planar system and
// fixed-step fourth-order method of steps for the delay models.  The delay step is
// adjusted so that dt divides tau: whole-step delayed reads then land exactly on
// stored grid nodes, and the half-stage reads use the cubic Hermite interpolant of
// the bracketing past step, which keeps the scheme at fourth order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pllhopf/errors.hpp"
#include "pllhopf/model.hpp"
#include "pllhopf/normalform.hpp"

namespace pllhopf {

struct Trajectory {
  std::vector<double> times;
  std::vector<double> flat;  // row-major, dim values per time
  int dim = 0;
  std::string model_tag;
  double dt_used = 0.0;  // fixed-step runs only
  bool blowup = false;
  double blowup_time = 0.0;

  size_t size() const { return times.size(); }
  const double* state(size_t i) const { return flat.data() + i * dim; }
};

struct HistorySpec {
  enum class Kind { ConstantOffset, Samples };
  Kind kind = Kind::ConstantOffset;
  // ConstantOffset: phase offsets from equilibrium, rates zero.  One entry is
  // broadcast to every node; otherwise one entry per node.
  std::vector<double> offset{0.0};
  // Samples: full-state samples on a uniform time grid covering [-tau, 0].
  std::vector<double> sample_times;
  std::vector<std::vector<double>> sample_states;

  static HistorySpec constant(double eps) {
    HistorySpec h;
    h.offset = {eps};
    return h;
  }
};

enum class SimModel { fix_truncated, fix_exact, full_network };

inline const char* sim_model_tag(SimModel m) {
  switch (m) {
    case SimModel::fix_truncated: return "fix_truncated";
    case SimModel::fix_exact: return "fix_exact";
    default: return "full_network";
  }
}

namespace detail {

// appends a sample, thinning the stored set whenever it reaches the cap
class DecimatingRecorder {
 public:
  DecimatingRecorder(Trajectory& tr, size_t cap = 1'000'000) : tr_(tr), cap_(cap) {}

  void push(double t, const double* y, int dim) {
    if (counter_++ % stride_ != 0) return;
    tr_.times.push_back(t);
    tr_.flat.insert(tr_.flat.end(), y, y + dim);
    if (tr_.times.size() >= cap_) thin(dim);
  }

 private:
  void thin(int dim) {
    const size_t n = tr_.times.size();
    size_t w = 0;
    for (size_t r = 0; r < n; r += 2, ++w) {
      tr_.times[w] = tr_.times[r];
      for (int c = 0; c < dim; ++c) tr_.flat[w * dim + c] = tr_.flat[r * dim + c];
    }
    tr_.times.resize(w);
    tr_.flat.resize(w * dim);
    stride_ *= 2;
  }

  Trajectory& tr_;
  size_t cap_;
  size_t stride_ = 1;
  size_t counter_ = 0;
};

}  // namespace detail

// Adaptive embedded Dormand-Prince 4(5) for the reduced system.  The fifth-order
// solution is propagated; the step is clamped to max_step and the run stops with a
// flag when the state norm passes 1e10.
inline Trajectory integrate_reduced(const PlanarCubic& pc, double y10, double y20,
                                    double t_end, double max_step, double rel_tol,
                                    double abs_tol) {
  if (!(t_end > 0.0)) throw InvalidParams("integrate_reduced: t_end must be > 0");
  if (!(max_step > 0.0)) throw InvalidParams("integrate_reduced: max_step must be > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw InvalidParams("integrate_reduced: tolerances must be > 0");

  auto rhs = [&pc](const double y[2], double f[2]) {
    const double y1 = y[0], y2 = y[1];
    const double y11 = y1 * y1, y12 = y1 * y2, y22 = y2 * y2;
    f[0] = pc.omega * y2 + pc.a20 * y11 + pc.a11 * y12 + pc.a02 * y22 + pc.a30 * y11 * y1 +
           pc.a21 * y11 * y2 + pc.a12 * y1 * y22 + pc.a03 * y22 * y2;
    f[1] = -pc.omega * y1 + pc.b20 * y11 + pc.b11 * y12 + pc.b02 * y22 + pc.b30 * y11 * y1 +
           pc.b21 * y11 * y2 + pc.b12 * y1 * y22 + pc.b03 * y22 * y2;
  };

  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200, e6 = 11.0 / 84 - 187.0 / 2100,
                          e7 = -1.0 / 40;

  Trajectory tr;
  tr.dim = 2;
  tr.model_tag = "reduced";
  detail::DecimatingRecorder rec(tr);

  double t = 0.0;
  double y[2] = {y10, y20};
  rec.push(t, y, 2);

  double k1[2];
  rhs(y, k1);
  double h = max_step;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-12) {
      if (t_end - t < 1e-12) break;
      // near a finite-time escape the controller collapses the step long before
      // the state can pass the hard norm bound (h settles near rtol^0.2 / r^2),
      // so a large state at underflow is the blowup outcome
      if (std::max(std::fabs(y[0]), std::fabs(y[1])) > 1e4) {
        tr.blowup = true;
        tr.blowup_time = t;
        return tr;
      }
      throw StepUnderflow("integrate_reduced: step below 1e-12");
    }
    double k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2], yn[2];
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(yt, k2);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(yt, k3);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(yt, k4);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(yt, k5);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(yt, k6);
    for (int i = 0; i < 2; ++i)
      yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(yn, k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      const double sc = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(yn[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / 2.0);

    if (err <= 1.0) {
      t += h;
      y[0] = yn[0];
      y[1] = yn[1];
      k1[0] = k7[0];
      k1[1] = k7[1];
      rec.push(t, y, 2);
      if (std::max(std::fabs(y[0]), std::fabs(y[1])) > 1e10) {
        tr.blowup = true;
        tr.blowup_time = t;
        return tr;
      }
    }
    const double fac =
        err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h = std::min(h * fac, max_step);
  }
  return tr;
}

namespace detail {

// cubic Hermite midpoint of a stored step
inline double hermite_mid(double ya, double yb, double fa, double fb, double h) {
  return 0.5 * (ya + yb) + h * (fa - fb) / 8.0;
}

struct HistoryEval {
  const HistorySpec* spec;
  std::vector<double> base;  // equilibrium state
  int dim;

  void value(double t, std::vector<double>& out) const {
    out.assign(base.begin(), base.end());
    if (spec->kind == HistorySpec::Kind::ConstantOffset) {
      const int nphase = dim / 2;
      for (int i = 0; i < nphase; ++i) {
        const double off =
            spec->offset.size() == 1 ? spec->offset[0] : spec->offset[static_cast<size_t>(i)];
        out[static_cast<size_t>(i)] += off;
      }
      return;
    }
    // uniform samples, Catmull-Rom in the interior
    const auto& ts = spec->sample_times;
    const auto& xs = spec->sample_states;
    const size_t n = ts.size();
    if (t <= ts.front()) { out = xs.front(); return; }
    if (t >= ts.back()) { out = xs.back(); return; }
    const double dt = (ts.back() - ts.front()) / (n - 1);
    size_t i = std::min(static_cast<size_t>((t - ts.front()) / dt), n - 2);
    const double u = (t - ts[i]) / dt;
    const auto& p1 = xs[i];
    const auto& p2 = xs[i + 1];
    const auto& p0 = xs[i > 0 ? i - 1 : i];
    const auto& p3 = xs[i + 2 < n ? i + 2 : i + 1];
    for (int c = 0; c < dim; ++c) {
      const double m1 = 0.5 * (p2[c] - p0[c]);
      const double m2 = 0.5 * (p3[c] - p1[c]);
      const double u2 = u * u, u3 = u2 * u;
      out[c] = (2 * u3 - 3 * u2 + 1) * p1[c] + (u3 - 2 * u2 + u) * m1 +
               (-2 * u3 + 3 * u2) * p2[c] + (u3 - u2) * m2;
    }
  }
};

}  // namespace detail

// Fixed-step method of steps.  dt is rounded down to tau/m with m >= 2 and reported
// through Trajectory::dt_used.  For the network model the states are raw phases by
// default; deviation = true integrates deviations from the synchronized equilibrium.
inline Trajectory integrate_dde(const ModelParams& params, SimModel model,
                                const HistorySpec& history, double dt, double t_end,
                                bool deviation = false) {
  params.validate();
  if (!(dt > 0.0)) throw InvalidStep("integrate_dde: dt must be > 0");
  if (!(t_end > 0.0)) throw InvalidParams("integrate_dde: t_end must be > 0");
  if (!(params.tau > 0.0)) throw InvalidStep("integrate_dde: method of steps needs tau > 0");

  const long m = std::max<long>(2, static_cast<long>(std::ceil(params.tau / dt - 1e-9)));
  const double h = params.tau / static_cast<double>(m);
  const Equilibrium eq = equilibrium(params);

  const int dim = model == SimModel::full_network ? 2 * params.N : 2;
  const int nphase = dim / 2;

  detail::HistoryEval hist;
  hist.spec = &history;
  hist.dim = dim;
  hist.base.assign(dim, 0.0);
  if (model == SimModel::full_network && !deviation)
    for (int i = 0; i < nphase; ++i) hist.base[static_cast<size_t>(i)] = eq.phi;
  if (history.kind == HistorySpec::Kind::Samples) {
    if (history.sample_times.size() < 2 || history.sample_times.front() > -params.tau + 1e-12 ||
        history.sample_times.back() < -1e-12)
      throw InvalidParams("integrate_dde: history samples must cover [-tau, 0]");
    if (history.sample_states.size() != history.sample_times.size())
      throw DimensionMismatch("integrate_dde: history sample arrays differ in length");
    const auto& ts = history.sample_times;
    const double step = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    for (size_t i = 1; i < ts.size(); ++i)
      if (std::fabs(ts[i] - ts[i - 1] - step) > 1e-9 * (1.0 + std::fabs(step)))
        throw InvalidParams("integrate_dde: history samples must be uniformly spaced");
  } else if (history.offset.size() != 1 &&
             static_cast<int>(history.offset.size()) != nphase) {
    throw DimensionMismatch("integrate_dde: offset must have 1 or N entries");
  }

  std::vector<double> ph, rt, dph, out1, out2;  // network scratch
  auto rhs = [&](const std::vector<double>& y, const std::vector<double>& yd,
                 std::vector<double>& f) {
    switch (model) {
      case SimModel::fix_truncated:
        fix_truncated_rhs(y[0], y[1], yd[0], params, eq, f[0], f[1]);
        break;
      case SimModel::fix_exact:
        fix_exact_rhs(y[0], y[1], yd[0], params, eq, f[0], f[1]);
        break;
      case SimModel::full_network: {
        ph.assign(y.begin(), y.begin() + nphase);
        rt.assign(y.begin() + nphase, y.end());
        dph.assign(yd.begin(), yd.begin() + nphase);
        if (deviation) {
          for (double& v : ph) v += eq.phi;
          for (double& v : dph) v += eq.phi;
        }
        full_rhs(ph, rt, dph, params, out1, out2);
        for (int i = 0; i < nphase; ++i) {
          f[static_cast<size_t>(i)] = out1[static_cast<size_t>(i)];
          f[static_cast<size_t>(i + nphase)] = out2[static_cast<size_t>(i)];
        }
        break;
      }
    }
  };

  Trajectory tr;
  tr.dim = dim;
  tr.model_tag = sim_model_tag(model);
  tr.dt_used = h;
  detail::DecimatingRecorder rec(tr);

  // ring buffers over the last m+1 grid nodes
  const size_t ring = static_cast<size_t>(m) + 1;
  std::vector<std::vector<double>> yring(ring, std::vector<double>(dim));
  std::vector<std::vector<double>> fring(ring, std::vector<double>(dim));
  auto slot = [&](long k) -> size_t { return static_cast<size_t>(((k % (long)ring) + (long)ring) % (long)ring); };

  // delayed state at t_k - tau (+ half * h/2), half in {0, 1, 2}
  std::vector<double> zd0(dim), zdh(dim), zd1(dim), ftmp(dim);
  auto delayed = [&](long k, int half, std::vector<double>& out) {
    const long i = k - m;
    const double ti = i * h;
    if (half == 0) {
      if (i < 0) hist.value(ti, out);
      else out = yring[slot(i)];
    } else if (half == 2) {
      if (i + 1 < 0) hist.value(ti + h, out);
      else out = yring[slot(i + 1)];
    } else {
      if (i + 1 <= 0) {
        hist.value(ti + 0.5 * h, out);
      } else {
        const auto& ya = yring[slot(i)];
        const auto& yb = yring[slot(i + 1)];
        const auto& fa = fring[slot(i)];
        const auto& fb = fring[slot(i + 1)];
        for (int c = 0; c < dim; ++c)
          out[c] = detail::hermite_mid(ya[c], yb[c], fa[c], fb[c], h);
      }
    }
  };

  const long nsteps = static_cast<long>(std::ceil(t_end / h - 1e-9));
  std::vector<double> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), yt(dim), yn(dim);

  hist.value(0.0, y);
  yring[slot(0)] = y;
  delayed(0, 0, zd0);
  rhs(y, zd0, ftmp);
  fring[slot(0)] = ftmp;
  rec.push(0.0, y.data(), dim);

  for (long k = 0; k < nsteps; ++k) {
    const double t = k * h;
    y = yring[slot(k)];
    k1 = fring[slot(k)];
    delayed(k, 1, zdh);
    delayed(k, 2, zd1);

    for (int c = 0; c < dim; ++c) yt[c] = y[c] + 0.5 * h * k1[c];
    rhs(yt, zdh, k2);
    for (int c = 0; c < dim; ++c) yt[c] = y[c] + 0.5 * h * k2[c];
    rhs(yt, zdh, k3);
    for (int c = 0; c < dim; ++c) yt[c] = y[c] + h * k3[c];
    rhs(yt, zd1, k4);
    for (int c = 0; c < dim; ++c)
      yn[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);

    yring[slot(k + 1)] = yn;
    rhs(yn, zd1, ftmp);  // node derivative, also the next step's first stage
    fring[slot(k + 1)] = ftmp;
    rec.push(t + h, yn.data(), dim);

    double norm = 0.0;
    for (double v : yn) norm = std::max(norm, std::fabs(v));
    if (norm > 1e10) {
      tr.blowup = true;
      tr.blowup_time = t + h;
      return tr;
    }
  }
  return tr;
}

// Trailing-window amplitude and trend.  The window is split into blocks of a few
// hundred samples; the amplitude is the mean block peak-to-peak value and the trend
// is the least-squares slope of log block amplitude against block center time.
inline std::pair<double, double> amplitude_estimate(const Trajectory& tr, int component,
                                                    double window_fraction) {
  if (tr.size() < 100) throw TooShort("amplitude_estimate: need at least 100 samples");
  if (component < 0 || component >= tr.dim)
    throw DimensionMismatch("amplitude_estimate: component out of range");
  if (!(window_fraction > 0.0) || window_fraction > 1.0)
    throw InvalidParams("amplitude_estimate: window_fraction must be in (0, 1]");

  const size_t n = tr.size();
  const size_t i0 = static_cast<size_t>(static_cast<double>(n) * (1.0 - window_fraction));
  const size_t count = n - i0;
  const int nblocks = static_cast<int>(std::clamp<size_t>(count / 200, 8, 64));
  const size_t bl = count / static_cast<size_t>(nblocks);
  if (bl < 4) throw TooShort("amplitude_estimate: window too short for block analysis");

  double amp_sum = 0.0;
  std::vector<double> bt, ba;
  for (int b = 0; b < nblocks; ++b) {
    const size_t lo = i0 + static_cast<size_t>(b) * bl;
    const size_t hi = (b == nblocks - 1) ? n : lo + bl;
    double mn = tr.state(lo)[component], mx = mn;
    for (size_t i = lo; i < hi; ++i) {
      const double v = tr.state(i)[component];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double amp = mx - mn;
    amp_sum += amp;
    bt.push_back(0.5 * (tr.times[lo] + tr.times[hi - 1]));
    ba.push_back(amp);
  }
  const double mean_amp = amp_sum / nblocks;
  if (mean_amp <= 0.0) return {0.0, 0.0};

  // least squares on log amplitude; empty blocks are guarded by the mean check
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int b = 0; b < nblocks; ++b) {
    if (ba[static_cast<size_t>(b)] <= 0.0) continue;
    const double x = bt[static_cast<size_t>(b)];
    const double yv = std::log(ba[static_cast<size_t>(b)]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++cnt;
  }
  if (cnt < 2) return {mean_amp, 0.0};
  const double denom = cnt * sxx - sx * sx;
  const double slope = denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  return {mean_amp, slope};
}

}  // namespace pllhopf

#pragma once

// Deterministic CSV emission: 17 significant digits, C locale, '\n' line endings.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pllhopf/hopf.hpp"
#include "pllhopf/normalform.hpp"
#include "pllhopf/sim.hpp"

namespace pllhopf {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* direction_label(CrossingDirection d) {
  switch (d) {
    case CrossingDirection::LeftToRight: return "L2R";
    case CrossingDirection::RightToLeft: return "R2L";
    default: return "DEG";
  }
}

inline std::string branch_id(const HopfPoint& pt) {
  return "r" + std::to_string(pt.root) + "j" + std::to_string(pt.j);
}

inline void write_hopf_csv(std::ostream& os, const std::vector<HopfPoint>& pts) {
  os << "branch_id,mu,tau,omega,re_dlambda,direction,residual\n";
  for (const HopfPoint& pt : pts)
    os << branch_id(pt) << ',' << fmt17(pt.mu) << ',' << fmt17(pt.tau) << ','
       << fmt17(pt.omega) << ',' << fmt17(pt.re_dlambda) << ',' << direction_label(pt.direction)
       << ',' << fmt17(pt.residual) << '\n';
}

inline void write_lyapunov_csv(std::ostream& os, const std::vector<ScanEntry>& entries) {
  os << "branch_id,mu,tau,omega,a,stability,inconclusive_flag,note\n";
  for (const ScanEntry& e : entries) {
    os << branch_id(e.point) << ',' << fmt17(e.point.mu) << ',' << fmt17(e.point.tau) << ','
       << fmt17(e.point.omega) << ',';
    if (e.result) {
      os << fmt17(e.result->a) << ','
         << (e.result->stability == Stability::Stable ? "stable" : "unstable") << ','
         << (e.result->inconclusive ? 1 : 0) << ",\n";
    } else {
      os << ",,," << e.note << '\n';
    }
  }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int decimate = 1) {
  if (tr.model_tag == "reduced") {
    os << "t,y1,y2\n";
  } else if (tr.model_tag == "full_network") {
    const int n = tr.dim / 2;
    os << 't';
    for (int i = 1; i <= n; ++i) os << ",phi_" << i;
    for (int i = 1; i <= n; ++i) os << ",dphi_" << i;
    os << '\n';
  } else {
    os << "t,x1,x2\n";
  }
  const size_t step = decimate > 0 ? static_cast<size_t>(decimate) : 1;
  for (size_t i = 0; i < tr.size(); i += step) {
    os << fmt17(tr.times[i]);
    for (int c = 0; c < tr.dim; ++c) os << ',' << fmt17(tr.state(i)[c]);
    os << '\n';
  }
}

}  // namespace pllhopf

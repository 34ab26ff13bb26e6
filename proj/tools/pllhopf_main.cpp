// Command-line front end: equilibria, Hopf curve tracing, Lyapunov-coefficient
// scans, and time integration, all emitted as deterministic CSV.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pllhopf/csvfmt.hpp"
#include "pllhopf/eigenspace.hpp"
#include "pllhopf/hopf.hpp"
#include "pllhopf/model.hpp"
#include "pllhopf/normalform.hpp"
#include "pllhopf/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string subcommand;
  double K = 1.05;
  std::string branch = "minus";
  int n_index = 0;
  int nodes = 2;
  double mu = 0.3;
  double tau = 6.34;
  double mu_min = 0.05;
  double mu_max = 1.0;
  int steps = 500;
  int j_max = 2;
  std::string mode = "reduced";
  std::string trig = "standard";
  double t_end = 5e4;
  double max_step = 0.05;
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  double y10 = 1e-5;
  double y20 = 1e-5;
  double dt = 0.05;
  double eps = 1e-3;
  bool deviation = false;
  int decimate = 1;
  double window = 0.2;
  std::string out = "-";
  long seed = 0;  // reserved for randomized history protocols
  bool dump = false;
};

pllhopf::Branch parse_branch(const std::string& s) {
  if (s == "plus") return pllhopf::Branch::plus;
  if (s == "minus") return pllhopf::Branch::minus;
  throw pllhopf::InvalidParams("branch must be 'plus' or 'minus'");
}

pllhopf::DelayTrig parse_trig(const std::string& s) {
  if (s == "standard") return pllhopf::DelayTrig::standard;
  if (s == "mirrored") return pllhopf::DelayTrig::mirrored;
  throw pllhopf::InvalidParams("delayed-trig must be 'standard' or 'mirrored'");
}

void dump_config(const RunConfig& c) {
  std::ostringstream os;
  os << "subcommand=" << c.subcommand << '\n'
     << "k=" << pllhopf::fmt17(c.K) << '\n'
     << "branch=" << c.branch << '\n'
     << "n_index=" << c.n_index << '\n'
     << "nodes=" << c.nodes << '\n'
     << "mu=" << pllhopf::fmt17(c.mu) << '\n'
     << "tau=" << pllhopf::fmt17(c.tau) << '\n'
     << "mu_min=" << pllhopf::fmt17(c.mu_min) << '\n'
     << "mu_max=" << pllhopf::fmt17(c.mu_max) << '\n'
     << "steps=" << c.steps << '\n'
     << "j_max=" << c.j_max << '\n'
     << "mode=" << c.mode << '\n'
     << "delayed_trig=" << c.trig << '\n'
     << "t_end=" << pllhopf::fmt17(c.t_end) << '\n'
     << "max_step=" << pllhopf::fmt17(c.max_step) << '\n'
     << "rel_tol=" << pllhopf::fmt17(c.rel_tol) << '\n'
     << "abs_tol=" << pllhopf::fmt17(c.abs_tol) << '\n'
     << "y10=" << pllhopf::fmt17(c.y10) << '\n'
     << "y20=" << pllhopf::fmt17(c.y20) << '\n'
     << "dt=" << pllhopf::fmt17(c.dt) << '\n'
     << "eps=" << pllhopf::fmt17(c.eps) << '\n'
     << "deviation=" << (c.deviation ? 1 : 0) << '\n'
     << "decimate=" << c.decimate << '\n'
     << "window=" << pllhopf::fmt17(c.window) << '\n'
     << "out=" << c.out << '\n'
     << "seed=" << c.seed << '\n';
  std::cerr << os.str();
}

// write to the requested path or stdout
int with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(std::cout);
    return kExitOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return kExitUsage;
  }
  fn(f);
  return kExitOk;
}

int cmd_equilibria(const RunConfig& c) {
  pllhopf::ModelParams p;
  p.K = c.K;
  p.branch = parse_branch(c.branch);
  p.n_index = c.n_index;
  if (!(p.K >= 1.0)) throw pllhopf::InvalidParams("K must be >= 1");
  const pllhopf::Equilibrium eq = pllhopf::equilibrium(p);
  std::printf("phi = %.10f\n", eq.phi);
  std::printf("sin2phi = %.10f\n", eq.sin2phi);
  std::printf("cos2phi = %.10f\n", eq.cos2phi);
  return kExitOk;
}

int cmd_hopf(const RunConfig& c) {
  const auto pts = pllhopf::trace_curves(c.K, c.mu_min, c.mu_max, c.steps, c.j_max,
                                         parse_branch(c.branch), c.n_index);
  return with_output(c.out, [&](std::ostream& os) { pllhopf::write_hopf_csv(os, pts); });
}

int cmd_lyapunov(const RunConfig& c) {
  const auto pts = pllhopf::trace_curves(c.K, c.mu_min, c.mu_max, c.steps, c.j_max,
                                         parse_branch(c.branch), c.n_index);
  pllhopf::ModelParams tmpl;
  tmpl.K = c.K;
  tmpl.branch = parse_branch(c.branch);
  tmpl.n_index = c.n_index;
  tmpl.N = c.nodes;
  const auto entries = pllhopf::scan_lyapunov(pts, tmpl, parse_trig(c.trig));
  return with_output(c.out,
                     [&](std::ostream& os) { pllhopf::write_lyapunov_csv(os, entries); });
}

// nearest Hopf point to (mu, tau) over frequency roots and delay branches
pllhopf::HopfPoint snap_to_curve(const pllhopf::ModelParams& p, const pllhopf::Equilibrium& eq,
                                 double tau) {
  const auto freqs = pllhopf::hopf_frequencies(p, eq);
  if (freqs.empty())
    throw pllhopf::NotAHopfPoint("no critical frequency exists at this mu");
  std::optional<pllhopf::HopfPoint> best;
  for (size_t r = 0; r < freqs.size(); ++r) {
    const int j_hi = static_cast<int>(tau * freqs[r] / (2.0 * 3.141592653589793)) + 1;
    for (int j = 0; j <= j_hi; ++j) {
      pllhopf::HopfPoint pt = pllhopf::hopf_tau(p, eq, freqs[r], j);
      pt.root = static_cast<int>(r);
      if (!best || std::fabs(pt.tau - tau) < std::fabs(best->tau - tau)) best = pt;
    }
  }
  return *best;
}

int cmd_simulate(const RunConfig& c) {
  pllhopf::ModelParams p;
  p.K = c.K;
  p.mu = c.mu;
  p.tau = c.tau;
  p.N = c.nodes;
  p.branch = parse_branch(c.branch);
  p.n_index = c.n_index;
  if (!(c.t_end > 0.0)) throw pllhopf::InvalidParams("t-end must be > 0");

  pllhopf::Trajectory tr;
  if (c.mode == "reduced") {
    p.validate();
    const pllhopf::Equilibrium eq = pllhopf::equilibrium(p);
    const pllhopf::HopfPoint pt = snap_to_curve(p, eq, c.tau);
    std::cerr << "snapped to Hopf point mu=" << pllhopf::fmt17(pt.mu)
              << " tau=" << pllhopf::fmt17(pt.tau) << " omega=" << pllhopf::fmt17(pt.omega)
              << " (" << pllhopf::branch_id(pt) << ")\n";
    const pllhopf::ReducedPoint rp = pllhopf::reduce_at_point(p, pt, parse_trig(c.trig));
    tr = pllhopf::integrate_reduced(rp.pc, c.y10, c.y20, c.t_end, c.max_step, c.rel_tol,
                                    c.abs_tol);
  } else {
    pllhopf::SimModel model;
    if (c.mode == "fix_truncated") model = pllhopf::SimModel::fix_truncated;
    else if (c.mode == "fix_exact") model = pllhopf::SimModel::fix_exact;
    else if (c.mode == "network") model = pllhopf::SimModel::full_network;
    else throw pllhopf::InvalidParams("mode must be reduced, fix_truncated, fix_exact, or network");
    const pllhopf::HistorySpec hist = pllhopf::HistorySpec::constant(c.eps);
    tr = pllhopf::integrate_dde(p, model, hist, c.dt, c.t_end, c.deviation);
    std::cerr << "dt adjusted to " << pllhopf::fmt17(tr.dt_used) << "\n";
  }

  const int rc = with_output(c.out, [&](std::ostream& os) {
    pllhopf::write_trajectory_csv(os, tr, c.decimate);
  });
  if (rc != kExitOk) return rc;
  if (tr.blowup) {
    std::printf("BLOWUP t=%s\n", pllhopf::fmt17(tr.blowup_time).c_str());
  } else {
    try {
      const auto [amp, slope] = pllhopf::amplitude_estimate(tr, 0, c.window);
      std::printf("amplitude=%s trend_slope=%s\n", pllhopf::fmt17(amp).c_str(),
                  pllhopf::fmt17(slope).c_str());
    } catch (const pllhopf::TooShort&) {
      // run too short for a trailing-window summary, the trajectory still stands
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Hopf bifurcation curves, periodic-orbit stability, and simulation for a "
               "delay-coupled oscillator network"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_model = [&](CLI::App* s, bool with_nodes) {
    s->add_option("--k", c.K, "coupling gain K >= 1")->capture_default_str();
    s->add_option("--branch", c.branch, "equilibrium branch: plus or minus")
        ->capture_default_str();
    s->add_option("--n-index", c.n_index, "equilibrium family offset n")->capture_default_str();
    if (with_nodes)
      s->add_option("--nodes", c.nodes, "node count N >= 2")->capture_default_str();
    s->add_flag("--dump-config", c.dump, "echo the resolved configuration to stderr");
    s->add_option("--seed", c.seed, "reserved, recorded in the configuration dump")
        ->capture_default_str();
  };
  auto add_scan = [&](CLI::App* s) {
    s->add_option("--mu-min", c.mu_min, "scan start")->capture_default_str();
    s->add_option("--mu-max", c.mu_max, "scan end")->capture_default_str();
    s->add_option("--steps", c.steps, "grid points")->capture_default_str();
    s->add_option("--j-max", c.j_max, "largest delay-branch index")->capture_default_str();
    s->add_option("--out,-o", c.out, "output path, '-' for stdout")->capture_default_str();
  };

  CLI::App* eq = app.add_subcommand("equilibria", "print the synchronized equilibrium");
  add_model(eq, false);

  CLI::App* hp = app.add_subcommand("hopf", "trace Hopf curves over mu, emit CSV");
  add_model(hp, false);
  add_scan(hp);

  CLI::App* ly = app.add_subcommand("lyapunov", "first Lyapunov coefficient along the curves");
  add_model(ly, true);
  add_scan(ly);
  ly->add_option("--delayed-trig", c.trig,
                 "sine convention for delayed mode values: standard or mirrored")
      ->capture_default_str();

  CLI::App* si = app.add_subcommand("simulate", "integrate a model and emit a trajectory CSV");
  add_model(si, true);
  si->add_option("--mode", c.mode, "reduced, fix_truncated, fix_exact, or network")
      ->capture_default_str();
  si->add_option("--mu", c.mu, "damping")->capture_default_str();
  si->add_option("--tau", c.tau, "delay")->capture_default_str();
  si->add_option("--t-end", c.t_end, "time span")->capture_default_str();
  si->add_option("--max-step", c.max_step, "reduced: step cap")->capture_default_str();
  si->add_option("--rel-tol", c.rel_tol, "reduced: relative tolerance")->capture_default_str();
  si->add_option("--abs-tol", c.abs_tol, "reduced: absolute tolerance")->capture_default_str();
  si->add_option("--y10", c.y10, "reduced: y1(0)")->capture_default_str();
  si->add_option("--y20", c.y20, "reduced: y2(0)")->capture_default_str();
  si->add_option("--dt", c.dt, "delay models: step, adjusted down to divide tau")
      ->capture_default_str();
  si->add_option("--eps", c.eps, "delay models: history phase offset")->capture_default_str();
  si->add_flag("--deviation", c.deviation, "network: integrate deviations from equilibrium");
  si->add_option("--decimate", c.decimate, "keep every k-th output sample")
      ->capture_default_str();
  si->add_option("--window", c.window, "trailing window fraction for the amplitude summary")
      ->capture_default_str();
  si->add_option("--out,-o", c.out, "output path, '-' for stdout")->capture_default_str();
  si->add_option("--delayed-trig", c.trig,
                 "sine convention for delayed mode values: standard or mirrored")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& [name, fn] :
       std::initializer_list<std::pair<std::string, int (*)(const RunConfig&)>>{
           {"equilibria", cmd_equilibria},
           {"hopf", cmd_hopf},
           {"lyapunov", cmd_lyapunov},
           {"simulate", cmd_simulate}}) {
    if (!app.got_subcommand(name)) continue;
    c.subcommand = name;
    if (c.dump) dump_config(c);
    try {
      return fn(c);
    } catch (const pllhopf::InvalidParams& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const pllhopf::InvalidStep& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const pllhopf::DimensionMismatch& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    }
  }
  return kExitUsage;
}

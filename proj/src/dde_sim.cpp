#include "taumax/dde_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace taumax {

SimulationDiverged::SimulationDiverged(double t_)
    : std::runtime_error("simulation diverged at t=" + std::to_string(t_)), t(t_) {}

namespace {

constexpr int kMaxStates = 4;
using State = std::array<double, kMaxStates>;

// Fixed-step history ring holding (state, derivative) at grid points; lookups
// between grid points use cubic Hermite interpolation, before t0 the initial
// state held constant.
class HistoryRing {
public:
  HistoryRing(int n, double dt, double span, const State& x0) : n_(n), dt_(dt), x0_(x0) {
    cap_ = static_cast<size_t>(std::ceil(span / dt)) + 4;
    xs_.resize(cap_);
    fs_.resize(cap_);
  }

  void push(size_t index, const State& x, const State& f) {
    xs_[index % cap_] = x;
    fs_[index % cap_] = f;
    last_ = index;
  }

  State at(double t) const {
    if (t <= 0.0) return x0_;
    double fk = std::floor(t / dt_ + 1e-12);
    size_t k = static_cast<size_t>(fk);
    if (k >= last_) k = last_ - 1;
    const double u = t / dt_ - static_cast<double>(k);
    const State& xa = xs_[k % cap_];
    const State& fa = fs_[k % cap_];
    const State& xb = xs_[(k + 1) % cap_];
    const State& fb = fs_[(k + 1) % cap_];
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    State out{};
    for (int i = 0; i < n_; ++i)
      out[i] = h00 * xa[i] + dt_ * h10 * fa[i] + h01 * xb[i] + dt_ * h11 * fb[i];
    return out;
  }

private:
  int n_;
  double dt_;
  State x0_;
  size_t cap_ = 0;
  size_t last_ = 0;
  std::vector<State> xs_, fs_;
};

using Rhs = std::function<void(double t, const State& x, const State& xdel, State& dx)>;

// RK4 with the delayed argument read from the history ring; tau >= dt keeps
// the intermediate-stage lookups inside completed history.
template <typename PerStep>
void integrate(int n, const Rhs& rhs, const State& x0, double tau, double dt, double t_end,
               PerStep&& per_step) {
  const size_t steps = static_cast<size_t>(std::llround(t_end / dt));
  HistoryRing hist(n, dt, std::max(tau, dt), x0);

  State x = x0, f{}, k1{}, k2{}, k3{}, k4{}, tmp{};
  const bool no_delay = tau <= 0.0;
  auto delayed = [&](double t) { return hist.at(t - tau); };

  rhs(0.0, x, delayed(0.0), k1);
  hist.push(0, x, k1);
  per_step(0.0, x, k1);

  for (size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    // with tau = 0 the delayed argument is the stage state itself (plain RK4)
    rhs(t, x, no_delay ? x : delayed(t), k1);
    for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
    rhs(t + 0.5 * dt, tmp, no_delay ? tmp : delayed(t + 0.5 * dt), k2);
    for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
    rhs(t + 0.5 * dt, tmp, no_delay ? tmp : delayed(t + 0.5 * dt), k3);
    for (int j = 0; j < n; ++j) tmp[j] = x[j] + dt * k3[j];
    rhs(t + dt, tmp, no_delay ? tmp : delayed(t + dt), k4);
    for (int j = 0; j < n; ++j) x[j] += dt / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);

    const double tn = static_cast<double>(i + 1) * dt;
    double mx = 0.0;
    for (int j = 0; j < n; ++j) mx = std::max(mx, std::abs(x[j]));
    if (!std::isfinite(mx) || mx > 1e12) throw SimulationDiverged(tn);

    rhs(tn, x, no_delay ? x : delayed(tn), f);
    hist.push(i + 1, x, f);
    per_step(tn, x, f);
  }
}

}  // namespace

Trace simulate(const MotorParams& m, const PiParams& pi, const LoopParams& lp, double tau_total,
               const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("sim dt must be positive");
  double limit = std::min(m.tau_elec(), lp.tau_f);
  if (tau_total > 0.0) limit = std::min(limit, tau_total);
  if (cfg.dt > limit / 20.0)
    throw std::invalid_argument("sim dt too coarse: need dt <= min(tau_elec, tau_f, tau_total)/20");
  if (cfg.t_end < 50.0 * cfg.dt) throw std::invalid_argument("sim t_end must cover >= 50 steps");
  if (tau_total < 0.0) throw std::invalid_argument("tau_total must be non-negative");

  const bool load_input = cfg.input == SimConfig::InputKind::load_step;
  // a load test regulates the measured (filtered) speed at its initial value
  const double wref = load_input ? lp.kf * cfg.initial_speed : cfg.setpoint;
  // snap the load step to the grid so RK4 never straddles the discontinuity
  const double t0 = std::round(cfg.load_t0 / cfg.dt) * cfg.dt;

  // states: [0] current, [1] speed, [2] PI integral of error, [3] LPF output
  State x0{0.0, cfg.initial_speed, 0.0, lp.kf * cfg.initial_speed};
  if (load_input && cfg.initial_speed != 0.0) {
    // start on the holding equilibrium so a pure load test begins at rest
    const double i_ss = (m.Bm * cfg.initial_speed) / m.kt;
    x0[0] = i_ss;
    x0[2] = (m.R * i_ss + m.ke * cfg.initial_speed) / (lp.Vdc * pi.ki);
  }

  Trace tr;
  const auto rhs = [&](double t, const State& x, const State& xd, State& dx) {
    const double Tl = (load_input && t >= t0) ? cfg.load_torque : 0.0;
    const double e = wref - x[3];
    const double v = lp.Vdc * (pi.kp * e + pi.ki * x[2]);
    dx[0] = (v - m.R * x[0] - m.ke * x[1]) / m.L;
    dx[1] = (m.kt * x[0] - m.Bm * x[1] - Tl) / m.J;
    dx[2] = e;
    dx[3] = (lp.kf * xd[1] - x[3]) / lp.tau_f;
  };

  const double tau_eff = std::max(tau_total, 0.0);
  integrate(4, rhs, x0, tau_eff, cfg.dt, cfg.t_end, [&](double t, const State& x, const State&) {
    const double e = wref - x[3];
    tr.time.push_back(t);
    tr.speed.push_back(x[1]);
    tr.current.push_back(x[0]);
    tr.control.push_back(lp.Vdc * (pi.kp * e + pi.ki * x[2]));
  });
  return tr;
}

LinearTrace simulate_linear(const DelaySystem& sys, const std::vector<double>& x0, double tau,
                            double dt, double t_end) {
  const int n = sys.order();
  if (n > kMaxStates) throw std::invalid_argument("simulate_linear supports up to 4 states");
  if (static_cast<int>(x0.size()) != n) throw std::invalid_argument("x0 size mismatch");

  State s0{};
  for (int i = 0; i < n; ++i) s0[i] = x0[i];

  const auto rhs = [&](double, const State& x, const State& xd, State& dx) {
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += sys.A0(i, j) * x[j] + sys.A1(i, j) * xd[j];
      dx[i] = v;
    }
  };

  LinearTrace tr;
  integrate(n, rhs, s0, tau, dt, t_end, [&](double t, const State& x, const State&) {
    double mx = 0.0;
    for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(x[i]));
    tr.time.push_back(t);
    tr.norm.push_back(mx);
  });
  return tr;
}

double envelope_rate(const std::vector<double>& mag, double dt) {
  const size_t n = mag.size();
  if (n < 16) return -std::numeric_limits<double>::infinity();
  const size_t half = n / 2;
  const size_t w = (n - half) / 4;

  double st = 0, sv = 0, stt = 0, stv = 0;
  for (int k = 0; k < 4; ++k) {
    double m = 0.0;
    for (size_t i = half + k * w; i < half + (k + 1) * w; ++i) m = std::max(m, mag[i]);
    if (m <= 0.0) return -std::numeric_limits<double>::infinity();
    const double t = (static_cast<double>(half) + (k + 0.5) * static_cast<double>(w)) * dt;
    const double v = std::log(m);
    st += t;
    sv += v;
    stt += t * t;
    stv += t * v;
  }
  return (4.0 * stv - st * sv) / (4.0 * stt - st * st);
}

namespace {

double bisect_boundary(const std::function<bool(double)>& unstable, double tau_lo, double tau_hi,
                       double rel) {
  if (unstable(tau_lo) || !unstable(tau_hi))
    throw std::runtime_error("bracket invalid: need stable tau_lo and unstable tau_hi");
  double lo = tau_lo, hi = tau_hi;
  while (hi - lo > rel * lo) {
    const double mid = 0.5 * (lo + hi);
    (unstable(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double stability_oracle(const DelaySystem& sys, double tau_lo, double tau_hi,
                        const OracleOptions& opts) {
  const double dt = opts.dt > 0.0 ? opts.dt : tau_lo / 50.0;
  const double t_end = opts.t_end > 0.0 ? opts.t_end : 250.0 * tau_hi;
  std::vector<double> x0(sys.order(), 1.0);

  auto unstable = [&](double tau) {
    try {
      const LinearTrace tr = simulate_linear(sys, x0, tau, dt, t_end);
      return envelope_rate(tr.norm, dt) > opts.rate_threshold;
    } catch (const SimulationDiverged&) {
      return true;
    }
  };
  return bisect_boundary(unstable, tau_lo, tau_hi, opts.bisect_rel);
}

double stability_oracle(const BldcLoop& loop, double tau_lo, double tau_hi,
                        const OracleOptions& opts) {
  const double dt =
      opts.dt > 0.0 ? opts.dt
                    : std::min({loop.motor.tau_elec(), loop.loop.tau_f, tau_lo}) / 25.0;
  const double t_end = opts.t_end > 0.0 ? opts.t_end : std::max(100.0 * tau_hi, 1.0);

  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.input = SimConfig::InputKind::setpoint_step;
  cfg.setpoint = 628.3185307179587;  // 6000 RPM; linear loop, scale-free verdict

  auto unstable = [&](double tau) {
    try {
      const Trace tr = simulate(loop.motor, loop.pi, loop.loop, tau, cfg);
      std::vector<double> dev(tr.speed.size());
      for (size_t i = 0; i < dev.size(); ++i) dev[i] = std::abs(tr.speed[i] - cfg.setpoint);
      return envelope_rate(dev, dt) > opts.rate_threshold;
    } catch (const SimulationDiverged&) {
      return true;
    }
  };
  return bisect_boundary(unstable, tau_lo, tau_hi, opts.bisect_rel);
}

void write_trace(const Trace& t, std::ostream& out) {
  out << "time_s,speed_rad_s,current_a,control_v\n";
  char buf[160];
  for (size_t i = 0; i < t.time.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", t.time[i], t.speed[i],
                  t.current[i], t.control[i]);
    out << buf;
  }
}

void export_trace(const Trace& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace(t, f);
  if (!f) throw std::runtime_error("write failed for " + path);
}

Trace read_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "time_s,speed_rad_s,current_a,control_v")
    throw std::runtime_error("unexpected trace header in " + path);
  Trace t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v[4];
    char comma;
    ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
    if (!ss) throw std::runtime_error("malformed trace row in " + path);
    t.time.push_back(v[0]);
    t.speed.push_back(v[1]);
    t.current.push_back(v[2]);
    t.control.push_back(v[3]);
  }
  return t;
}

}  // namespace taumax

#include "qsd/kaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qsd/error.hpp"

namespace qsd {

using cd = std::complex<double>;

void KaosParams::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorKind::Contract, "KAOS gamma must be > 0");
  if (!(tau1 + tau2 > 0.0)) throw Error(ErrorKind::Contract, "KAOS period must be > 0");
  schedule().validate();
}

KaosParams beta_scale(const KaosParams& p, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::Contract, "beta must be positive");
  }
  return {p.chi * beta * beta * beta, p.gamma * beta, p.f0, p.tau1 / beta, p.tau2 / beta};
}

cd classical_rhs(cd xi, double t, const KaosParams& p) {
  return -0.5 * p.gamma * xi + pulse_value(p.schedule(), t) -
         cd(0.0, p.chi) * xi * xi * std::conj(xi);
}

namespace {

cd rhs_with(cd xi, double force, const KaosParams& p) {
  return -0.5 * p.gamma * xi + force - cd(0.0, p.chi) * xi * xi * std::conj(xi);
}

}  // namespace

std::vector<ClassicalSample> integrate_classical(cd xi0, const KaosParams& p, double dt,
                                                 double t_final, std::size_t stride) {
  p.validate();
  if (!(dt > 0.0) || !(t_final > 0.0)) {
    throw Error(ErrorKind::InvalidStep, "need dt > 0 and t_final > 0");
  }
  if (stride == 0) throw Error(ErrorKind::Contract, "record stride must be >= 1");
  const PulseSchedule sched = p.schedule();
  const std::size_t steps = std::size_t(std::ceil(t_final / dt - 1e-9));
  const double snap = 1e-6 * dt;

  std::vector<ClassicalSample> out;
  out.reserve(steps / stride + 2);
  out.push_back({0.0, xi0});
  cd xi = xi0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = std::min(double(k + 1) * dt, t_final);
    double t = double(k) * dt;
    while (t < t1) {
      double edge = next_pulse_edge(sched, t + snap);
      if (edge >= t1 - snap) edge = t1;
      const double h = edge - t;
      const double f = pulse_value(sched, 0.5 * (t + edge));
      const cd k1 = rhs_with(xi, f, p);
      const cd k2 = rhs_with(xi + 0.5 * h * k1, f, p);
      const cd k3 = rhs_with(xi + 0.5 * h * k2, f, p);
      const cd k4 = rhs_with(xi + h * k3, f, p);
      xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = edge;
    }
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) {
      std::ostringstream os;
      os << "classical state became non-finite at t = " << t1;
      throw Error(ErrorKind::NumericalBlowup, os.str());
    }
    if ((k + 1) % stride == 0) out.push_back({t1, xi});
  }
  return out;
}

std::vector<PoincarePoint> poincare_section(std::span<const double> times,
                                            std::span<const cd> values, double period,
                                            std::size_t discard, double tolerance) {
  if (times.size() != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "times and values differ in length");
  }
  std::vector<PoincarePoint> out;
  if (times.empty()) return out;
  const std::size_t periods = std::size_t(std::floor(times.back() / period + tolerance / period));
  std::size_t cursor = 0;
  for (std::size_t k = 1; k <= periods; ++k) {
    const double target = double(k) * period;
    while (cursor + 1 < times.size() && times[cursor] < target - tolerance) ++cursor;
    if (std::abs(times[cursor] - target) > tolerance) {
      std::ostringstream os;
      os << "no sample within " << tolerance << " of t = " << target
         << "; the sample spacing must divide the drive period";
      throw Error(ErrorKind::Contract, os.str());
    }
    if (k > discard) out.push_back({values[cursor].real(), values[cursor].imag(), k});
  }
  return out;
}

std::vector<PoincarePoint> poincare_section(std::span<const ClassicalSample> samples,
                                            const KaosParams& params, std::size_t discard,
                                            double tolerance) {
  std::vector<double> t;
  std::vector<cd> v;
  for (const auto& s : samples) {
    t.push_back(s.t);
    v.push_back(s.xi);
  }
  return poincare_section(t, v, params.period(), discard, tolerance);
}

std::vector<PoincarePoint> poincare_section(std::span<const TrajectoryRecord> records,
                                            std::size_t observable,
                                            const KaosParams& params, std::size_t discard,
                                            double tolerance) {
  std::vector<double> t;
  std::vector<cd> v;
  for (const auto& r : records) {
    if (observable >= r.expectations.size()) {
      throw Error(ErrorKind::Contract, "observable index out of range");
    }
    t.push_back(r.t);
    v.push_back(r.expectations[observable]);
  }
  return poincare_section(t, v, params.period(), discard, tolerance);
}

double nearest_distance(const PoincarePoint& p, std::span<const PoincarePoint> set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : set) best = std::min(best, std::hypot(p.re - s.re, p.im - s.im));
  return best;
}

}  // namespace qsd

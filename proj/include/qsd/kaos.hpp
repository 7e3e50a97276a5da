#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qsd/integrator.hpp"
#include "qsd/model.hpp"

// Kicked, damped, anharmonic oscillator: classical equation of motion,
// the beta-scaling transformation and stroboscopic sections.

namespace qsd {

struct KaosParams {
  double chi = 0.004;
  double gamma = 0.1;
  double f0 = 2.0;
  double tau1 = 5.0;
  double tau2 = 4.9;

  double period() const noexcept { return tau1 + tau2; }
  PulseSchedule schedule() const { return {tau1, tau2, f0}; }
  void validate() const;
};

/// gamma -> beta gamma, chi -> beta^3 chi, F0 fixed, tau1,2 -> tau1,2 / beta.
KaosParams beta_scale(const KaosParams& params, double beta);

/// d xi/dt = -gamma xi / 2 + F(t) - i chi xi^2 conj(xi)
std::complex<double> classical_rhs(std::complex<double> xi, double t,
                                   const KaosParams& params);

struct ClassicalSample {
  double t;
  std::complex<double> xi;
};

/// RK4 with steps split at pulse edges. Samples every `record_stride` steps,
/// starting with t = 0.
std::vector<ClassicalSample> integrate_classical(std::complex<double> xi0,
                                                 const KaosParams& params, double dt,
                                                 double t_final,
                                                 std::size_t record_stride = 1);

struct PoincarePoint {
  double re;
  double im;
  std::size_t period_index;
};

/// One point per completed period k = discard+1, ..., taken from the sample
/// within `tolerance` of t = k * period. Throws Contract when a period has no
/// such sample.
std::vector<PoincarePoint> poincare_section(std::span<const double> times,
                                            std::span<const std::complex<double>> values,
                                            double period, std::size_t discard,
                                            double tolerance);

std::vector<PoincarePoint> poincare_section(std::span<const ClassicalSample> samples,
                                            const KaosParams& params,
                                            std::size_t discard, double tolerance);

/// Quantum section from the expectation of observable `observable` (normally
/// the annihilation operator) in each record.
std::vector<PoincarePoint> poincare_section(std::span<const TrajectoryRecord> records,
                                            std::size_t observable,
                                            const KaosParams& params,
                                            std::size_t discard, double tolerance);

/// Distance from `p` to the nearest point of `set`.
double nearest_distance(const PoincarePoint& p, std::span<const PoincarePoint> set);

}  // namespace qsd

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsd/integrator.hpp"
#include "qsd/kaos.hpp"
#include "qsd/linalg.hpp"
#include "qsd/model.hpp"

namespace qsd {

/// Master seed used when a preset or config does not name one.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Values a caller may replace in a preset. Unset fields keep the preset
/// default.
struct ScenarioOverrides {
  std::optional<std::size_t> dim;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::size_t> record_stride;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> initial_level;  // fig2, fig3, fig5
  std::optional<double> kappa;               // fig1 measurement strength
  std::optional<double> gamma;               // fig3 bath rate, kaos friction
  std::optional<double> nbar;                // fig3 bath occupation
  std::optional<double> rate;                // fig4 well damping rate
  std::optional<double> well_center;         // fig4
  std::optional<double> edge_width;          // fig4 projector smoothing
  std::optional<double> beta;                // kaos
  std::optional<double> chi;                 // kaos
  std::optional<double> f0;                  // kaos
  std::optional<double> tau1;                // kaos
  std::optional<double> tau2;                // kaos
  std::optional<std::size_t> periods;        // kaos: t_final in drive periods
};

struct Scenario {
  std::string name;
  std::string summary;
  OpenSystemModel model;
  StateVector initial;
  TrajectoryConfig config;
  /// Set for the kaos preset: parameters after beta scaling.
  std::optional<KaosParams> kaos;
};

const std::vector<std::pair<std::string, std::string>>& scenario_catalog();

/// Builds a named preset: fig1, fig2, fig3, fig4, fig5 or kaos.
Scenario preset(std::string_view name, const ScenarioOverrides& overrides = {});

/// L_+ and L_- damping each well of a double well towards its centre:
/// L_pm = sqrt(rate) P_pm (q -+ center + i p)/sqrt(2), where P_+ (P_-)
/// projects onto nonnegative (negative) position eigenvalues.
std::pair<OperatorMatrix, OperatorMatrix> double_well_operators(std::size_t dim,
                                                                double well_center,
                                                                double rate,
                                                                double edge_width = 0.0);

/// Position-space projectors onto q >= 0 and q < 0.
std::pair<OperatorMatrix, OperatorMatrix> half_line_projectors(std::size_t dim,
                                                               double edge_width = 0.0);

/// Explicit-Euler stability bound on dt for the effective generator
/// K = -i H - 1/2 sum L^dag L: the largest dt with |1 + lambda dt| <= 1 for
/// every eigenvalue lambda of K with a nonzero real part.
double euler_stable_dt(const OpenSystemModel& model, double amplitude = 0.0);

}  // namespace qsd

namespace qsd {

/// dt with dt * max(‖H‖, ‖L_j^dag L_j‖) <= 0.05, lowered further to the
/// explicit-Euler stability bound when that is smaller.
double default_dt(const OpenSystemModel& model);

}  // namespace qsd

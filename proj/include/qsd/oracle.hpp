#pragma once

#include <cstddef>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/model.hpp"

namespace qsd {

/// -i[H(t), rho] + sum_j (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}).
/// rho is taken to be Hermitian.
CMatrix lindblad_rhs(const CMatrix& rho, const OpenSystemModel& model, double t);
inline CMatrix lindblad_rhs(const DensityMatrix& rho, const OpenSystemModel& model,
                            double t) {
  return lindblad_rhs(rho.entries(), model, t);
}

struct MasterRecord {
  double t;
  DensityMatrix rho;
};

/// Classical RK4 on the master equation with pulse-edge-aligned steps.
/// Records at t = k * record_stride * dt; every record is checked against the
/// density-matrix invariants and a violation throws IntegratorStepTooLarge.
std::vector<MasterRecord> integrate_master(const OpenSystemModel& model,
                                           const DensityMatrix& rho0, double dt,
                                           double t_final,
                                           std::size_t record_stride);

/// 1/2 sum |eig(rho1 - rho2)|
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// out = op * x, using the band structure of op when it is narrow.
void left_multiply(const OperatorMatrix& op, const CMatrix& x, CMatrix& out);

}  // namespace qsd

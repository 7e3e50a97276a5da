#include "qsd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsd/error.hpp"
#include "qsd/kernels.hpp"

namespace qsd {

void left_multiply(const OperatorMatrix& op, const CMatrix& x, CMatrix& out) {
  require_same_dim(op.dim(), std::size_t(x.rows()), "left_multiply");
  if (!op.is_banded()) {
    out.noalias() = op.entries() * x;
    return;
  }
  const std::size_t n = op.dim();
  const std::size_t cols = std::size_t(x.cols());
  const auto& kern = kernels::active();
  const CMatrix& a = op.entries();
  out.setZero(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > op.lower_bandwidth() ? i - op.lower_bandwidth() : 0;
    const std::size_t j1 = std::min(n, i + op.upper_bandwidth() + 1);
    Complex* row = out.data() + i * cols;
    for (std::size_t j = j0; j < j1; ++j) {
      const Complex aij = a(Eigen::Index(i), Eigen::Index(j));
      if (aij != Complex{}) kern.axpy(aij, x.data() + j * cols, row, cols);
    }
  }
}

namespace {

// Right-hand side with K = -i H - 1/2 sum L^dag L prepared per drive amplitude.
class MasterRhs {
 public:
  explicit MasterRhs(const OpenSystemModel& m)
      : model_(m), k_off_(generator(m, 0.0)),
        k_on_(m.drive() ? generator(m, m.drive()->schedule.f0) : k_off_) {}

  void operator()(const CMatrix& rho, double amplitude, CMatrix& out) {
    const OperatorMatrix& k = amplitude == 0.0 ? k_off_ : k_on_;
    left_multiply(k, rho, tmp_);
    out = tmp_ + tmp_.adjoint();
    for (const auto& l : model_.lindblads()) {
      left_multiply(l, rho, tmp_);             // L rho
      tmp2_ = tmp_.adjoint();                  // rho L^dag
      left_multiply(l, tmp2_, tmp_);           // L rho L^dag (rho Hermitian)
      out += tmp_;
    }
    // Symmetrize so roundoff never leaves the Hermitian subspace.
    tmp_ = out.adjoint();
    out = 0.5 * (out + tmp_);
  }

 private:
  static OperatorMatrix generator(const OpenSystemModel& m, double amplitude) {
    CMatrix k = Complex(0.0, -1.0) * m.hamiltonian_for(amplitude).entries();
    for (const auto& l : m.lindblads()) k -= 0.5 * (l.entries().adjoint() * l.entries());
    return OperatorMatrix(std::move(k));
  }

  const OpenSystemModel& model_;
  OperatorMatrix k_off_;
  OperatorMatrix k_on_;
  CMatrix tmp_;
  CMatrix tmp2_;
};

}  // namespace

CMatrix lindblad_rhs(const CMatrix& rho, const OpenSystemModel& model, double t) {
  require_same_dim(std::size_t(rho.rows()), model.dim(), "lindblad_rhs");
  MasterRhs rhs(model);
  CMatrix out;
  rhs(rho, model.drive_amplitude(t), out);
  return out;
}

std::vector<MasterRecord> integrate_master(const OpenSystemModel& model,
                                           const DensityMatrix& rho0, double dt,
                                           double t_final,
                                           std::size_t record_stride) {
  require_same_dim(rho0.dim(), model.dim(), "integrate_master");
  if (!(dt > 0.0) || !(t_final > 0.0) || dt > t_final * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidStep, "need 0 < dt <= t_final");
  }
  if (record_stride == 0) throw Error(ErrorKind::Contract, "record_stride must be >= 1");
  if (!check_density(rho0).ok) {
    throw Error(ErrorKind::Contract, "initial density matrix violates its invariants");
  }

  MasterRhs rhs(model);
  std::vector<MasterRecord> out;
  out.push_back({0.0, rho0});
  CMatrix rho = 0.5 * (rho0.entries() + rho0.entries().adjoint());
  CMatrix k1, k2, k3, k4, stage;

  const std::size_t steps = std::size_t(std::ceil(t_final / dt - 1e-9));
  const double snap = 1e-6 * dt;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = std::min(double(k + 1) * dt, t_final);
    double t = double(k) * dt;
    while (t < t1) {
      double edge = model.next_edge(t + snap);
      if (edge >= t1 - snap) edge = t1;
      const double h = edge - t;
      const double amp = model.drive_amplitude(0.5 * (t + edge));
      rhs(rho, amp, k1);
      stage = rho + (0.5 * h) * k1;
      rhs(stage, amp, k2);
      stage = rho + (0.5 * h) * k2;
      rhs(stage, amp, k3);
      stage = rho + h * k3;
      rhs(stage, amp, k4);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = edge;
    }
    if ((k + 1) % record_stride == 0) {
      DensityMatrix d(rho);
      const DensityReport rep = check_density(d);
      if (!rep.ok) {
        std::ostringstream os;
        os << "density matrix invariants violated at t = " << t1
           << " (hermiticity " << rep.hermiticity_error << ", trace "
           << rep.trace_error << ", min eigenvalue " << rep.min_eigenvalue
           << "); reduce dt";
        throw Error(ErrorKind::IntegratorStepTooLarge, os.str());
      }
      out.push_back({t1, std::move(d)});
    }
  }
  return out;
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  require_same_dim(rho1.dim(), rho2.dim(), "trace_distance");
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho1.entries() - rho2.entries());
  return 0.5 * ev.cwiseAbs().sum();
}

}  // namespace qsd

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "swstab/certificates.hpp"
#include "swstab/criteria.hpp"
#include "swstab/family.hpp"
#include "swstab/signal.hpp"

namespace swstab {

/// State samples along a switched run. Every switching instant appears
/// exactly once; the sample at tau_i belongs to the incoming (new) mode.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<SubsystemId> mode;
  std::vector<double> V;      // filled by lyapunov_trace
  bool diverged = false;      // ||x|| exceeded 1e12; data up to that point kept
  double divergence_time = 0.0;
};

inline constexpr double kDivergenceNorm = 1e12;

/// Classical fixed-step RK4 within each constant-mode segment; the last step
/// of a segment is shortened to land exactly on the switching instant.
Trajectory integrate(const SwitchedFamily& family, const SwitchingSignal& sig,
                     const Eigen::VectorXd& x0, double step);

/// Exact per-segment matrix-exponential flow on the same sample grid
/// (linear families only). Used as the oracle for the RK4 path.
Trajectory integrate_exact(const SwitchedFamily& family, const SwitchingSignal& sig,
                           const Eigen::VectorXd& x0, double step);

/// Fills traj.V with x' P_{sigma(t)} x of the active certificate.
void lyapunov_trace(Trajectory& traj, const CertificateSet& certs);

struct BoundReport {
  double max_excess = 0.0;      // max over samples of V - exp(psi) V0
  double max_rel_excess = 0.0;  // max over samples of V / (exp(psi) V0) - 1
  double worst_time = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Checks V_{sigma(t)}(x(t)) <= exp(psi(t)) V_{sigma(0)}(x0) (1 + tolerance)
/// at every sample. Requires lyapunov_trace to have run.
BoundReport check_bound(const Trajectory& traj, const CertificateSet& certs,
                        const SwitchingSignal& sig, double tolerance = 1e-5);

struct DecayReport {
  double sup_before = 0.0;
  double sup_after = 0.0;
  double ratio = 0.0;  // sup_after / sup_before; < 1 indicates decay
};

DecayReport decay_report(const Trajectory& traj, double t_split);

}  // namespace swstab

#include "swstab/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swstab {

namespace {

Eigen::VectorXd eval_field(const Subsystem& sub, const Eigen::VectorXd& x) {
  return sub.linear() ? Eigen::VectorXd(sub.A * x) : sub.field(x);
}

Eigen::VectorXd rk4_step(const Subsystem& sub, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = eval_field(sub, x);
  const Eigen::VectorXd k2 = eval_field(sub, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = eval_field(sub, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = eval_field(sub, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Shared segment walker: both integrators sample on the same grid
// (tau_i + k*step inside each segment, landing exactly on tau_{i+1}).
template <typename Advance>
Trajectory run_segments(const SwitchedFamily& family, const SwitchingSignal& sig,
                        const Eigen::VectorXd& x0, double step, Advance&& advance) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate: step must be positive");
  if (x0.size() != family.dimension)
    throw std::invalid_argument("integrate: x0 dimension mismatch");

  Trajectory traj;
  Eigen::VectorXd x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.mode.push_back(sig.modes.front());

  const std::size_t nseg = sig.taus.size();
  for (std::size_t i = 0; i < nseg; ++i) {
    const SubsystemId mode = sig.modes[i];
    const Subsystem& sub = family.subsystem(mode);
    const double seg_start = sig.taus[i];
    const double seg_end = (i + 1 < nseg) ? sig.taus[i + 1] : sig.horizon;
    double t = seg_start;
    bool fresh_segment = true;
    while (t < seg_end) {
      const double h = std::min(step, seg_end - t);
      x = advance(sub, x, h, fresh_segment);
      fresh_segment = false;
      t += h;
      if (t >= seg_end) t = seg_end;  // land switching instants exactly
      traj.times.push_back(t);
      traj.states.push_back(x);
      // the sample at a switching instant belongs to the incoming mode
      traj.mode.push_back(t == seg_end && i + 1 < nseg ? sig.modes[i + 1] : mode);
      if (!x.allFinite() || x.norm() > kDivergenceNorm) {
        traj.diverged = true;
        traj.divergence_time = t;
        return traj;
      }
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const SwitchedFamily& family, const SwitchingSignal& sig,
                     const Eigen::VectorXd& x0, double step) {
  return run_segments(family, sig, x0, step,
                      [](const Subsystem& sub, const Eigen::VectorXd& x, double h, bool) {
                        return rk4_step(sub, x, h);
                      });
}

Trajectory integrate_exact(const SwitchedFamily& family, const SwitchingSignal& sig,
                           const Eigen::VectorXd& x0, double step) {
  if (!family.all_linear())
    throw std::invalid_argument("integrate_exact: linear families only");
  // cache exp(A step) per segment; remainder steps get their own exponential
  Eigen::MatrixXd full_step;
  double cached_h = -1.0;
  const Subsystem* cached_sub = nullptr;
  return run_segments(
      family, sig, x0, step,
      [&](const Subsystem& sub, const Eigen::VectorXd& x, double h, bool fresh) {
        if (fresh || cached_sub != &sub) {
          cached_sub = &sub;
          cached_h = -1.0;
        }
        if (h != cached_h) {
          full_step = (sub.A * h).exp();
          cached_h = h;
        }
        return Eigen::VectorXd(full_step * x);
      });
}

void lyapunov_trace(Trajectory& traj, const CertificateSet& certs) {
  traj.V.resize(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& P = certs.certificate(traj.mode[k]).P;
    traj.V[k] = traj.states[k].dot(P * traj.states[k]);
  }
}

BoundReport check_bound(const Trajectory& traj, const CertificateSet& certs,
                        const SwitchingSignal& sig, double tolerance) {
  if (traj.V.size() != traj.times.size())
    throw std::invalid_argument("check_bound: run lyapunov_trace first");
  BoundReport rep;
  rep.tolerance = tolerance;
  const double v0 = traj.V.empty() ? 0.0 : traj.V.front();
  const auto psi_vals = psi_trace(sig, certs, traj.times);
  rep.max_excess = -std::numeric_limits<double>::infinity();
  rep.max_rel_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double bound = std::exp(psi_vals[k]) * v0;
    const double excess = traj.V[k] - bound;
    if (excess > rep.max_excess) rep.max_excess = excess;
    const double rel = (bound > 0.0) ? traj.V[k] / bound - 1.0 : (traj.V[k] > 0.0 ? 1e300 : 0.0);
    if (rel > rep.max_rel_excess) {
      rep.max_rel_excess = rel;
      rep.worst_time = traj.times[k];
    }
  }
  rep.pass = rep.max_rel_excess <= tolerance;
  return rep;
}

DecayReport decay_report(const Trajectory& traj, double t_split) {
  if (traj.times.empty()) throw std::invalid_argument("decay_report: empty trajectory");
  if (!(t_split > 0.0) || t_split >= traj.times.back())
    throw std::invalid_argument("decay_report: t_split must lie inside the horizon");
  DecayReport rep;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double norm = traj.states[k].norm();
    if (traj.times[k] <= t_split)
      rep.sup_before = std::max(rep.sup_before, norm);
    else
      rep.sup_after = std::max(rep.sup_after, norm);
  }
  rep.ratio = (rep.sup_before > 0.0) ? rep.sup_after / rep.sup_before : 0.0;
  return rep;
}

}  // namespace swstab

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swstab/family.hpp"

namespace swstab {

/// Quadratic Lyapunov-like data for one subsystem: V_i(x) = x' P x with
/// rate lambda such that V_i(x(t)) <= V_i(x0) exp(-lambda t) along the
/// subsystem flow. lambda > 0 for stable subsystems, <= 0 for unstable ones.
struct QuadraticCertificate {
  SubsystemId id = 0;
  Eigen::MatrixXd P;
  double lambda = 0.0;
};

struct CertificateSet {
  std::vector<QuadraticCertificate> certs;       // sorted by id
  std::map<std::pair<int, int>, double> mu;      // edge (i,j) -> mu_ij >= 1

  const QuadraticCertificate& certificate(SubsystemId id) const;  // throws if absent
  bool has_certificate(SubsystemId id) const;
  double mu_edge(SubsystemId i, SubsystemId j) const;             // throws if absent
};

/// Uniform reductions used by the single-constant theorems:
/// lambda_s = min over stable |lambda_j|, lambda_u = max over unstable
/// |lambda_k| (0 when P_U is empty), mu = max edge constant (1 when no edges).
struct UniformConstants {
  double lambda_s = 0.0;
  double lambda_u = 0.0;
  double mu = 1.0;
};

/// Solves A'P + PA + Q = 0 through the d^2 x d^2 Kronecker system.
/// Requires A Hurwitz (spectral abscissa < -1e-10) and Q symmetric positive
/// definite; result is symmetrized and has residual <= 1e-8 * ||Q||_F.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Decay rate lambda = lambda_min(Q) / lambda_max(P) valid for V = x'Px
/// along xdot = Ax when P solves the Lyapunov equation for (A, Q).
double rate_stable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q,
                   const Eigen::MatrixXd& P);

struct UnstableRate {
  double lambda = 0.0;          // -lambda_max(A + A'), <= 0
  bool strictly_negative = false;
};

/// Matrix-measure growth rate for V = ||x||^2: V' <= lambda_max(A + A') V.
/// Returns lambda = -lambda_max(A + A'); flags the degenerate lambda == 0 case.
UnstableRate rate_unstable(const Eigen::MatrixXd& A);

/// Smallest mu >= 1 with x'P_j x <= mu x'P_i x for all x: the top
/// generalized eigenvalue of the pencil (P_j, P_i), clamped below at 1.
/// Throws on indefinite input.
double mu_pair(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& Pj);

/// Assembles certificates for an all-linear family: stable subsystems via
/// the Lyapunov equation (Q defaults to I), unstable ones via P = I and the
/// matrix-measure rate; mu entries for every admissible edge.
CertificateSet build_certificates(const SwitchedFamily& family,
                                  const std::map<int, Eigen::MatrixXd>& q_choice = {});

UniformConstants uniform_constants(const CertificateSet& set, const Partition& partition);

/// Certificate set with every stable lambda replaced by lambda_s, every
/// unstable lambda by -lambda_u, and every edge constant by the uniform mu.
CertificateSet uniform_reduction(const CertificateSet& set, const Partition& partition);

struct SampleWitness {
  int subsystem_or_edge_from = 0;
  int edge_to = 0;          // 0 for decay-bound witnesses
  Eigen::VectorXd x;
  double t = 0.0;           // 0 for mu witnesses
  double slack = 0.0;
};

/// Sampled verification of the comparison inequality on every edge and, for
/// linear subsystems, of the decay bound against the exact matrix-exponential
/// flow. Slacks are relative; pass means slack >= -1e-9. jobs = 1 runs the
/// serial reference kernel; jobs > 1 the OpenMP kernel (identical results).
struct CertificateCheck {
  double worst_mu_slack = 0.0;
  double worst_decay_slack = 0.0;
  std::optional<SampleWitness> mu_witness;     // present when worst_mu_slack < tol
  std::optional<SampleWitness> decay_witness;
  bool mu_pass = false;
  bool decay_pass = false;

  bool pass() const { return mu_pass && decay_pass; }
};

CertificateCheck verify_certificate_sampled(const CertificateSet& set,
                                            const SwitchedFamily& family,
                                            int n_samples, double horizon,
                                            std::uint64_t seed = 1, int jobs = 1,
                                            double tol = 1e-9);

}  // namespace swstab

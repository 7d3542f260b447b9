#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swstab/certificates.hpp"
#include "swstab/family.hpp"
#include "swstab/signal.hpp"

namespace swstab {

struct Witness {
  std::optional<double> s;  // absent for single-time witnesses
  double t = 0.0;
};

struct Estimator {
  double window = 0.0;
  int samples = 0;
};

/// Outcome of one stabilizing-class check. margin >= 0 iff satisfied; a
/// witness (worst interval or time) is attached whenever violated, and for
/// some satisfied checks the tight interval is echoed too.
struct CriterionReport {
  std::string criterion;
  bool satisfied = false;
  double margin = 0.0;
  std::optional<Witness> witness;
  std::map<std::string, double> parameters;
  std::optional<Estimator> estimator;
};

// ---------------------------------------------------------------------------
// Point-wise (interval-quantified) conditions. Each check maximizes its
// defining expression exactly over the finite breakpoint candidate set; the
// piecewise-linearity argument for each candidate set is documented at the
// implementation.
// ---------------------------------------------------------------------------

/// Dwell time: every holding time (final truncated segment excluded) >= tau_d.
CriterionReport check_dwell_time(const SwitchingSignal& sig, double tau_d);

/// Average dwell time: N(s,t) <= N0 + (t-s)/tau_a for every ]s,t].
CriterionReport check_adt(const SwitchingSignal& sig, double n0, double tau_a);

/// Theorem-1 bound: tau_a must exceed ln(mu)/lambda_s. Requires lambda_s > 0.
double adt_threshold(const UniformConstants& uniform);

struct ReserveTrace {
  std::vector<double> after_switch;  // N0 + tau_i/tau_a - i, one per switch
  double infimum = 0.0;
  bool dwell_regime_reached = false;  // infimum ever < 1
};

/// Remaining fast-switch budget N0 + t/tau_a - N(0,t) just after each switch.
/// Precondition: the signal satisfies check_adt(n0, tau_a); throws otherwise.
ReserveTrace chatter_reserve_trace(const SwitchingSignal& sig, double n0, double tau_a);

struct MdadtParams {
  std::map<int, double> n0;     // per-mode chatter bounds
  std::map<int, double> tau_a;  // per-mode average dwell times
};

/// Mode-dependent ADT: every run of consecutive activations of mode j with
/// total (full) duration D and count n satisfies n <= N0_j + D/tau_a^j.
/// Per-mode margins are echoed as parameters "margin_<j>".
CriterionReport check_mdadt(const SwitchingSignal& sig, const MdadtParams& params);

/// Theorem-2 bounds ln(mu_j)/lambda_j with mu_j = max over incoming edges.
/// Throws unless every lambda_j > 0 (all subsystems stable).
std::map<int, double> mdadt_thresholds(const CertificateSet& set);

/// Unstable-activation budget: T^U(s,t) <= T0 + rho (t-s) for every ]s,t].
CriterionReport check_unstable_budget(const SwitchingSignal& sig, const Partition& partition,
                                      double t0, double rho);

/// Theorem-3 bound ln(mu) / (lambda_s (1-rho) - lambda_u rho); requires
/// rho in [0, lambda_s/(lambda_s+lambda_u)).
double mixed_adt_threshold(const UniformConstants& uniform, double rho);

// ---------------------------------------------------------------------------
// Asymptotic conditions, estimated over a tail window of the finite horizon.
// ---------------------------------------------------------------------------

/// Finite-horizon limsup/liminf estimates: each statistic is evaluated at
/// `samples` times uniformly spaced in [(1-w)T, T]; limsup estimate = max,
/// liminf estimate = min over those samples. These are estimates, not limits.
struct LimitEstimates {
  double window = 0.0;
  int samples = 0;
  std::vector<double> times;
  double nu_lo = 0.0, nu_hi = 0.0;
  std::map<std::pair<int, int>, double> rho_lo, rho_hi;
  std::map<int, double> eta_lo, eta_hi;
  double tail_ratio_hi = 0.0;
  std::optional<double> psi_density_hi;  // filled by the certificate-aware overload
  std::optional<double> psi_density_lo;
};

LimitEstimates estimate_limits(const SwitchingSignal& sig, const TransitionGraph& graph,
                               const Partition& partition, double window, int samples,
                               int jobs = 1);

/// Cumulative log-bound exponent: psi(t) = sum of ln mu over realized
/// transitions up to t minus sum of lambda_{sigma} S_i with the final segment
/// truncated at t; V_{sigma(t)}(x(t)) <= exp(psi(t)) V_{sigma(0)}(x0).
double psi(const SwitchingSignal& sig, const CertificateSet& certs, double t);

/// psi evaluated along a non-decreasing time grid in one sweep.
std::vector<double> psi_trace(const SwitchingSignal& sig, const CertificateSet& certs,
                              std::span<const double> times);

/// Composite density Psi(t) = nu(t) sum (ln mu_kl) rho_kl(t) - sum_j lambda_j
/// eta_j(t) (signed rates); satisfies t * Psi(t) = psi(t) identically.
double composite_density(const SwitchingSignal& sig, const CertificateSet& certs,
                         const TransitionGraph& graph, double t);

/// Unified condition: tail limsup estimate of Psi < 0. margin = -estimate.
CriterionReport check_unified(const SwitchingSignal& sig, const CertificateSet& certs,
                              const TransitionGraph& graph, double window = 0.5,
                              int samples = 256, int jobs = 1);

/// Separated-limit condition: (limsup nu) sum (ln mu_kl)(limsup rho_kl)
/// - sum_S |lambda_j| (liminf eta_j) + sum_U |lambda_k| (limsup eta_k) < 0.
/// Reports both the per-edge value ("lhs") and the uniform-reduced variant
/// ("lhs_uniform").
CriterionReport check_asymptotic(const SwitchingSignal& sig, const CertificateSet& certs,
                                 const Partition& partition, const TransitionGraph& graph,
                                 double window = 0.5, int samples = 256, int jobs = 1);

// ---------------------------------------------------------------------------
// Implication harness: verified class membership, then the unified estimate.
// ---------------------------------------------------------------------------

enum class SignalClass { DwellTime, Adt, Mdadt, Mixed, Asymptotic };

struct ClassParams {
  SignalClass cls = SignalClass::Adt;
  double tau_d = 0.0;                   // dwell
  double n0 = 0.0, tau_a = 0.0;         // adt / mixed
  MdadtParams mdadt;                    // mdadt
  double t0 = 0.0, rho = 0.0;           // mixed
};

struct ImplicationReport {
  CriterionReport class_report;   // membership check (or asymptotic check)
  CriterionReport unified;
  bool implication_holds = false;  // unified satisfied
};

/// Numerically exhibits the unifying implication: verifies the signal in the
/// named class (throwing with the failing report text if membership fails),
/// then evaluates the unified tail estimate. Never claims a proof.
ImplicationReport implication_report(const SwitchingSignal& sig, const ClassParams& params,
                                     const CertificateSet& certs, const Partition& partition,
                                     const TransitionGraph& graph, double window = 0.5,
                                     int samples = 256);

}  // namespace swstab

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "swstab/certificates.hpp"
#include "swstab/criteria.hpp"
#include "swstab/family.hpp"
#include "swstab/signal.hpp"

namespace swstab {

/// File-loadable description of one generation request.
struct GeneratorSpec {
  std::string cls;  // dwell | adt | mdadt | mixed | asymptotic | paper_example | burst | sqrt_growth
  std::map<std::string, double> params;
  std::map<int, double> n0_j;     // mdadt only
  std::map<int, double> tau_a_j;  // mdadt only
  double horizon = 0.0;
  std::uint64_t seed = 1;
};

/// Random admissible signal satisfying check_adt(n0, tau_a) with margin
/// >= (1 - safety) * n0. Deterministic per seed. Throws "cannot extend walk"
/// if the walk reaches a vertex without outgoing edges before the horizon.
SwitchingSignal gen_adt(const SwitchedFamily& family, double n0, double tau_a,
                        double safety, double horizon, std::uint64_t seed);

/// Random admissible signal passing check_mdadt(params): every activation of
/// mode j is held at least tau_a^j.
SwitchingSignal gen_mdadt(const SwitchedFamily& family, const MdadtParams& params,
                          double horizon, std::uint64_t seed);

/// Signal passing both check_adt(n0, tau_a) and check_unstable_budget(t0, rho):
/// stable cruising with unstable insertions scheduled inside the budget.
/// rho = 0 never activates P_U. Throws on infeasible parameter combinations.
SwitchingSignal gen_mixed(const SwitchedFamily& family, const Partition& partition,
                          double n0, double tau_a, double t0, double rho,
                          double horizon, std::uint64_t seed);

/// The three 2x2 matrices of the worked example with P_S = {1}, P_U = {2,3}
/// and the complete admissible graph.
SwitchedFamily paper_family();

/// Literature estimates for the worked example: lambda = (0.9389, -0.7301,
/// -0.7206), mu_12 = mu_13 = 2.0611, mu_21 = mu_31 = 1.0651, mu_23 = mu_32 = 1.
CertificateSet paper_certificates();

struct PaperExample {
  SwitchedFamily family;
  CertificateSet certs;       // uniform-reduced constants used by the example's arithmetic
  CertificateSet certs_edge;  // per-edge literature estimates
  SwitchingSignal signal;
};

/// Periodic realization of the worked example: the walk 1-2-3-1-3-2-(1) uses
/// each admissible edge once per period of 6 * 6.93 s, with per-period
/// occupancy split 0.45 / 0.25 / 0.30 evenly across each mode's two visits.
/// Long-run statistics: nu = 1/6.93, rho_kl = 1/6, eta = (0.45, 0.25, 0.30).
PaperExample gen_paper_example(double horizon, std::uint64_t seed = 1);

/// Signal whose cumulative switch count tracks k0 t - k0p sqrt(t) within +-1
/// wherever that target is >= 1 (clamped to no switches earlier).
SwitchingSignal gen_sqrt_growth(const SwitchedFamily& family, double k0, double k0p,
                                double horizon, std::uint64_t seed);

/// The counterexample signal: one switch just after t = 0, then 2^n switches
/// uniformly spaced over [2^n, 2^n + epsilon] for n = 0..n_max; horizon
/// 2^(n_max+1); modes alternate 1/2. Total switches: 2^(n_max+1).
SwitchingSignal gen_burst(double epsilon, int n_max);

/// Dispatch on spec.cls; mdadt/mixed/adt classes need the family's graph.
SwitchingSignal generate(const SwitchedFamily& family, const GeneratorSpec& spec);

}  // namespace swstab

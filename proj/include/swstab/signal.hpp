#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swstab/family.hpp"

namespace swstab {

/// Piecewise-constant, right-continuous switching signal on [0, horizon].
/// taus[0] == 0 is the initial instant (not a switch); taus[1..M] are the
/// switching instants. Mode modes[i] is active on [taus[i], taus[i+1]) and
/// modes[M] on [taus[M], horizon].
struct SwitchingSignal {
  std::vector<double> taus;
  std::vector<SubsystemId> modes;
  double horizon = 0.0;

  int switches() const { return static_cast<int>(taus.size()) - 1; }
};

inline constexpr double kDefaultMinHolding = 1e-9;

/// Validating constructor. Throws std::invalid_argument on: taus[0] != 0,
/// non-increasing taus, holding below min_holding, equal consecutive modes,
/// size mismatch, horizon < taus.back().
SwitchingSignal make_signal(std::vector<double> taus, std::vector<SubsystemId> modes,
                            double horizon, double min_holding = kDefaultMinHolding);

/// Holding times S_i = taus[i+1] - taus[i]; the final entry is truncated at
/// the horizon and may be zero.
std::vector<double> holding_times(const SwitchingSignal& s);

/// N(s,t): number of switching instants in the half-open interval ]s,t].
int count_switches(const SwitchingSignal& sig, double s, double t);

/// Active mode at time t (right-continuous).
SubsystemId mode_at(const SwitchingSignal& sig, double t);

/// T_j(s,t): Lebesgue measure of ]s,t] intersected with the activation set
/// of mode j (segments taken as ]tau_i, tau_{i+1}]).
double activation_time(const SwitchingSignal& sig, SubsystemId j, double s, double t);

/// (T^S(s,t), T^U(s,t)); always sums to t - s.
std::pair<double, double> stable_unstable_durations(const SwitchingSignal& sig,
                                                    const Partition& partition,
                                                    double s, double t);

struct SignalStats {
  double t = 0.0;
  long long switches = 0;                             // N(0,t)
  std::map<std::pair<int, int>, long long> edge_counts;  // N_kl(0,t), realized edges
  std::map<int, double> duration;                     // T_j(0,t)
  double nu = 0.0;                                    // N(0,t)/t
  bool rho_defined = false;                           // false iff N(0,t) == 0
  std::map<std::pair<int, int>, double> rho;          // empty when undefined
  std::map<int, double> eta;                          // T_j(0,t)/t
};

/// Statistics (13)-(15) at time t in ]0, horizon]. Every realized transition
/// must be admissible in `graph`; otherwise throws naming edge and instant.
SignalStats stats_at(const SwitchingSignal& sig, double t, const TransitionGraph& graph);

/// Batch form of stats_at; pure per entry, parallel across times when
/// jobs > 1 (results identical to the serial path).
std::vector<SignalStats> stats_at_many(const SwitchingSignal& sig,
                                       std::span<const double> times,
                                       const TransitionGraph& graph, int jobs = 1);

struct TailRatio {
  double ratio = 0.0;          // (t - tau_{N(0,t)}) / t
  SubsystemId last_mode = 0;   // mode active just after the last switch <= t
  bool last_mode_unstable = false;  // meaningful only when a partition is given
};

TailRatio tail_ratio(const SwitchingSignal& sig, double t,
                     const Partition* partition = nullptr);

/// Maximal activation episode of one mode, as the interval ]start, end]
/// (end clipped at the horizon for the trailing episode).
struct Episode {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

/// Activation episodes of mode j in time order.
std::vector<Episode> activations_of(const SwitchingSignal& sig, SubsystemId j);

/// Maximal runs during which the active mode lies in P_U (unstable = true)
/// or P_S (unstable = false).
std::vector<Episode> class_runs(const SwitchingSignal& sig, const Partition& partition,
                                bool unstable);

}  // namespace swstab

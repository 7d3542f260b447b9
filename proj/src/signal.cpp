#include "swstab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace swstab {

SwitchingSignal make_signal(std::vector<double> taus, std::vector<SubsystemId> modes,
                            double horizon, double min_holding) {
  if (taus.empty()) throw std::invalid_argument("signal: empty switching-instant list");
  if (taus.size() != modes.size())
    throw std::invalid_argument("signal: taus and modes must have equal length");
  if (taus.front() != 0.0) throw std::invalid_argument("signal: tau_0 must equal 0");
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const double hold = taus[i] - taus[i - 1];
    if (!(hold > 0.0)) throw std::invalid_argument("signal: switching instants must increase");
    if (hold < min_holding) {
      std::ostringstream msg;
      msg << "signal: holding time " << hold << " at switch " << i
          << " below the minimum " << min_holding;
      throw std::invalid_argument(msg.str());
    }
    if (modes[i] == modes[i - 1])
      throw std::invalid_argument("signal: consecutive modes must differ (switch " +
                                  std::to_string(i) + ")");
  }
  if (horizon < taus.back())
    throw std::invalid_argument("signal: horizon precedes the last switching instant");
  return SwitchingSignal{std::move(taus), std::move(modes), horizon};
}

std::vector<double> holding_times(const SwitchingSignal& s) {
  std::vector<double> hold(s.taus.size());
  for (std::size_t i = 0; i + 1 < s.taus.size(); ++i) hold[i] = s.taus[i + 1] - s.taus[i];
  hold.back() = s.horizon - s.taus.back();
  return hold;
}

int count_switches(const SwitchingSignal& sig, double s, double t) {
  if (s > t) throw std::invalid_argument("count_switches: interval with s > t");
  // switches are taus[1..M]; count those in ]s,t]
  const auto lo = std::upper_bound(sig.taus.begin() + 1, sig.taus.end(), s);
  const auto hi = std::upper_bound(sig.taus.begin() + 1, sig.taus.end(), t);
  return static_cast<int>(hi - lo);
}

SubsystemId mode_at(const SwitchingSignal& sig, double t) {
  // last tau <= t (right-continuous)
  auto it = std::upper_bound(sig.taus.begin(), sig.taus.end(), t);
  if (it == sig.taus.begin()) return sig.modes.front();  // t < 0 queries clamp to start
  return sig.modes[static_cast<std::size_t>(it - sig.taus.begin()) - 1];
}

double activation_time(const SwitchingSignal& sig, SubsystemId j, double s, double t) {
  if (s > t) throw std::invalid_argument("activation_time: interval with s > t");
  if (j < 1) throw std::out_of_range("activation_time: unknown mode id " + std::to_string(j));
  double total = 0.0;  // a valid mode absent from the signal contributes 0
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (sig.modes[i] != j) continue;
    const double seg_end = (i + 1 < n) ? sig.taus[i + 1] : sig.horizon;
    total += std::max(0.0, std::min(t, seg_end) - std::max(s, sig.taus[i]));
  }
  return total;
}

std::pair<double, double> stable_unstable_durations(const SwitchingSignal& sig,
                                                    const Partition& partition,
                                                    double s, double t) {
  if (s > t) throw std::invalid_argument("stable_unstable_durations: interval with s > t");
  double unstable = 0.0;
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!partition.is_unstable(sig.modes[i])) continue;
    const double seg_end = (i + 1 < n) ? sig.taus[i + 1] : sig.horizon;
    unstable += std::max(0.0, std::min(t, seg_end) - std::max(s, sig.taus[i]));
  }
  return {(t - s) - unstable, unstable};
}

SignalStats stats_at(const SwitchingSignal& sig, double t, const TransitionGraph& graph) {
  if (!(t > 0.0)) throw std::invalid_argument("stats_at: t must be positive");
  if (t > sig.horizon) throw std::invalid_argument("stats_at: t beyond the horizon");

  SignalStats st;
  st.t = t;
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double seg_start = sig.taus[i];
    if (seg_start > t) break;
    const SubsystemId m = sig.modes[i];
    if (i >= 1) {
      const SubsystemId from = sig.modes[i - 1];
      if (!graph.contains(from, m)) {
        std::ostringstream msg;
        msg << "stats_at: inadmissible transition (" << from << "," << m << ") at t="
            << seg_start;
        throw std::invalid_argument(msg.str());
      }
      ++st.switches;
      ++st.edge_counts[{from, m}];
    }
    const double seg_end = (i + 1 < n) ? sig.taus[i + 1] : sig.horizon;
    st.duration[m] += std::max(0.0, std::min(t, seg_end) - seg_start);
  }
  st.nu = static_cast<double>(st.switches) / t;
  st.rho_defined = st.switches > 0;
  if (st.rho_defined)
    for (const auto& [edge, cnt] : st.edge_counts)
      st.rho[edge] = static_cast<double>(cnt) / static_cast<double>(st.switches);
  for (const auto& [m, dur] : st.duration) st.eta[m] = dur / t;
  return st;
}

std::vector<SignalStats> stats_at_many(const SwitchingSignal& sig,
                                       std::span<const double> times,
                                       const TransitionGraph& graph, int jobs) {
  std::vector<SignalStats> out(times.size());
  const auto n = static_cast<std::ptrdiff_t>(times.size());
  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = stats_at(sig, times[k], graph);
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = stats_at(sig, times[k], graph);
  }
  return out;
}

TailRatio tail_ratio(const SwitchingSignal& sig, double t, const Partition* partition) {
  if (!(t > 0.0)) throw std::invalid_argument("tail_ratio: t must be positive");
  auto it = std::upper_bound(sig.taus.begin(), sig.taus.end(), t);
  const std::size_t idx = static_cast<std::size_t>(it - sig.taus.begin()) - 1;
  TailRatio r;
  r.ratio = (t - sig.taus[idx]) / t;
  r.last_mode = sig.modes[idx];
  r.last_mode_unstable = partition != nullptr && partition->is_unstable(r.last_mode);
  return r;
}

std::vector<Episode> activations_of(const SwitchingSignal& sig, SubsystemId j) {
  std::vector<Episode> eps;
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (sig.modes[i] != j) continue;
    const double end = (i + 1 < n) ? sig.taus[i + 1] : sig.horizon;
    eps.push_back({sig.taus[i], end});
  }
  return eps;
}

std::vector<Episode> class_runs(const SwitchingSignal& sig, const Partition& partition,
                                bool unstable) {
  std::vector<Episode> runs;
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (partition.is_unstable(sig.modes[i]) != unstable) continue;
    const double start = sig.taus[i];
    const double end = (i + 1 < n) ? sig.taus[i + 1] : sig.horizon;
    if (!runs.empty() && runs.back().end == start)
      runs.back().end = end;  // merge consecutive same-class segments
    else
      runs.push_back({start, end});
  }
  return runs;
}

}  // namespace swstab

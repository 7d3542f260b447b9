#pragma once

// Shared builders and independent oracles for the test suites. Oracles here
// deliberately avoid the library's candidate-set code paths: activation times
// are re-measured on dense grids and the interval checks are re-maximized
// over grid pairs.

#include <algorithm>
#include <cmath>
#include <vector>

#include "swstab/certificates.hpp"
#include "swstab/criteria.hpp"
#include "swstab/family.hpp"
#include "swstab/rng.hpp"
#include "swstab/signal.hpp"

namespace swstab::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, int d, double scale = 1.0) {
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

inline Eigen::MatrixXd random_hurwitz(Rng& rng, int d, double margin_lo = 0.1,
                                      double margin_hi = 1.0) {
  const Eigen::MatrixXd r = random_matrix(rng, d);
  const double shift = spectral_abscissa(r) + rng.uniform(margin_lo, margin_hi);
  return r - shift * Eigen::MatrixXd::Identity(d, d);
}

inline Eigen::MatrixXd random_unstable_matrix(Rng& rng, int d, double abscissa_hi = 0.5) {
  const Eigen::MatrixXd r = random_matrix(rng, d, 0.5);
  const double target = rng.uniform(0.05, abscissa_hi);
  return r + (target - spectral_abscissa(r)) * Eigen::MatrixXd::Identity(d, d);
}

inline Eigen::MatrixXd random_spd(Rng& rng, int d) {
  const Eigen::MatrixXd b = random_matrix(rng, d);
  return b.transpose() * b + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

/// Complete-graph linear family with the first n - n_unstable subsystems
/// stable.
inline SwitchedFamily random_family(Rng& rng, int n, int d, int n_unstable = 0) {
  SwitchedFamily fam;
  fam.dimension = d;
  for (int i = 1; i <= n; ++i) {
    Subsystem sub;
    sub.id = i;
    if (i <= n - n_unstable) {
      sub.declared = SubsystemClass::Stable;
      sub.A = random_hurwitz(rng, d);
    } else {
      sub.declared = SubsystemClass::Unstable;
      sub.A = random_unstable_matrix(rng, d);
    }
    fam.subsystems.push_back(std::move(sub));
  }
  fam.graph = complete_graph(n);
  return fam;
}

/// Random admissible signal over a complete n-mode graph; holds drawn from
/// [hold_lo, hold_hi]. snap > 0 snaps every instant to that grid.
inline SwitchingSignal random_signal(Rng& rng, int n_modes, double horizon,
                                     double hold_lo = 0.05, double hold_hi = 0.8,
                                     double snap = 0.0) {
  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{1 + rng.index(n_modes)};
  double t = 0.0;
  for (;;) {
    double hold = rng.uniform(hold_lo, hold_hi);
    if (snap > 0.0) hold = std::max(snap, std::round(hold / snap) * snap);
    t += hold;
    if (snap > 0.0) t = std::round(t / snap) * snap;
    if (t > horizon - 1e-12 || t <= taus.back()) break;
    taus.push_back(t);
    int next = 1 + rng.index(n_modes);
    while (next == modes.back()) next = 1 + rng.index(n_modes);
    modes.push_back(next);
  }
  return make_signal(std::move(taus), std::move(modes), horizon);
}

// ---------------------------------------------------------------------------
// Grid oracles (criterion: candidate maxima must dominate these, equality
// when every breakpoint sits on the grid). Counting uses closed windows
// [s, t], the closure realization of the half-open definitions.
// ---------------------------------------------------------------------------

struct GridMax {
  double value = 0.0;
};

/// max over grid pairs s <= t of  #(switches in [s,t]) - (t-s)/tau_a.
inline GridMax grid_adt_max(const SwitchingSignal& sig, double tau_a, double h) {
  const int g = static_cast<int>(std::floor(sig.horizon / h + 0.5));
  std::vector<double> le(g + 1, 0.0), lt(g + 1, 0.0);
  for (int k = 0; k <= g; ++k) {
    const double t = k * h;
    double c_le = 0.0, c_lt = 0.0;
    for (std::size_t i = 1; i < sig.taus.size(); ++i) {
      if (sig.taus[i] <= t + 1e-12) c_le += 1.0;
      if (sig.taus[i] < t - 1e-12) c_lt += 1.0;
    }
    le[k] = c_le;
    lt[k] = c_lt;
  }
  // value(i,j) = (le[j] - lt[i]) - (j-i)h/tau_a; suffix max over j of
  // le[j] - jh/tau_a makes the pair scan linear without changing the max
  double best = 0.0;
  double suffix = -1e300;
  for (int i = g; i >= 0; --i) {
    suffix = std::max(suffix, le[i] - i * h / tau_a);
    best = std::max(best, suffix - (lt[i] - i * h / tau_a));
  }
  return {best};
}

/// Plain O(G^2) variant used on a subset to defend the suffix-max trick.
inline GridMax grid_adt_max_quadratic(const SwitchingSignal& sig, double tau_a, double h) {
  const int g = static_cast<int>(std::floor(sig.horizon / h + 0.5));
  std::vector<double> le(g + 1, 0.0), lt(g + 1, 0.0);
  for (int k = 0; k <= g; ++k) {
    const double t = k * h;
    for (std::size_t i = 1; i < sig.taus.size(); ++i) {
      if (sig.taus[i] <= t + 1e-12) le[k] += 1.0;
      if (sig.taus[i] < t - 1e-12) lt[k] += 1.0;
    }
  }
  double best = 0.0;
  for (int i = 0; i <= g; ++i)
    for (int j = i; j <= g; ++j)
      best = std::max(best, (le[j] - lt[i]) - (j - i) * h / tau_a);
  return {best};
}

/// max over grid pairs of (activation starts of mode j in [s,t]) minus the
/// full durations of those activations divided by tau_j.
inline GridMax grid_mdadt_max(const SwitchingSignal& sig, SubsystemId mode, double tau_j,
                              double h) {
  const auto eps = activations_of(sig, mode);
  const int g = static_cast<int>(std::floor(sig.horizon / h + 0.5));
  double best = 0.0;
  double suffix = -1e300;
  auto value_le = [&](double t) {  // starts <= t, with their full durations
    double cnt = 0.0, dur = 0.0;
    for (const auto& e : eps)
      if (e.start <= t + 1e-12) {
        cnt += 1.0;
        dur += e.duration();
      }
    return cnt - dur / tau_j;
  };
  auto value_lt = [&](double t) {
    double cnt = 0.0, dur = 0.0;
    for (const auto& e : eps)
      if (e.start < t - 1e-12) {
        cnt += 1.0;
        dur += e.duration();
      }
    return cnt - dur / tau_j;
  };
  for (int i = g; i >= 0; --i) {
    suffix = std::max(suffix, value_le(i * h));
    best = std::max(best, suffix - value_lt(i * h));
  }
  return {best};
}

/// max over grid pairs of T^U(s,t) - rho (t-s), from the cumulative unstable
/// occupation measured independently.
inline GridMax grid_budget_max(const SwitchingSignal& sig, const Partition& partition,
                               double rho, double h) {
  const int g = static_cast<int>(std::floor(sig.horizon / h + 0.5));
  std::vector<double> cum(g + 1, 0.0);
  for (int k = 1; k <= g; ++k) {
    double u = 0.0;
    const double lo = (k - 1) * h, hi = k * h;
    for (std::size_t i = 0; i < sig.taus.size(); ++i) {
      if (!partition.is_unstable(sig.modes[i])) continue;
      const double seg_end = (i + 1 < sig.taus.size()) ? sig.taus[i + 1] : sig.horizon;
      u += std::max(0.0, std::min(hi, seg_end) - std::max(lo, sig.taus[i]));
    }
    cum[k] = cum[k - 1] + u;
  }
  double best = 0.0;
  double suffix = -1e300;
  for (int i = g; i >= 0; --i) {
    suffix = std::max(suffix, cum[i] - rho * i * h);
    best = std::max(best, suffix - (cum[i] - rho * i * h));
  }
  return {best};
}

}  // namespace swstab::testing

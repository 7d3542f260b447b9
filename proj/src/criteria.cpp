#include "swstab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swstab {

namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

std::vector<double> tail_times(double horizon, double window, int samples) {
  if (!(window > 0.0) || window > 1.0)
    throw std::invalid_argument("estimator window must lie in (0, 1]");
  if (samples < 2) throw std::invalid_argument("estimator needs at least 2 samples");
  if (!(horizon > 0.0)) throw std::invalid_argument("estimator needs a positive horizon");
  std::vector<double> times(static_cast<std::size_t>(samples));
  const double t0 = (1.0 - window) * horizon;
  const double dt = (horizon - t0) / (samples - 1);
  for (int k = 0; k < samples; ++k) times[static_cast<std::size_t>(k)] = t0 + k * dt;
  if (times.front() <= 0.0) times.front() = std::min(horizon * 1e-9, times[1] * 0.5);
  return times;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dwell time
// ---------------------------------------------------------------------------

CriterionReport check_dwell_time(const SwitchingSignal& sig, double tau_d) {
  if (!(tau_d > 0.0)) throw std::invalid_argument("check_dwell_time: tau_d must be positive");
  CriterionReport rep;
  rep.criterion = "dwell";
  rep.parameters["tau_d"] = tau_d;
  const auto holds = holding_times(sig);
  // final truncated segment excluded; a no-switch signal is vacuously fine
  double min_hold = kHuge;
  std::size_t arg = 0;
  for (std::size_t i = 0; i + 1 < holds.size(); ++i) {
    if (holds[i] < min_hold) {
      min_hold = holds[i];
      arg = i;
    }
  }
  rep.margin = (min_hold == kHuge) ? kHuge : min_hold - tau_d;
  rep.satisfied = rep.margin >= 0.0;
  if (!rep.satisfied) rep.witness = Witness{sig.taus[arg], sig.taus[arg + 1]};
  return rep;
}

// ---------------------------------------------------------------------------
// Average dwell time.
//
// N(s,t) - (t-s)/tau_a is maximized, over all ]s,t], by intervals whose
// closure starts at a switching instant tau_p and ends at tau_q >= tau_p:
// N jumps only at switching instants while the length term is linear, so the
// supremum over s in [tau_{p-1}, tau_p) is approached as s -> tau_p(-) with
// value (q-p+1) - (tau_q - tau_p)/tau_a, and enlarging t beyond a switching
// instant only pays length. The candidate maximum therefore equals the
// supremum over all intervals (attained in closure).
// ---------------------------------------------------------------------------

namespace {

struct PairScan {
  double best = 0.0;  // empty interval keeps 0 as the floor
  std::size_t arg_lo = 0, arg_hi = 0;
  bool found = false;
};

// max over p <= q of value[q] - value[p] + gain, linear scan with running min
PairScan scan_pairs(const std::vector<double>& value, double gain) {
  PairScan r;
  if (value.empty()) return r;
  std::size_t argmin = 0;
  for (std::size_t q = 0; q < value.size(); ++q) {
    if (value[q] < value[argmin]) argmin = q;
    const double v = value[q] - value[argmin] + gain;
    if (!r.found || v > r.best) {
      r.best = v;
      r.arg_lo = argmin;
      r.arg_hi = q;
      r.found = true;
    }
  }
  return r;
}

}  // namespace

CriterionReport check_adt(const SwitchingSignal& sig, double n0, double tau_a) {
  if (!(n0 > 0.0) || !(tau_a > 0.0))
    throw std::invalid_argument("check_adt: N0 and tau_a must be positive");
  CriterionReport rep;
  rep.criterion = "adt";
  rep.parameters["N0"] = n0;
  rep.parameters["tau_a"] = tau_a;

  const int m = sig.switches();
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k)
    v[static_cast<std::size_t>(k - 1)] = k - sig.taus[static_cast<std::size_t>(k)] / tau_a;
  const PairScan scan = scan_pairs(v, 1.0);
  const double worst = std::max(0.0, scan.found ? scan.best : 0.0);

  rep.margin = n0 - worst;
  rep.satisfied = rep.margin >= 0.0;
  if (scan.found) {
    // witness interval ]s,t] with s just below tau_p; echoed even when satisfied
    rep.witness = Witness{sig.taus[scan.arg_lo + 1], sig.taus[scan.arg_hi + 1]};
  }
  if (rep.satisfied && !scan.found) rep.witness.reset();
  return rep;
}

double adt_threshold(const UniformConstants& uniform) {
  if (!(uniform.lambda_s > 0.0)) throw std::invalid_argument("adt_threshold: lambda_s <= 0");
  return std::log(uniform.mu) / uniform.lambda_s;
}

ReserveTrace chatter_reserve_trace(const SwitchingSignal& sig, double n0, double tau_a) {
  const CriterionReport adt = check_adt(sig, n0, tau_a);
  if (!adt.satisfied) throw std::invalid_argument("chatter_reserve_trace: ADT not satisfied");
  ReserveTrace trace;
  trace.infimum = n0;  // reserve at t = 0+, before any switch
  for (int k = 1; k <= sig.switches(); ++k) {
    const double reserve = n0 + sig.taus[static_cast<std::size_t>(k)] / tau_a - k;
    trace.after_switch.push_back(reserve);
    trace.infimum = std::min(trace.infimum, reserve);
  }
  trace.dwell_regime_reached = trace.infimum < 1.0;
  return trace;
}

// ---------------------------------------------------------------------------
// Mode-dependent average dwell time.
//
// Counting convention: an activation is attributed, with its full duration
// (trailing episode clipped at the horizon), to its starting instant; the
// initial segment counts as an activation starting at 0. The condition is
// then equivalent to: every run of consecutive activations p..q of mode j
// satisfies (q-p+1) <= N0_j + (d_p + ... + d_q)/tau_a^j. Runs are the
// breakpoint candidates: between activation starts both sides of the
// inequality are constant in s and t, so the maximum over intervals equals
// the maximum over runs.
// ---------------------------------------------------------------------------

CriterionReport check_mdadt(const SwitchingSignal& sig, const MdadtParams& params) {
  CriterionReport rep;
  rep.criterion = "mdadt";
  rep.satisfied = true;
  rep.margin = kHuge;

  for (const auto& [mode, n0_j] : params.n0) {
    const auto it = params.tau_a.find(mode);
    if (it == params.tau_a.end())
      throw std::invalid_argument("check_mdadt: missing tau_a for mode " + std::to_string(mode));
    const double tau_j = it->second;
    if (!(n0_j > 0.0) || !(tau_j > 0.0))
      throw std::invalid_argument("check_mdadt: parameters must be positive");

    const auto episodes = activations_of(sig, mode);
    // u(k) = k - D_k/tau with D_k the duration prefix sum; run value
    // (q-p+1) - (D_q - D_{p-1})/tau equals u(q) - u(p-1)
    std::vector<double> u(episodes.size() + 1, 0.0);
    double prefix = 0.0;
    for (std::size_t k = 0; k < episodes.size(); ++k) {
      prefix += episodes[k].duration();
      u[k + 1] = static_cast<double>(k + 1) - prefix / tau_j;
    }
    const PairScan scan = scan_pairs(u, 0.0);
    const double worst = scan.found ? scan.best : 0.0;
    const double margin_j = n0_j - std::max(0.0, worst);
    rep.parameters["margin_" + std::to_string(mode)] = margin_j;
    if (margin_j < rep.margin) {
      rep.margin = margin_j;
      if (scan.found && scan.arg_hi > scan.arg_lo) {
        rep.witness = Witness{episodes[scan.arg_lo].start, episodes[scan.arg_hi - 1].end};
      } else if (!episodes.empty()) {
        const auto& e = episodes[std::min(scan.arg_hi, episodes.size() - 1)];
        rep.witness = Witness{e.start, e.end};
      }
    }
    rep.parameters["N0_" + std::to_string(mode)] = n0_j;
    rep.parameters["tau_a_" + std::to_string(mode)] = tau_j;
  }
  rep.satisfied = rep.margin >= 0.0;
  if (rep.satisfied) rep.witness.reset();
  return rep;
}

std::map<int, double> mdadt_thresholds(const CertificateSet& set) {
  std::map<int, double> mu_in;  // mu_j = max over incoming edges (i,j)
  for (const auto& cert : set.certs) mu_in[cert.id] = 1.0;
  for (const auto& [edge, value] : set.mu) {
    auto it = mu_in.find(edge.second);
    if (it != mu_in.end()) it->second = std::max(it->second, value);
  }
  std::map<int, double> thresholds;
  for (const auto& cert : set.certs) {
    if (!(cert.lambda > 0.0))
      throw std::invalid_argument("mdadt_thresholds: Theorem 2 requires all subsystems stable");
    thresholds[cert.id] = std::log(mu_in[cert.id]) / cert.lambda;
  }
  return thresholds;
}

// ---------------------------------------------------------------------------
// Unstable-activation budget.
//
// T^U(s,t) - rho (t-s) is piecewise linear in s and t with slope 1 - rho > 0
// in t inside unstable runs and -rho outside (mirrored in s), so its maximum
// sits at s = start of an unstable run and t = end of a (later) unstable
// run. With D the prefix sums of run durations, the run-pair value is
// (D_b - D_{a-1}) - rho (end_b - start_a).
// ---------------------------------------------------------------------------

CriterionReport check_unstable_budget(const SwitchingSignal& sig, const Partition& partition,
                                      double t0, double rho) {
  if (t0 < 0.0) throw std::invalid_argument("check_unstable_budget: T0 must be >= 0");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("check_unstable_budget: rho must lie in [0, 1)");
  CriterionReport rep;
  rep.criterion = "unstable_budget";
  rep.parameters["T0"] = t0;
  rep.parameters["rho"] = rho;

  const auto runs = class_runs(sig, partition, /*unstable=*/true);
  double best = 0.0;
  std::size_t best_a = 0, best_b = 0;
  bool found = false;
  double prefix = 0.0;
  double min_w2 = kHuge;
  std::size_t argmin = 0;
  for (std::size_t b = 0; b < runs.size(); ++b) {
    const double w2 = prefix - rho * runs[b].start;  // D_{a-1} - rho start_a at a = b
    if (w2 < min_w2) {
      min_w2 = w2;
      argmin = b;
    }
    prefix += runs[b].duration();
    const double w1 = prefix - rho * runs[b].end;
    if (!found || w1 - min_w2 > best) {
      best = w1 - min_w2;
      best_a = argmin;
      best_b = b;
      found = true;
    }
  }
  const double worst = std::max(0.0, found ? best : 0.0);
  rep.margin = t0 - worst;
  rep.satisfied = rep.margin >= 0.0;
  if (found) rep.witness = Witness{runs[best_a].start, runs[best_b].end};
  if (rep.satisfied && !found) rep.witness.reset();
  return rep;
}

double mixed_adt_threshold(const UniformConstants& uniform, double rho) {
  if (!(uniform.lambda_s > 0.0))
    throw std::invalid_argument("mixed_adt_threshold: lambda_s <= 0");
  const double denom = uniform.lambda_s * (1.0 - rho) - uniform.lambda_u * rho;
  if (rho < 0.0 || denom <= 0.0)
    throw std::invalid_argument("mixed_adt_threshold: denominator non-positive (rho at or above "
                                "lambda_s/(lambda_s+lambda_u))");
  return std::log(uniform.mu) / denom;
}

// ---------------------------------------------------------------------------
// Tail estimators and the proof quantities psi / Psi
// ---------------------------------------------------------------------------

LimitEstimates estimate_limits(const SwitchingSignal& sig, const TransitionGraph& graph,
                               const Partition& partition, double window, int samples,
                               int jobs) {
  LimitEstimates est;
  est.window = window;
  est.samples = samples;
  est.times = tail_times(sig.horizon, window, samples);

  const auto stats = stats_at_many(sig, est.times, graph, jobs);

  est.nu_lo = kHuge;
  est.nu_hi = -kHuge;
  est.tail_ratio_hi = 0.0;
  for (const auto& edge : graph.edges) {
    est.rho_lo[edge] = kHuge;
    est.rho_hi[edge] = -kHuge;
  }
  // modes present anywhere in the signal or partition
  for (SubsystemId j : partition.stable) est.eta_lo[j] = kHuge;
  for (SubsystemId j : partition.unstable) est.eta_lo[j] = kHuge;
  for (SubsystemId j : sig.modes)
    if (est.eta_lo.find(j) == est.eta_lo.end()) est.eta_lo[j] = kHuge;
  for (const auto& [j, lo] : est.eta_lo) est.eta_hi[j] = -kHuge;

  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& st = stats[k];
    est.nu_lo = std::min(est.nu_lo, st.nu);
    est.nu_hi = std::max(est.nu_hi, st.nu);
    for (auto& [edge, lo] : est.rho_lo) {
      const auto it = st.rho.find(edge);
      const double r = (it != st.rho.end()) ? it->second : 0.0;
      lo = std::min(lo, r);
      est.rho_hi[edge] = std::max(est.rho_hi[edge], r);
    }
    for (auto& [j, lo] : est.eta_lo) {
      const auto it = st.eta.find(j);
      const double e = (it != st.eta.end()) ? it->second : 0.0;
      lo = std::min(lo, e);
      est.eta_hi[j] = std::max(est.eta_hi[j], e);
    }
    est.tail_ratio_hi = std::max(est.tail_ratio_hi, tail_ratio(sig, est.times[k]).ratio);
  }
  return est;
}

double psi(const SwitchingSignal& sig, const CertificateSet& certs, double t) {
  if (t < 0.0) throw std::invalid_argument("psi: t must be >= 0");
  if (t > sig.horizon) throw std::invalid_argument("psi: t beyond the horizon");
  double value = 0.0;
  const std::size_t n = sig.taus.size();
  for (std::size_t i = 0; i < n && sig.taus[i] <= t; ++i) {
    const double seg_end = (i + 1 < n) ? std::min(sig.taus[i + 1], t) : t;
    value -= certs.certificate(sig.modes[i]).lambda * (seg_end - sig.taus[i]);
    if (i + 1 < n && sig.taus[i + 1] <= t)
      value += std::log(certs.mu_edge(sig.modes[i], sig.modes[i + 1]));
  }
  return value;
}

std::vector<double> psi_trace(const SwitchingSignal& sig, const CertificateSet& certs,
                              std::span<const double> times) {
  std::vector<double> out(times.size());
  std::size_t seg = 0;
  double base = 0.0;  // psi at taus[seg]
  const std::size_t n = sig.taus.size();
  double prev = -kHuge;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < prev) throw std::invalid_argument("psi_trace: times must be non-decreasing");
    prev = t;
    while (seg + 1 < n && sig.taus[seg + 1] <= t) {
      base -= certs.certificate(sig.modes[seg]).lambda * (sig.taus[seg + 1] - sig.taus[seg]);
      base += std::log(certs.mu_edge(sig.modes[seg], sig.modes[seg + 1]));
      ++seg;
    }
    out[k] = base - certs.certificate(sig.modes[seg]).lambda * (t - sig.taus[seg]);
  }
  return out;
}

double composite_density(const SwitchingSignal& sig, const CertificateSet& certs,
                         const TransitionGraph& graph, double t) {
  const SignalStats st = stats_at(sig, t, graph);
  double value = 0.0;
  if (st.rho_defined)
    for (const auto& [edge, r] : st.rho)
      value += st.nu * std::log(certs.mu_edge(edge.first, edge.second)) * r;
  for (const auto& [j, e] : st.eta) value -= certs.certificate(j).lambda * e;
  return value;
}

CriterionReport check_unified(const SwitchingSignal& sig, const CertificateSet& certs,
                              const TransitionGraph& graph, double window, int samples,
                              int jobs) {
  const auto times = tail_times(sig.horizon, window, samples);
  const auto stats = stats_at_many(sig, times, graph, jobs);
  double worst = -kHuge;
  double worst_t = times.front();
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& st = stats[k];
    double v = 0.0;
    if (st.rho_defined)
      for (const auto& [edge, r] : st.rho)
        v += st.nu * std::log(certs.mu_edge(edge.first, edge.second)) * r;
    for (const auto& [j, e] : st.eta) v -= certs.certificate(j).lambda * e;
    if (v > worst) {
      worst = v;
      worst_t = times[k];
    }
  }
  CriterionReport rep;
  rep.criterion = "unified";
  rep.margin = -worst;
  rep.satisfied = rep.margin > 0.0;  // condition is strict: limsup estimate < 0
  rep.estimator = Estimator{window, samples};
  rep.parameters["psi_density_limsup_estimate"] = worst;
  rep.witness = Witness{std::nullopt, worst_t};
  return rep;
}

CriterionReport check_asymptotic(const SwitchingSignal& sig, const CertificateSet& certs,
                                 const Partition& partition, const TransitionGraph& graph,
                                 double window, int samples, int jobs) {
  const LimitEstimates est = estimate_limits(sig, graph, partition, window, samples, jobs);

  double transitions = 0.0;  // per-edge ln(mu_kl) weighted limsup rho
  double transitions_sum_rho = 0.0;
  for (const auto& [edge, hi] : est.rho_hi) {
    transitions += std::log(certs.mu_edge(edge.first, edge.second)) * hi;
    transitions_sum_rho += hi;
  }
  double lhs = est.nu_hi * transitions;
  for (SubsystemId j : partition.stable) {
    const auto it = est.eta_lo.find(j);
    lhs -= std::abs(certs.certificate(j).lambda) * (it != est.eta_lo.end() ? it->second : 0.0);
  }
  for (SubsystemId k : partition.unstable) {
    const auto it = est.eta_hi.find(k);
    lhs += std::abs(certs.certificate(k).lambda) * (it != est.eta_hi.end() ? it->second : 0.0);
  }

  // uniform-reduced variant of the same estimate (reported alongside)
  const UniformConstants u = uniform_constants(certs, partition);
  double lhs_uniform = est.nu_hi * std::log(u.mu) * transitions_sum_rho;
  for (SubsystemId j : partition.stable) {
    const auto it = est.eta_lo.find(j);
    lhs_uniform -= u.lambda_s * (it != est.eta_lo.end() ? it->second : 0.0);
  }
  for (SubsystemId k : partition.unstable) {
    const auto it = est.eta_hi.find(k);
    lhs_uniform += u.lambda_u * (it != est.eta_hi.end() ? it->second : 0.0);
  }

  CriterionReport rep;
  rep.criterion = "asymptotic";
  rep.margin = -lhs;
  rep.satisfied = rep.margin > 0.0;  // strict inequality
  rep.estimator = Estimator{window, samples};
  rep.parameters["lhs"] = lhs;
  rep.parameters["lhs_uniform"] = lhs_uniform;
  return rep;
}

ImplicationReport implication_report(const SwitchingSignal& sig, const ClassParams& params,
                                     const CertificateSet& certs, const Partition& partition,
                                     const TransitionGraph& graph, double window,
                                     int samples) {
  ImplicationReport rep;
  switch (params.cls) {
    case SignalClass::DwellTime:
      rep.class_report = check_dwell_time(sig, params.tau_d);
      break;
    case SignalClass::Adt:
      rep.class_report = check_adt(sig, params.n0, params.tau_a);
      break;
    case SignalClass::Mdadt:
      rep.class_report = check_mdadt(sig, params.mdadt);
      break;
    case SignalClass::Mixed: {
      rep.class_report = check_adt(sig, params.n0, params.tau_a);
      if (rep.class_report.satisfied) {
        const CriterionReport budget =
            check_unstable_budget(sig, partition, params.t0, params.rho);
        if (!budget.satisfied) rep.class_report = budget;
        rep.class_report.parameters["budget_margin"] = budget.margin;
      }
      break;
    }
    case SignalClass::Asymptotic:
      rep.class_report = check_asymptotic(sig, certs, partition, graph, window, samples);
      break;
  }
  if (!rep.class_report.satisfied) {
    std::ostringstream msg;
    msg << "implication_report: class verification failed (" << rep.class_report.criterion
        << ", margin " << rep.class_report.margin << ")";
    throw std::invalid_argument(msg.str());
  }
  rep.unified = check_unified(sig, certs, graph, window, samples);
  rep.implication_holds = rep.unified.satisfied;
  return rep;
}

}  // namespace swstab

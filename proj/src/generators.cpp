#include "swstab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "swstab/rng.hpp"

namespace swstab {

namespace {

std::vector<SubsystemId> out_neighbors(const TransitionGraph& graph, SubsystemId v) {
  std::vector<SubsystemId> out;
  for (const auto& [i, j] : graph.edges)
    if (i == v) out.push_back(j);
  return out;
}

[[noreturn]] void infeasible(const std::string& why) {
  throw std::invalid_argument("generator: infeasible parameter combination: " + why);
}

}  // namespace

// ---------------------------------------------------------------------------
// ADT class. Feasibility of the m-th switch at time t against every interval
// candidate (p, m) reduces to t >= tau_a (m + 1 - budget - min_p v_p) with
// v_p = p - t_p/tau_a, so one running minimum suffices.
// ---------------------------------------------------------------------------

SwitchingSignal gen_adt(const SwitchedFamily& family, double n0, double tau_a,
                        double safety, double horizon, std::uint64_t seed) {
  if (!(n0 > 0.0) || !(tau_a > 0.0)) throw std::invalid_argument("gen_adt: N0, tau_a > 0");
  if (!(safety > 0.0) || safety > 1.0) throw std::invalid_argument("gen_adt: safety in (0,1]");
  if (!(horizon > 0.0)) throw std::invalid_argument("gen_adt: horizon > 0");
  Rng rng(seed);

  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{family.subsystems[rng.index(family.size())].id};

  const double budget = safety * n0;
  if (budget < 1.0)  // even a lone switch would overdraw the scaled chatter bound
    return make_signal(std::move(taus), std::move(modes), horizon);

  double v_min = std::numeric_limits<double>::max();  // min over placed switches of v_p
  int m = 0;
  double t_prev = 0.0;
  for (;;) {
    double t_min = t_prev + std::max(1e-8, 1e-6 * tau_a);
    if (m >= 1) t_min = std::max(t_min, tau_a * (m + 2 - budget - v_min));
    const double t = t_min + tau_a * rng.uniform(0.0, 0.9);
    if (t > horizon) break;
    const auto next = out_neighbors(family.graph, modes.back());
    if (next.empty())
      throw std::runtime_error("gen_adt: cannot extend walk: vertex " +
                               std::to_string(modes.back()) + " has no outgoing edge");
    taus.push_back(t);
    modes.push_back(next[rng.index(static_cast<int>(next.size()))]);
    ++m;
    v_min = std::min(v_min, m - t / tau_a);
    t_prev = t;
  }
  return make_signal(std::move(taus), std::move(modes), horizon);
}

// ---------------------------------------------------------------------------
// MDADT class: hold every activation of mode j for at least tau_a^j, which
// keeps every run value (count minus duration/tau) non-positive.
// ---------------------------------------------------------------------------

SwitchingSignal gen_mdadt(const SwitchedFamily& family, const MdadtParams& params,
                          double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("gen_mdadt: horizon > 0");
  for (const auto& sub : family.subsystems) {
    const auto n0 = params.n0.find(sub.id);
    const auto ta = params.tau_a.find(sub.id);
    if (n0 == params.n0.end() || ta == params.tau_a.end())
      throw std::invalid_argument("gen_mdadt: parameters missing for mode " +
                                  std::to_string(sub.id));
    if (n0->second < 1.0)
      throw std::invalid_argument("gen_mdadt: generation needs N0_j >= 1");
    if (!(ta->second > 0.0)) throw std::invalid_argument("gen_mdadt: tau_a_j > 0");
  }
  Rng rng(seed);

  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{family.subsystems[rng.index(family.size())].id};
  double t = 0.0;
  for (;;) {
    const double hold = params.tau_a.at(modes.back()) * (1.0 + rng.uniform(0.05, 0.5));
    t += hold;
    if (t > horizon) break;
    const auto next = out_neighbors(family.graph, modes.back());
    if (next.empty()) break;  // constant tail keeps every run value non-positive
    taus.push_back(t);
    modes.push_back(next[rng.index(static_cast<int>(next.size()))]);
  }
  return make_signal(std::move(taus), std::move(modes), horizon);
}

// ---------------------------------------------------------------------------
// Mixed class: stable cruising with unstable excursions. Switch instants go
// through the same ADT feasibility bound as gen_adt; each excursion length u
// is capped so that every run-pair candidate of the budget check stays below
// safety * T0.
// ---------------------------------------------------------------------------

SwitchingSignal gen_mixed(const SwitchedFamily& family, const Partition& partition,
                          double n0, double tau_a, double t0, double rho,
                          double horizon, std::uint64_t seed) {
  if (!(n0 > 0.0) || !(tau_a > 0.0)) throw std::invalid_argument("gen_mixed: N0, tau_a > 0");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("gen_mixed: rho must lie in [0, 1)");
  if (t0 < 0.0) throw std::invalid_argument("gen_mixed: T0 >= 0");
  if (partition.stable.empty()) infeasible("no stable subsystem to cruise on");
  Rng rng(seed);

  const double budget_adt = 0.9 * n0;
  const double budget_u = 0.9 * t0;
  const bool want_unstable = rho > 0.0 && t0 > 0.0 && !partition.unstable.empty();

  // excursions h -> u -> s' need both edges admissible
  struct Excursion {
    SubsystemId from, via, back;
  };
  std::vector<Excursion> excursions;
  if (want_unstable) {
    for (SubsystemId h : partition.stable)
      for (SubsystemId u : partition.unstable)
        if (family.graph.contains(h, u))
          for (SubsystemId s2 : partition.stable)
            if (family.graph.contains(u, s2)) excursions.push_back({h, u, s2});
    if (excursions.empty())
      infeasible("no admissible stable -> unstable -> stable excursion in the graph");
  }

  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{
      partition.stable[rng.index(static_cast<int>(partition.stable.size()))]};
  if (budget_adt < 1.0) return make_signal(std::move(taus), std::move(modes), horizon);

  int m = 0;
  double v_min = std::numeric_limits<double>::max();  // min over switches of k - t_k/tau_a
  double u_prefix = 0.0;  // total unstable time of completed runs
  double w2_min = std::numeric_limits<double>::max();  // min over runs of D_{a-1} - rho start_a
  double cruise_from = 0.0;  // ratchets on skipped excursions so time always advances

  // earliest admissible instant for switch number m+1 given m placed switches
  auto adt_earliest = [&](double t_prev) {
    double t_min = t_prev + std::max(1e-8, 1e-6 * tau_a);
    if (m >= 1) t_min = std::max(t_min, tau_a * (m + 2 - budget_adt - v_min));
    return t_min;
  };
  auto place_switch = [&](double t, SubsystemId to) {
    taus.push_back(t);
    modes.push_back(to);
    ++m;
    v_min = std::min(v_min, m - t / tau_a);
  };

  for (;;) {
    const double base = std::max(taus.back(), cruise_from);
    const double t_start = std::max(adt_earliest(taus.back()), base) +
                           tau_a * rng.uniform(0.1, 1.0);
    if (t_start > horizon) break;

    if (!want_unstable) {
      // plain stable cycling when the graph allows it, otherwise stop switching
      std::vector<SubsystemId> next;
      for (SubsystemId s2 : partition.stable)
        if (s2 != modes.back() && family.graph.contains(modes.back(), s2)) next.push_back(s2);
      if (next.empty()) break;
      place_switch(t_start, next[rng.index(static_cast<int>(next.size()))]);
      continue;
    }

    std::vector<const Excursion*> from_here;
    for (const auto& e : excursions)
      if (e.from == modes.back()) from_here.push_back(&e);
    if (from_here.empty()) {
      std::vector<SubsystemId> hops;  // one stable hop toward an excursion start
      for (const auto& e : excursions)
        if (family.graph.contains(modes.back(), e.from)) hops.push_back(e.from);
      if (hops.empty())
        infeasible("stable vertex " + std::to_string(modes.back()) +
                   " cannot reach an excursion");
      place_switch(t_start, hops[rng.index(static_cast<int>(hops.size()))]);
      continue;
    }
    const Excursion& exc = *from_here[rng.index(static_cast<int>(from_here.size()))];

    // the return switch is number m+2; its ADT bound uses the into-switch too
    const double v_after = std::min(v_min, (m + 1) - t_start / tau_a);
    const double u_min = std::max(
        std::max(1e-8, 1e-6 * tau_a),
        tau_a * (m + 3 - budget_adt - v_after) - t_start);
    // budget cap at the run end: (u_prefix + u - rho(t_start + u)) - w2_all <= budget_u
    const double w2_candidate = u_prefix - rho * t_start;
    const double w2_all = std::min(w2_min, w2_candidate);
    const double cap = 0.98 * (budget_u + w2_all + rho * t_start - u_prefix) / (1.0 - rho);
    if (cap < u_min) {
      cruise_from = t_start;  // reserve or budget too low right now; cruise on
      continue;
    }
    double u_len = std::min(cap, std::max(u_min, rho * tau_a * rng.uniform(0.8, 2.0)));
    u_len = std::max(u_min, u_len * rng.uniform(0.6, 1.0));
    u_len = std::min(u_len, cap);
    if (t_start + u_len > horizon) break;  // never end the signal inside an unstable run

    place_switch(t_start, exc.via);
    place_switch(t_start + u_len, exc.back);
    w2_min = w2_all;
    u_prefix += u_len;
  }
  return make_signal(std::move(taus), std::move(modes), horizon);
}

// ---------------------------------------------------------------------------
// Worked-example data
// ---------------------------------------------------------------------------

SwitchedFamily paper_family() {
  SwitchedFamily fam;
  fam.dimension = 2;
  Subsystem s1;
  s1.id = 1;
  s1.declared = SubsystemClass::Stable;
  s1.A = (Eigen::MatrixXd(2, 2) << -0.3, 1.0, -0.9, -1.2).finished();
  Subsystem s2;
  s2.id = 2;
  s2.declared = SubsystemClass::Unstable;
  s2.A = (Eigen::MatrixXd(2, 2) << 0.2, 0.1, 0.3, 0.0).finished();
  Subsystem s3;
  s3.id = 3;
  s3.declared = SubsystemClass::Unstable;
  s3.A = (Eigen::MatrixXd(2, 2) << 0.1, 0.2, 0.3, 0.1).finished();
  fam.subsystems = {s1, s2, s3};
  fam.graph = complete_graph(3);
  return fam;
}

CertificateSet paper_certificates() {
  CertificateSet set;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  set.certs = {{1, I, 0.9389}, {2, I, -0.7301}, {3, I, -0.7206}};
  set.mu[{1, 2}] = 2.0611;
  set.mu[{1, 3}] = 2.0611;
  set.mu[{2, 1}] = 1.0651;
  set.mu[{3, 1}] = 1.0651;
  set.mu[{2, 3}] = 1.0;
  set.mu[{3, 2}] = 1.0;
  return set;
}

PaperExample gen_paper_example(double horizon, std::uint64_t /*seed*/) {
  constexpr double kPeriod = 6 * 6.93;  // 41.58
  if (horizon < kPeriod)
    throw std::invalid_argument("gen_paper_example: horizon below one period");

  PaperExample ex;
  ex.family = paper_family();
  ex.certs_edge = paper_certificates();
  ex.certs = uniform_reduction(ex.certs_edge, ex.family.partition());

  // per-period occupancy 0.45/0.25/0.30 split evenly over each mode's two
  // visits; the walk 1-2-3-1-3-2 uses each admissible edge exactly once
  const double h1 = 0.45 * kPeriod / 2.0;
  const double h2 = 0.25 * kPeriod / 2.0;
  const double h3 = 0.30 * kPeriod / 2.0;
  const double holds[6] = {h1, h2, h3, h1, h3, h2};
  const SubsystemId walk[6] = {1, 2, 3, 1, 3, 2};

  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{walk[0]};
  double t = 0.0;
  for (int k = 0;; ++k) {
    t += holds[k % 6];
    if (t > horizon) break;
    taus.push_back(t);
    modes.push_back(walk[(k + 1) % 6]);
  }
  ex.signal = make_signal(std::move(taus), std::move(modes), horizon);
  return ex;
}

// ---------------------------------------------------------------------------

SwitchingSignal gen_sqrt_growth(const SwitchedFamily& family, double k0, double k0p,
                                double horizon, std::uint64_t seed) {
  if (!(k0 > 0.0)) throw std::invalid_argument("gen_sqrt_growth: k0 > 0");
  if (k0p < 0.0) throw std::invalid_argument("gen_sqrt_growth: k0p >= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("gen_sqrt_growth: horizon > 0");
  Rng rng(seed);

  std::vector<double> taus{0.0};
  std::vector<SubsystemId> modes{family.subsystems[rng.index(family.size())].id};
  // m-th switch where the target k0 t - k0p sqrt(t) reaches m (increasing root);
  // the target dips negative near t = 0, clamped to no switches there
  for (long long m = 1;; ++m) {
    const double root = (k0p + std::sqrt(k0p * k0p + 4.0 * k0 * static_cast<double>(m))) /
                        (2.0 * k0);
    const double t = root * root;
    if (t > horizon) break;
    if (t - taus.back() < 1e-9)
      throw std::invalid_argument("gen_sqrt_growth: switch spacing below the Zeno guard");
    const auto next = out_neighbors(family.graph, modes.back());
    if (next.empty())
      throw std::runtime_error("gen_sqrt_growth: cannot extend walk: vertex " +
                               std::to_string(modes.back()) + " has no outgoing edge");
    taus.push_back(t);
    modes.push_back(next[rng.index(static_cast<int>(next.size()))]);
  }
  return make_signal(std::move(taus), std::move(modes), horizon);
}

SwitchingSignal gen_burst(double epsilon, int n_max) {
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw std::invalid_argument("gen_burst: epsilon must lie in (0, 1)");
  if (n_max < 0 || n_max > 24) throw std::invalid_argument("gen_burst: n_max in [0, 24]");
  const double spacing_min = epsilon / std::pow(2.0, n_max);
  if (spacing_min < 1e-12)
    throw std::invalid_argument("gen_burst: Zeno-guard violation (holding " +
                                std::to_string(spacing_min) + " below 1e-12)");

  const auto total = (1LL << (n_max + 1));  // 1 + sum 2^k = 2^(n_max+1)
  std::vector<double> taus;
  taus.reserve(static_cast<std::size_t>(total) + 1);
  taus.push_back(0.0);
  taus.push_back(epsilon);  // the lone switch just after t = 0
  for (int n = 0; n <= n_max; ++n) {
    const double base = std::pow(2.0, n);
    const auto count = (1LL << n);
    const double gap = epsilon / static_cast<double>(count);
    for (long long k = 1; k <= count; ++k)
      taus.push_back(base + static_cast<double>(k) * gap);
  }
  std::vector<SubsystemId> modes(taus.size());
  for (std::size_t i = 0; i < modes.size(); ++i) modes[i] = (i % 2 == 0) ? 1 : 2;
  // intentionally fast switching: construct with the relaxed 1e-12 guard
  return make_signal(std::move(taus), std::move(modes), std::pow(2.0, n_max + 1), 1e-12);
}

SwitchingSignal generate(const SwitchedFamily& family, const GeneratorSpec& spec) {
  auto param = [&spec](const std::string& key, std::optional<double> fallback =
                                                   std::nullopt) -> double {
    const auto it = spec.params.find(key);
    if (it != spec.params.end()) return it->second;
    if (fallback) return *fallback;
    throw std::invalid_argument("generator spec: missing parameter '" + key + "'");
  };

  if (spec.cls == "dwell") {
    // a dwell-time signal is an ADT signal with N0 = 1 held at full budget
    return gen_adt(family, 1.0, param("tau_d"), 1.0, spec.horizon, spec.seed);
  }
  if (spec.cls == "adt")
    return gen_adt(family, param("N0"), param("tau_a"), param("safety", 0.9), spec.horizon,
                   spec.seed);
  if (spec.cls == "mdadt") {
    MdadtParams p{spec.n0_j, spec.tau_a_j};
    return gen_mdadt(family, p, spec.horizon, spec.seed);
  }
  if (spec.cls == "mixed")
    return gen_mixed(family, family.partition(), param("N0"), param("tau_a"), param("T0"),
                     param("rho"), spec.horizon, spec.seed);
  if (spec.cls == "asymptotic") {
    // slow admissible switching: comfortably inside the asymptotic condition
    return gen_adt(family, param("N0", 2.0), param("tau_a"), param("safety", 0.9),
                   spec.horizon, spec.seed);
  }
  if (spec.cls == "paper_example") return gen_paper_example(spec.horizon, spec.seed).signal;
  if (spec.cls == "burst")
    return gen_burst(param("epsilon", 1e-3), static_cast<int>(param("n_max")));
  if (spec.cls == "sqrt_growth")
    return gen_sqrt_growth(family, param("k0"), param("k0p"), spec.horizon, spec.seed);
  throw std::invalid_argument("generator spec: unknown class '" + spec.cls + "'");
}

}  // namespace swstab

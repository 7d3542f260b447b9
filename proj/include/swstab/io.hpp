#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swstab/certificates.hpp"
#include "swstab/criteria.hpp"
#include "swstab/family.hpp"
#include "swstab/generators.hpp"
#include "swstab/signal.hpp"
#include "swstab/simulate.hpp"

namespace swstab {

/// Malformed input file; message carries file and field context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic number formatting. Data files use full precision (%.17g,
// bit-exact write-then-read); CSV traces and reports use 12 significant
// digits in scientific notation.
std::string format_full(double v);
std::string format_sci12(double v);

SwitchedFamily read_family(const std::string& path);
void write_family(const SwitchedFamily& family, const std::string& path);

CertificateSet read_certificates(const std::string& path);
void write_certificates(const CertificateSet& set, const std::string& path);

SwitchingSignal read_signal(const std::string& path, double min_holding = kDefaultMinHolding);
void write_signal(const SwitchingSignal& sig, const std::string& path);

GeneratorSpec read_generator_spec(const std::string& path);
void write_generator_spec(const GeneratorSpec& spec, const std::string& path);

std::string report_to_json(const CriterionReport& report);
void write_report(const CriterionReport& report, const std::string& path);

/// CSV "t,psi,Psi" at the given times.
void write_psi_trace_csv(const SwitchingSignal& sig, const CertificateSet& certs,
                         const TransitionGraph& graph, std::span<const double> times,
                         const std::string& path);

/// CSV "t,N,nu,eta_1..eta_N,rho_<k>_<l>..." at the given times; eta columns
/// cover modes 1..n_modes and rho columns every edge of the graph.
void write_stats_csv(const SwitchingSignal& sig, const TransitionGraph& graph, int n_modes,
                     std::span<const double> times, const std::string& path);

/// CSV "t,mode,x_1..x_d,V,psi,bound" at every trajectory sample.
void write_trajectory_csv(const Trajectory& traj, const SwitchingSignal& sig,
                          const CertificateSet& certs, const std::string& path);

}  // namespace swstab

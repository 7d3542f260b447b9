#include "swstab/certificates.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "swstab/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace swstab {

namespace {

constexpr double kSymTol = 1e-12;      // relative symmetry tolerance
constexpr double kDefiniteTol = 1e-10;
constexpr double kHurwitzTol = -1e-10;  // spectral abscissa must lie below this

bool is_symmetric(const Eigen::MatrixXd& M) {
  const double scale = std::max(1.0, M.norm());
  return (M - M.transpose()).norm() <= kSymTol * scale;
}

void require_spd(const Eigen::MatrixXd& M, const char* what) {
  if (M.rows() != M.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  if (!is_symmetric(M)) throw std::invalid_argument(std::string(what) + ": not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= kDefiniteTol * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw std::invalid_argument(std::string(what) + ": not positive definite");
}

}  // namespace

const QuadraticCertificate& CertificateSet::certificate(SubsystemId id) const {
  for (const auto& c : certs)
    if (c.id == id) return c;
  throw std::out_of_range("no certificate for subsystem " + std::to_string(id));
}

bool CertificateSet::has_certificate(SubsystemId id) const {
  for (const auto& c : certs)
    if (c.id == id) return true;
  return false;
}

double CertificateSet::mu_edge(SubsystemId i, SubsystemId j) const {
  const auto it = mu.find({i, j});
  if (it == mu.end()) {
    std::ostringstream msg;
    msg << "missing mu entry for edge (" << i << "," << j << ")";
    throw std::out_of_range(msg.str());
  }
  return it->second;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const auto d = A.rows();
  if (A.cols() != d) throw std::invalid_argument("solve_lyapunov: A not square");
  if (Q.rows() != d || Q.cols() != d)
    throw std::invalid_argument("solve_lyapunov: Q dimension mismatch");
  require_spd(Q, "solve_lyapunov: Q");
  if (spectral_abscissa(A) >= kHurwitzTol)
    throw std::invalid_argument("solve_lyapunov: not Hurwitz");

  // vec(A'P + PA) = (I (x) A' + A' (x) I) vec(P), column-major vec
  const auto dd = d * d;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dd, dd);
  const Eigen::MatrixXd At = A.transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    M.block(j * d, j * d, d, d) += At;               // I (x) A'
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index r = 0; r < d; ++r)
        M(j * d + i, r * d + i) += At(j, r);         // A' (x) I
  }
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), dd);
  const Eigen::VectorXd p = M.partialPivLu().solve(-q);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), d, d);
  P = 0.5 * (P + P.transpose()).eval();

  const double residual = (A.transpose() * P + P * A + Q).norm();
  if (residual > 1e-8 * Q.norm())
    throw std::runtime_error("solve_lyapunov: residual exceeds tolerance");
  require_spd(P, "solve_lyapunov: computed P");
  return P;
}

double rate_stable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q,
                   const Eigen::MatrixXd& P) {
  const auto d = A.rows();
  if (Q.rows() != d || Q.cols() != d || P.rows() != d || P.cols() != d)
    throw std::invalid_argument("rate_stable: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(P, Eigen::EigenvaluesOnly);
  // Vdot = -x'Qx <= -(lambda_min(Q)/lambda_max(P)) V
  return eq.eigenvalues().minCoeff() / ep.eigenvalues().maxCoeff();
}

UnstableRate rate_unstable(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("rate_unstable: A not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A + A.transpose(), Eigen::EigenvaluesOnly);
  const double lambda = -es.eigenvalues().maxCoeff();
  return {lambda, lambda < 0.0};
}

double mu_pair(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& Pj) {
  if (Pi.rows() != Pj.rows() || Pi.cols() != Pj.cols())
    throw std::invalid_argument("mu_pair: dimension mismatch");
  require_spd(Pi, "mu_pair: P_i");
  require_spd(Pj, "mu_pair: P_j");
  // largest lambda with P_j v = lambda P_i v
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Pj, Pi, Eigen::EigenvaluesOnly);
  return std::max(1.0, ges.eigenvalues().maxCoeff());
}

CertificateSet build_certificates(const SwitchedFamily& family,
                                  const std::map<int, Eigen::MatrixXd>& q_choice) {
  if (!family.all_linear())
    throw std::invalid_argument("build_certificates: automated only for linear families");

  CertificateSet set;
  for (const auto& sub : family.subsystems) {
    QuadraticCertificate cert;
    cert.id = sub.id;
    if (sub.declared == SubsystemClass::Stable) {
      const auto it = q_choice.find(sub.id);
      const Eigen::MatrixXd Q =
          (it != q_choice.end()) ? it->second
                                 : Eigen::MatrixXd::Identity(family.dimension, family.dimension);
      cert.P = solve_lyapunov(sub.A, Q);  // propagates "not Hurwitz"
      cert.lambda = rate_stable(sub.A, Q, cert.P);
    } else {
      cert.P = Eigen::MatrixXd::Identity(family.dimension, family.dimension);
      cert.lambda = rate_unstable(sub.A).lambda;
    }
    set.certs.push_back(std::move(cert));
  }
  std::sort(set.certs.begin(), set.certs.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const auto& [i, j] : family.graph.edges)
    set.mu[{i, j}] = mu_pair(set.certificate(i).P, set.certificate(j).P);
  return set;
}

UniformConstants uniform_constants(const CertificateSet& set, const Partition& partition) {
  if (partition.stable.empty())
    throw std::invalid_argument("uniform_constants: no stable subsystem");
  UniformConstants u;
  u.lambda_s = std::numeric_limits<double>::infinity();
  for (SubsystemId j : partition.stable)
    u.lambda_s = std::min(u.lambda_s, std::abs(set.certificate(j).lambda));
  u.lambda_u = 0.0;
  for (SubsystemId k : partition.unstable)
    u.lambda_u = std::max(u.lambda_u, std::abs(set.certificate(k).lambda));
  u.mu = 1.0;
  for (const auto& [edge, value] : set.mu) u.mu = std::max(u.mu, value);
  return u;
}

CertificateSet uniform_reduction(const CertificateSet& set, const Partition& partition) {
  const UniformConstants u = uniform_constants(set, partition);
  CertificateSet out = set;
  for (auto& cert : out.certs)
    cert.lambda = partition.is_unstable(cert.id) ? -u.lambda_u : u.lambda_s;
  for (auto& [edge, value] : out.mu) value = u.mu;
  return out;
}

namespace {

// Both scan kernels fill a per-sample slack array (pure, element-wise) so the
// parallel path is bit-identical to the serial reference; the min and its
// witness are reduced serially afterwards.
void scan_mu_slacks(const CertificateSet& set, const std::vector<Eigen::VectorXd>& xs,
                    const std::pair<int, int>& edge, double mu_ij, std::vector<double>& slack,
                    int jobs) {
  const auto& Pi = set.certificate(edge.first).P;
  const auto& Pj = set.certificate(edge.second).P;
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  const int nt = std::max(1, jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
#else
  (void)nt;
#endif
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double vi = xs[k].dot(Pi * xs[k]);
    const double vj = xs[k].dot(Pj * xs[k]);
    slack[k] = (mu_ij * vi - vj) / std::max(vi, 1e-300);
  }
}

void scan_decay_slacks(const QuadraticCertificate& cert, const Eigen::MatrixXd& A,
                       const std::vector<Eigen::VectorXd>& xs, const std::vector<double>& ts,
                       std::vector<double>& slack, int jobs) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  const int nt = std::max(1, jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
#else
  (void)nt;
#endif
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const Eigen::MatrixXd flow = (A * ts[k]).exp();
    const Eigen::VectorXd xt = flow * xs[k];
    const double v0 = xs[k].dot(cert.P * xs[k]);
    const double vt = xt.dot(cert.P * xt);
    const double bound = v0 * std::exp(-cert.lambda * ts[k]);
    slack[k] = (bound - vt) / std::max(bound, 1e-300);
  }
}

}  // namespace

CertificateCheck verify_certificate_sampled(const CertificateSet& set,
                                            const SwitchedFamily& family, int n_samples,
                                            double horizon, std::uint64_t seed, int jobs,
                                            double tol) {
  if (n_samples < 1) throw std::invalid_argument("verify_certificate_sampled: n_samples >= 1");
  Rng rng(seed);
  const int d = family.dimension;

  auto draw_states = [&](int count) {
    std::vector<Eigen::VectorXd> xs(count);
    for (auto& x : xs) {
      x.resize(d);
      for (int i = 0; i < d; ++i) x[i] = rng.normal();
      if (x.norm() < 1e-12) x.setOnes();
    }
    return xs;
  };

  CertificateCheck check;
  check.worst_mu_slack = std::numeric_limits<double>::infinity();
  check.worst_decay_slack = std::numeric_limits<double>::infinity();

  std::vector<double> slack(static_cast<std::size_t>(n_samples));
  for (const auto& [edge, mu_ij] : set.mu) {
    const auto xs = draw_states(n_samples);
    scan_mu_slacks(set, xs, edge, mu_ij, slack, jobs);
    for (int k = 0; k < n_samples; ++k) {
      if (slack[k] < check.worst_mu_slack) {
        check.worst_mu_slack = slack[k];
        check.mu_witness = SampleWitness{edge.first, edge.second, xs[k], 0.0, slack[k]};
      }
    }
  }
  if (set.mu.empty()) check.worst_mu_slack = 0.0;

  bool any_decay = false;
  for (const auto& sub : family.subsystems) {
    if (!sub.linear() || sub.declared != SubsystemClass::Stable) continue;
    if (!set.has_certificate(sub.id)) continue;
    any_decay = true;
    const auto xs = draw_states(n_samples);
    std::vector<double> ts(static_cast<std::size_t>(n_samples));
    for (auto& t : ts) t = rng.uniform(0.0, horizon);
    scan_decay_slacks(set.certificate(sub.id), sub.A, xs, ts, slack, jobs);
    for (int k = 0; k < n_samples; ++k) {
      if (slack[k] < check.worst_decay_slack) {
        check.worst_decay_slack = slack[k];
        check.decay_witness = SampleWitness{sub.id, 0, xs[k], ts[k], slack[k]};
      }
    }
  }
  if (!any_decay) check.worst_decay_slack = 0.0;

  check.mu_pass = check.worst_mu_slack >= -tol;
  check.decay_pass = check.worst_decay_slack >= -tol;
  if (check.mu_pass) check.mu_witness.reset();
  if (check.decay_pass) check.decay_witness.reset();
  return check;
}

}  // namespace swstab

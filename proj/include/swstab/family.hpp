#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace swstab {

/// Subsystem indices are 1-based: P = {1, ..., N}.
using SubsystemId = int;

enum class SubsystemClass { Stable, Unstable };

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// One member of the family. Linear subsystems carry the matrix of
/// xdot = A x; nonlinear ones carry an opaque evaluator with f(0) = 0.
struct Subsystem {
  SubsystemId id = 0;
  SubsystemClass declared = SubsystemClass::Stable;
  Eigen::MatrixXd A;   // empty for nonlinear subsystems
  VectorField field;   // empty for linear subsystems

  bool linear() const { return A.size() > 0; }
};

/// Directed admissible-transition graph over subsystem indices.
/// Edges are kept sorted and unique; self-loops are invalid (validated,
/// not silently dropped).
struct TransitionGraph {
  std::vector<std::pair<SubsystemId, SubsystemId>> edges;

  void normalize();
  bool contains(SubsystemId i, SubsystemId j) const;
};

TransitionGraph make_graph(std::vector<std::pair<SubsystemId, SubsystemId>> edges);

/// Complete directed graph on {1..n} (all ordered pairs i != j).
TransitionGraph complete_graph(int n);

struct Partition {
  std::vector<SubsystemId> stable;
  std::vector<SubsystemId> unstable;

  bool is_unstable(SubsystemId id) const;
};

struct SwitchedFamily {
  int dimension = 0;
  std::vector<Subsystem> subsystems;
  TransitionGraph graph;

  int size() const { return static_cast<int>(subsystems.size()); }
  /// Throws std::out_of_range("unknown subsystem ...") for an invalid id.
  const Subsystem& subsystem(SubsystemId id) const;
  bool has_subsystem(SubsystemId id) const;
  Partition partition() const;
  bool all_linear() const;
};

/// Largest real part over the spectrum of A.
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Checks every structural invariant (unique 1-based ids, shared dimension,
/// no self-loops, edge endpoints valid, declared class vs spectral abscissa
/// for linear subsystems, f(0) = 0 for nonlinear ones). Returns one message
/// per violation; empty means valid. Never throws.
std::vector<std::string> validate_family(const SwitchedFamily& family);

/// True iff (i, j) is an admissible transition. Unknown ids throw.
bool is_admissible(const SwitchedFamily& family, SubsystemId i, SubsystemId j);

/// True iff the graph is the complete digraph on {1..n}.
bool is_complete(const TransitionGraph& graph, int n);

}  // namespace swstab

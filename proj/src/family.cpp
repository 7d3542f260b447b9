#include "swstab/family.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace swstab {

void TransitionGraph::normalize() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

bool TransitionGraph::contains(SubsystemId i, SubsystemId j) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

TransitionGraph make_graph(std::vector<std::pair<SubsystemId, SubsystemId>> edges) {
  TransitionGraph g{std::move(edges)};
  g.normalize();
  return g;
}

TransitionGraph complete_graph(int n) {
  TransitionGraph g;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) g.edges.emplace_back(i, j);
  return g;  // already sorted
}

bool Partition::is_unstable(SubsystemId id) const {
  return std::find(unstable.begin(), unstable.end(), id) != unstable.end();
}

const Subsystem& SwitchedFamily::subsystem(SubsystemId id) const {
  for (const auto& sub : subsystems)
    if (sub.id == id) return sub;
  throw std::out_of_range("unknown subsystem " + std::to_string(id));
}

bool SwitchedFamily::has_subsystem(SubsystemId id) const {
  for (const auto& sub : subsystems)
    if (sub.id == id) return true;
  return false;
}

Partition SwitchedFamily::partition() const {
  Partition p;
  for (const auto& sub : subsystems) {
    if (sub.declared == SubsystemClass::Stable)
      p.stable.push_back(sub.id);
    else
      p.unstable.push_back(sub.id);
  }
  return p;
}

bool SwitchedFamily::all_linear() const {
  return std::all_of(subsystems.begin(), subsystems.end(),
                     [](const Subsystem& s) { return s.linear(); });
}

double spectral_abscissa(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

std::vector<std::string> validate_family(const SwitchedFamily& family) {
  std::vector<std::string> issues;
  auto flag = [&issues](const std::string& msg) { issues.push_back(msg); };

  if (family.dimension < 1) flag("dimension: must be >= 1");
  if (family.subsystems.empty()) flag("subsystems: family must be non-empty");

  std::set<int> ids;
  for (const auto& sub : family.subsystems) {
    std::ostringstream tag;
    tag << "subsystem " << sub.id;
    if (sub.id < 1) flag(tag.str() + ": index must be >= 1");
    if (!ids.insert(sub.id).second) flag(tag.str() + ": duplicate index");
    if (sub.linear()) {
      if (sub.A.rows() != family.dimension || sub.A.cols() != family.dimension)
        flag(tag.str() + ": matrix is not dimension x dimension");
      else {
        // declared class is cross-checked against the spectrum for linear
        // subsystems; it is authoritative only for nonlinear ones
        const double abscissa = spectral_abscissa(sub.A);
        if (sub.declared == SubsystemClass::Stable && abscissa >= -1e-10)
          flag(tag.str() + ": declared stable but spectral abscissa is " +
               std::to_string(abscissa));
        if (sub.declared == SubsystemClass::Unstable && abscissa < -1e-10)
          flag(tag.str() + ": declared unstable but spectral abscissa is " +
               std::to_string(abscissa));
      }
    } else if (sub.field) {
      const Eigen::VectorXd f0 = sub.field(Eigen::VectorXd::Zero(family.dimension));
      if (f0.size() != family.dimension)
        flag(tag.str() + ": vector field output dimension mismatch");
      else if (f0.norm() > 1e-12)
        flag(tag.str() + ": vector field does not vanish at the origin");
    } else {
      flag(tag.str() + ": neither matrix nor vector field supplied");
    }
  }

  for (const auto& [i, j] : family.graph.edges) {
    std::ostringstream tag;
    tag << "edge (" << i << "," << j << ")";
    if (i == j) flag("self-loop on vertex " + std::to_string(i));
    if (ids.find(i) == ids.end()) flag(tag.str() + ": unknown source vertex");
    if (i != j && ids.find(j) == ids.end()) flag(tag.str() + ": unknown target vertex");
  }

  // partition overlap cannot arise from the derived partition, but a family
  // assembled by hand can still double-declare via duplicate ids
  const Partition part = family.partition();
  for (SubsystemId id : part.stable)
    if (part.is_unstable(id)) flag("partition overlap at subsystem " + std::to_string(id));

  return issues;
}

bool is_admissible(const SwitchedFamily& family, SubsystemId i, SubsystemId j) {
  if (!family.has_subsystem(i)) throw std::out_of_range("unknown subsystem " + std::to_string(i));
  if (!family.has_subsystem(j)) throw std::out_of_range("unknown subsystem " + std::to_string(j));
  return family.graph.contains(i, j);
}

bool is_complete(const TransitionGraph& graph, int n) {
  if (n < 1) throw std::invalid_argument("is_complete: n must be >= 1");
  const auto expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  if (graph.edges.size() != expected) return false;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto& [i, j] = graph.edges[k];
    if (i == j || i < 1 || i > n || j < 1 || j > n) return false;
    if (k > 0 && graph.edges[k] == graph.edges[k - 1]) return false;
  }
  return true;
}

}  // namespace swstab

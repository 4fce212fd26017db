#include "dlsq/graph.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace dlsq {

namespace {
constexpr double kBalanceTol = 1e-12;
}

Digraph::Digraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.rows() != weights_.cols())
    throw ValidationError("graph: adjacency matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0)
      throw ValidationError("graph: adjacency diagonal must be zero (node " +
                            std::to_string(i + 1) + ")");
    for (Eigen::Index j = 0; j < weights_.cols(); ++j)
      if (!(weights_(i, j) >= 0.0))
        throw ValidationError("graph: negative or non-finite weight at (" +
                              std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  }
}

Digraph Digraph::from_edges(int node_count, const std::vector<Edge>& edges) {
  if (node_count <= 0) throw ValidationError("graph: node_count must be positive");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(node_count, node_count);
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= node_count || e.dst < 0 || e.dst >= node_count)
      throw ValidationError("graph: edge endpoint out of range (" + std::to_string(e.src + 1) +
                            " -> " + std::to_string(e.dst + 1) + ")");
    if (e.src == e.dst)
      throw ValidationError("graph: self-loop at node " + std::to_string(e.src + 1));
    if (!(e.weight > 0.0))
      throw ValidationError("graph: edge weight must be positive (" + std::to_string(e.src + 1) +
                            " -> " + std::to_string(e.dst + 1) + ")");
    a(e.dst, e.src) += e.weight;  // a_ij > 0 iff edge j -> i
  }
  return Digraph(std::move(a));
}

Eigen::MatrixXd laplacian(const Digraph& g) {
  Eigen::MatrixXd l = -g.weights();
  l.diagonal() += g.in_degrees();
  return l;
}

BalanceReport is_weight_balanced(const Digraph& g) {
  BalanceReport rep;
  rep.imbalance = g.in_degrees() - g.out_degrees();
  rep.balanced = rep.imbalance.cwiseAbs().maxCoeff() <= kBalanceTol;
  return rep;
}

bool is_strongly_connected(const Digraph& g) {
  const int n = g.node_count();
  const auto& a = g.weights();
  // reach(forward) from node 0 along j -> i edges, then along reversed edges
  const auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const double w = forward ? a(v, u) : a(u, v);  // forward: edge u -> v
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

Eigen::MatrixXd build_complement(int node_count) {
  if (node_count < 2)
    throw ValidationError("build_complement: need at least 2 nodes");
  const int n = node_count;
  // Householder reflector mapping e_1 to 1/sqrt(N): its columns 2..N span the
  // orthogonal complement of 1_N. Deterministic, no randomness involved.
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd w = v - Eigen::VectorXd::Unit(n, 0);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - (2.0 / w.squaredNorm()) * (w * w.transpose());
  return q.rightCols(n - 1);
}

GraphSpectrum spectrum(const Digraph& g) {
  const auto balance = is_weight_balanced(g);
  if (!balance.balanced) {
    Eigen::Index worst;
    balance.imbalance.cwiseAbs().maxCoeff(&worst);
    throw ValidationError("graph: not weight-balanced (node " +
                          std::to_string(worst + 1) +
                          " imbalance " + std::to_string(balance.imbalance(worst)) + ")");
  }
  if (!is_strongly_connected(g))
    throw ValidationError("graph: not strongly connected");

  GraphSpectrum spec;
  spec.laplacian = laplacian(g);
  const Eigen::MatrixXd sym = 0.5 * (spec.laplacian + spec.laplacian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  spec.sym_eigenvalues = es.eigenvalues();  // ascending
  const int n = g.node_count();
  spec.algebraic_connectivity = n >= 2 ? spec.sym_eigenvalues(1) : 0.0;
  spec.max_eig = spec.sym_eigenvalues(n - 1);
  spec.complement = build_complement(n);
  return spec;
}

}  // namespace dlsq

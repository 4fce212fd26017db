#pragma once

#include <Eigen/Core>
#include <vector>

#include "dlsq/common.hpp"

namespace dlsq {

/// Weighted communication digraph over N nodes. The adjacency convention
/// follows the usual multi-agent one: weights(i, j) > 0 iff there is an edge
/// j -> i, i.e. node i hears node j.
class Digraph {
 public:
  struct Edge {
    int src = 0;  // 0-based
    int dst = 0;
    double weight = 1.0;
  };

  /// Validates: square, nonnegative weights, zero diagonal.
  explicit Digraph(Eigen::MatrixXd weights);

  /// Builds from a directed edge list (0-based node ids).
  static Digraph from_edges(int node_count, const std::vector<Edge>& edges);

  int node_count() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }

  Eigen::VectorXd in_degrees() const { return weights_.rowwise().sum(); }
  Eigen::VectorXd out_degrees() const { return weights_.colwise().sum().transpose(); }

 private:
  Eigen::MatrixXd weights_;
};

/// L = D_in - A; every row sums to zero.
Eigen::MatrixXd laplacian(const Digraph& g);

struct BalanceReport {
  bool balanced = false;
  Eigen::VectorXd imbalance;  // in-degree minus out-degree per node
};

/// Weight balance within absolute tolerance 1e-12 on degree differences.
BalanceReport is_weight_balanced(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

/// Deterministic N x (N-1) orthonormal complement of 1_N (Householder
/// construction): R^T 1 = 0, R^T R = I, R R^T + 11^T/N = I.
Eigen::MatrixXd build_complement(int node_count);

struct GraphSpectrum {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd sym_eigenvalues;  // eigenvalues of (L + L^T)/2, ascending
  double algebraic_connectivity = 0.0;  // lambda_2
  double max_eig = 0.0;                 // lambda_N
  Eigen::MatrixXd complement;           // R
};

/// Requires the graph weight-balanced and strongly connected; throws
/// ValidationError naming the failed check otherwise.
GraphSpectrum spectrum(const Digraph& g);

}  // namespace dlsq

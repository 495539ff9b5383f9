#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "igdsync/errors.hpp"
#include "igdsync/objective.hpp"

namespace igdsync {

/// Undirected connected peer graph with a deterministic spanning tree
/// (BFS from node 0, neighbors visited in ascending index order).
struct Topology {
  int N = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<std::vector<int>> neighbors;
  std::vector<std::pair<int, int>> tree_edges;
  std::vector<std::vector<int>> tree_neighbors;
  std::vector<int> tree_parent;  // parent[0] = -1
  std::vector<int> bfs_order;
  bool is_complete = false;

  bool has_edge(int i, int j) const;
};

Topology build_complete(int N);

/// Validates and completes an edge list. Throws std::invalid_argument
/// on self-loops, out-of-range endpoints, or disconnection (the message
/// names the unreachable nodes).
Topology build_topology(int N, std::vector<std::pair<int, int>> edges);

/// Edge-list file: one "i j" pair per line, 0-based, '#' comments.
Topology load_edge_list(std::istream& in, int N);

/// Gradient measurement h_ij at global iteration k: the receiver's own
/// gradient is exact; an edge delivers grad f_j(x_j) plus a bounded
/// error; a non-edge delivers the zero vector.
Eigen::VectorXd measure(const Topology& topo, const ErrorModel& model, const Problem& problem,
                        int receiver, int source, const Eigen::VectorXd& x_source,
                        long k, long trial);

/// Exact mean by leaf-to-root accumulation of (sum, count) over the
/// spanning tree followed by a root-to-leaf broadcast. Returns the mean
/// and the number of vector messages, 2(N-1).
std::pair<Eigen::VectorXd, long> tree_average(const Topology& topo,
                                              const std::vector<Eigen::VectorXd>& values);

}  // namespace igdsync

#include "igdsync/network.hpp"

#include <algorithm>
#include <istream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace igdsync {

bool Topology::has_edge(int i, int j) const {
  if (i == j) return false;
  if (is_complete) return true;
  const auto& nb = neighbors[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

namespace {

void finalize(Topology& t) {
  const int N = t.N;
  t.neighbors.assign(N, {});
  for (auto [a, b] : t.edges) {
    t.neighbors[a].push_back(b);
    t.neighbors[b].push_back(a);
  }
  for (auto& nb : t.neighbors) std::sort(nb.begin(), nb.end());

  // BFS from node 0, ascending neighbor order.
  t.tree_parent.assign(N, -1);
  t.bfs_order.clear();
  std::vector<char> seen(N, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    t.bfs_order.push_back(u);
    for (int v : t.neighbors[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        t.tree_parent[v] = u;
        q.push(v);
      }
    }
  }
  if (static_cast<int>(t.bfs_order.size()) != N) {
    std::string unreachable;
    for (int v = 0; v < N; ++v)
      if (!seen[v]) unreachable += (unreachable.empty() ? "" : ", ") + std::to_string(v);
    throw std::invalid_argument("graph is disconnected; unreachable nodes: {" + unreachable + "}");
  }
  t.tree_edges.clear();
  t.tree_neighbors.assign(N, {});
  for (int v = 1; v < N; ++v) {
    int p = t.tree_parent[v];
    t.tree_edges.emplace_back(std::min(p, v), std::max(p, v));
    t.tree_neighbors[p].push_back(v);
    t.tree_neighbors[v].push_back(p);
  }
  std::sort(t.tree_edges.begin(), t.tree_edges.end());
  for (auto& nb : t.tree_neighbors) std::sort(nb.begin(), nb.end());
}

}  // namespace

Topology build_complete(int N) {
  if (N < 2) throw std::invalid_argument("build_complete: N must be at least 2");
  Topology t;
  t.N = N;
  t.is_complete = true;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) t.edges.emplace_back(i, j);
  finalize(t);
  return t;
}

Topology build_topology(int N, std::vector<std::pair<int, int>> edges) {
  if (N < 2) throw std::invalid_argument("build_topology: N must be at least 2");
  std::set<std::pair<int, int>> uniq;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("build_topology: self-loop at node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= N || b >= N)
      throw std::invalid_argument("build_topology: edge endpoint out of range");
    uniq.emplace(std::min(a, b), std::max(a, b));
  }
  Topology t;
  t.N = N;
  t.edges.assign(uniq.begin(), uniq.end());
  t.is_complete = static_cast<long>(t.edges.size()) == static_cast<long>(N) * (N - 1) / 2;
  finalize(t);
  return t;
}

Topology load_edge_list(std::istream& in, int N) {
  std::vector<std::pair<int, int>> edges;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a, b;
    if (ls >> a >> b) edges.emplace_back(a, b);
  }
  return build_topology(N, std::move(edges));
}

Eigen::VectorXd measure(const Topology& topo, const ErrorModel& model, const Problem& problem,
                        int receiver, int source, const Eigen::VectorXd& x_source,
                        long k, long trial) {
  const auto& comp = problem.components.at(source);
  if (x_source.size() != comp.c.size()) throw std::invalid_argument("measure: dimension mismatch");
  if (receiver == source) return comp.gradient(x_source);  // own gradient, error-free
  if (!topo.has_edge(receiver, source)) return Eigen::VectorXd::Zero(problem.n);
  Eigen::VectorXd g = comp.gradient(x_source);
  return g + draw_error(model, receiver, source, k, trial, problem.n, &g);
}

std::pair<Eigen::VectorXd, long> tree_average(const Topology& topo,
                                              const std::vector<Eigen::VectorXd>& values) {
  if (static_cast<int>(values.size()) != topo.N)
    throw std::invalid_argument("tree_average: expected " + std::to_string(topo.N) + " values");
  const Eigen::Index n = values.front().size();
  for (const auto& v : values)
    if (v.size() != n) throw std::invalid_argument("tree_average: mixed dimensions");

  // Leaf-to-root accumulation in reverse BFS order; children are
  // combined in ascending index order, so the result is deterministic
  // for a fixed topology.
  std::vector<Eigen::VectorXd> sum(topo.N);
  std::vector<long> count(topo.N, 1);
  for (int i = 0; i < topo.N; ++i) sum[i] = values[i];
  std::vector<std::vector<int>> children(topo.N);
  for (int v = 1; v < topo.N; ++v) children[topo.tree_parent[v]].push_back(v);
  for (auto it = topo.bfs_order.rbegin(); it != topo.bfs_order.rend(); ++it) {
    int u = *it;
    for (int c : children[u]) {
      sum[u] += sum[c];
      count[u] += count[c];
    }
  }
  Eigen::VectorXd mean = sum[0] / static_cast<double>(count[0]);
  long messages = 2L * (topo.N - 1);  // one up, one down per tree edge
  return {mean, messages};
}

}  // namespace igdsync

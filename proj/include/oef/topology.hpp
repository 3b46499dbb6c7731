#pragma once

#include <Eigen/Sparse>

#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Node-branch incidence matrices. A = A_out - A_in entrywise; for district
// heating, the flow-weighted outflow matrix splits each node's passing flow
// across its outflow branches (rows of zero for nodes with no outflow).

namespace oef {

using SparseReal = Eigen::SparseMatrix<double>;

struct Branch {
  int from = -1;
  int to = -1;
};

struct IncidenceSet {
  SparseReal a;             // node x branch, +1 at from, -1 at to
  SparseReal a_out;         // node x branch, +1 at from
  SparseReal a_in;          // node x branch, +1 at to
  SparseReal a_out_weight;  // flow-weighted outflow split; empty unless flows given
};

inline void check_branches(int n_nodes, const std::vector<Branch>& branches) {
  if (n_nodes < 1) throw std::invalid_argument("incidence: no nodes");
  for (size_t j = 0; j < branches.size(); ++j) {
    const auto& b = branches[j];
    if (b.from < 0 || b.from >= n_nodes || b.to < 0 || b.to >= n_nodes)
      throw std::invalid_argument("incidence: branch " + std::to_string(j) +
                                  " references an unknown node");
    if (b.from == b.to)
      throw std::invalid_argument("incidence: branch " + std::to_string(j) +
                                  " is a self-loop");
  }
}

inline bool is_connected(int n_nodes, const std::vector<Branch>& branches) {
  if (n_nodes <= 1) return true;
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& b : branches) {
    adj[b.from].push_back(b.to);
    adj[b.to].push_back(b.from);
  }
  std::vector<char> seen(n_nodes, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == n_nodes;
}

inline IncidenceSet build_incidence(int n_nodes, const std::vector<Branch>& branches,
                                    const std::vector<double>& branch_flows = {}) {
  check_branches(n_nodes, branches);
  const int nb = static_cast<int>(branches.size());
  IncidenceSet inc;
  std::vector<Eigen::Triplet<double>> ta, tout, tin;
  ta.reserve(2 * nb);
  for (int j = 0; j < nb; ++j) {
    ta.emplace_back(branches[j].from, j, 1.0);
    ta.emplace_back(branches[j].to, j, -1.0);
    tout.emplace_back(branches[j].from, j, 1.0);
    tin.emplace_back(branches[j].to, j, 1.0);
  }
  inc.a.resize(n_nodes, nb);
  inc.a.setFromTriplets(ta.begin(), ta.end());
  inc.a_out.resize(n_nodes, nb);
  inc.a_out.setFromTriplets(tout.begin(), tout.end());
  inc.a_in.resize(n_nodes, nb);
  inc.a_in.setFromTriplets(tin.begin(), tin.end());

  if (!branch_flows.empty()) {
    if (static_cast<int>(branch_flows.size()) != nb)
      throw std::invalid_argument("incidence: flow count != branch count");
    for (int j = 0; j < nb; ++j)
      if (!(branch_flows[j] > 0.0))
        throw std::invalid_argument("incidence: branch " + std::to_string(j) +
                                    " has non-positive flow");
    std::vector<double> outflow(n_nodes, 0.0), inflow(n_nodes, 0.0);
    for (int j = 0; j < nb; ++j) {
      outflow[branches[j].from] += branch_flows[j];
      inflow[branches[j].to] += branch_flows[j];
    }
    for (int i = 0; i < n_nodes; ++i)
      if (outflow[i] <= 0.0 && inflow[i] <= 0.0)
        throw std::invalid_argument("incidence: node " + std::to_string(i) +
                                    " has zero passing flow");
    std::vector<Eigen::Triplet<double>> tw;
    tw.reserve(nb);
    for (int j = 0; j < nb; ++j)
      tw.emplace_back(branches[j].from, j, branch_flows[j] / outflow[branches[j].from]);
    inc.a_out_weight.resize(n_nodes, nb);
    inc.a_out_weight.setFromTriplets(tw.begin(), tw.end());
  }
  return inc;
}

}  // namespace oef

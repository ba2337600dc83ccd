#include "sgsr/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sgsr/errors.hpp"

namespace sgsr {

Graph::Graph(SymmetricMatrix w, Eigen::VectorXd d)
    : weights_(std::move(w)), degrees_(std::move(d)) {}

Graph Graph::from_weights(SymmetricMatrix weights) {
  const int n = weights.order();
  for (int i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0) {
      throw InvalidInputError("Graph: self-loops are not allowed");
    }
    for (int j = 0; j < n; ++j) {
      const double w = weights(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidInputError("Graph: weights must be finite and nonnegative");
      }
    }
  }
  Eigen::VectorXd degrees = weights.dense().rowwise().sum();
  return Graph(std::move(weights), std::move(degrees));
}

Laplacian laplacian(const Graph& g) {
  Eigen::MatrixXd m = -g.weights().dense();
  m.diagonal() = g.degrees();
  return Laplacian{SymmetricMatrix::from_dense(std::move(m))};
}

bool is_connected(const Graph& g) {
  const int n = g.size();
  if (n == 0) {
    return true;
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (!seen[v] && g.weight(u, v) > 0.0) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

std::vector<int> closed_neighborhood(const Graph& g, int k) {
  if (k < 0 || k >= g.size()) {
    throw InvalidInputError("closed_neighborhood: node index out of range");
  }
  std::vector<int> out;
  for (int j = 0; j < g.size(); ++j) {
    if (j == k || g.weight(k, j) > 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

namespace detail {

Graph erdos_renyi_single_draw(int n, double p_link, double w_lo, double w_hi,
                              RandomStream& rng) {
  SymmetricMatrix weights(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p_link)) {
        weights.set(i, j, rng.uniform(w_lo, w_hi));
      }
    }
  }
  return Graph::from_weights(std::move(weights));
}

}  // namespace detail

Graph erdos_renyi(int n, double p_link, double w_lo, double w_hi,
                  RandomStream& rng, int max_attempts) {
  if (n < 2) {
    throw InvalidInputError("erdos_renyi: need at least 2 nodes");
  }
  if (!(p_link > 0.0) || p_link > 1.0) {
    throw InvalidInputError("erdos_renyi: p_link must be in (0, 1]");
  }
  if (!(w_lo > 0.0) || w_lo > w_hi) {
    throw InvalidInputError("erdos_renyi: need 0 < w_lo <= w_hi");
  }
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = detail::erdos_renyi_single_draw(n, p_link, w_lo, w_hi, rng);
    if (is_connected(g)) {
      return g;
    }
  }
  std::ostringstream os;
  os << "erdos_renyi: no connected graph in " << max_attempts
     << " attempts (n = " << n << ", p_link = " << p_link << ")";
  throw GraphGenerationError(os.str());
}

void write_edge_list(const Graph& g, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < g.size(); ++i) {
    for (int j = i + 1; j < g.size(); ++j) {
      if (g.weight(i, j) > 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.weight(i, j));
        out << i << ' ' << j << ' ' << buf << '\n';
      }
    }
  }
}

Graph read_edge_list(std::istream& in) {
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  int max_node = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    Edge e{};
    if (!(ls >> e.i >> e.j >> e.w)) {
      throw ParseError(line_no, "expected 'i j weight'");
    }
    if (e.i < 0 || e.j < 0 || e.i == e.j) {
      throw ParseError(line_no, "bad edge endpoints");
    }
    edges.push_back(e);
    max_node = std::max({max_node, e.i, e.j});
  }
  SymmetricMatrix weights(max_node + 1);
  for (const Edge& e : edges) {
    weights.set(e.i, e.j, e.w);
  }
  return Graph::from_weights(std::move(weights));
}

}  // namespace sgsr

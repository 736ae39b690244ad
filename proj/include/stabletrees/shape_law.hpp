#pragma once

#include <map>
#include <string>
#include <vector>

namespace stabletrees {

// combinatorial rooted tree: vertex 0 is the root (degree 1), leaves are
// labelled 1..p in order of appearance, no degree-2 vertices
struct DiscreteTree {
  std::vector<int> parent;                 // -1 for the root
  std::vector<std::vector<int>> children;
  std::vector<int> label;                  // 0 for root/internal vertices
  int leaf_count = 0;

  static DiscreteTree initial();  // root -- leaf 1

  int degree(int v) const {
    return static_cast<int>(children[v].size()) + (v == 0 ? 0 : 1);
  }
  int edge_count() const { return static_cast<int>(parent.size()) - 1; }
  // non-root vertex count |T_p|
  int size_nonroot() const { return static_cast<int>(parent.size()) - 1; }
  std::vector<int> internal_vertices() const;  // degree >= 3

  // Marchal moves; the new leaf gets label leaf_count + 1
  DiscreteTree split_edge(int child_vertex) const;  // edge = (parent[v], v)
  DiscreteTree attach_at(int vertex) const;

  std::string shape() const;           // canonical AHU, leaves unlabelled
  std::string labelled_shape() const;  // canonical with leaf labels
};

using ShapeTable = std::map<std::string, double>;

// exact law of the shape of the p-leaf tree, by dynamic programming over
// Marchal transition probabilities ((alpha-1)/(p alpha - 1) per edge,
// (d - 1 - alpha)/(p alpha - 1) per internal vertex of degree d);
// probabilities aggregated over canonical unlabelled signatures.
// p is capped (default 6) because the state space grows quickly.
ShapeTable enumerate_shape_law(double alpha, int p, int cap = 6);

// closed-form probability of one labelled shape:
//   P(t) = prod_{v: d_v >= 3} (alpha-1) prod_{k=2}^{d_v-2} (k - alpha)
//          ------------------------------------------------------------
//                     prod_{i=1}^{p-1} (i alpha - 1)
double shape_formula_probability(const DiscreteTree& t, double alpha);

// law over unlabelled signatures obtained by enumerating every labelled
// p-leaf tree (each is generated exactly once through its unique growth
// history) and summing the closed-form probabilities
ShapeTable shape_formula_law(double alpha, int p, int cap = 6);

// all labelled trees with p leaves, each exactly once
std::vector<DiscreteTree> enumerate_labelled_trees(int p, int cap = 6);

}  // namespace stabletrees

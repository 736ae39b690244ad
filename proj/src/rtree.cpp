#include "stabletrees/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stabletrees {

RTree::RTree(double first_length, bool track_weights)
    : track_weights_(track_weights) {
  if (!(first_length > 0.0))
    throw structural_error("RTree: first segment length must be > 0");
  vertices_.push_back(Vertex{npos, 1, 0});  // root
  vertices_.push_back(Vertex{0, 1, 1});     // leaf 1
  weight_slot_.assign(2, npos);
  leaf_of_label_.push_back(1);
  edges_.push_back(Edge{0, 1, first_length});
  lengths_.push_back(first_length);
}

std::size_t RTree::new_vertex(std::size_t parent_edge, std::uint32_t degree,
                              std::uint32_t label) {
  vertices_.push_back(Vertex{parent_edge, degree, label});
  weight_slot_.push_back(npos);
  return vertices_.size() - 1;
}

double RTree::weight_sum_exact() const {
  return track_weights_ ? weights_.total_exact() : 0.0;
}

double RTree::weight(std::size_t v) const {
  if (!track_weights_ || v >= vertices_.size() || weight_slot_[v] == npos)
    return 0.0;
  return weights_.get(weight_slot_[v]);
}

SkeletonPoint RTree::sample_point(RngStream& rng) const {
  const double total = lengths_.total();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double x = rng.uniform() * total;
    if (x >= total) continue;  // u*total may round up to total
    const std::size_t e = lengths_.find(x);
    const double offset = x - lengths_.prefix(e);
    if (offset > 0.0 && offset < edges_[e].length)
      return SkeletonPoint{e, offset};
    // boundary hit: resample rather than return a vertex position
  }
  throw structural_error("sample_point: persistent boundary draws");
}

std::size_t RTree::sample_weighted_vertex(RngStream& rng) const {
  if (!track_weights_)
    throw structural_error("sample_weighted_vertex: weights not tracked");
  const double total = weights_.total();
  if (!(total > 0.0))
    throw structural_error("sample_weighted_vertex: no weight to sample");
  double x;
  do {
    x = rng.uniform() * total;
  } while (x >= total);
  return slot_vertex_[weights_.find(x)];
}

std::size_t RTree::glue_at_point(const SkeletonPoint& pt,
                                 double branch_length) {
  if (pt.edge >= edges_.size())
    throw structural_error("glue_at_point: stale edge id");
  Edge& host = edges_[pt.edge];
  if (!(pt.offset > 0.0) || !(pt.offset < host.length))
    throw structural_error("glue_at_point: offset outside the host edge");
  if (!(branch_length > 0.0))
    throw structural_error("glue_at_point: branch length must be > 0");

  const std::uint32_t old_child = host.child;
  const double leafward_len = host.length - pt.offset;

  // the host edge keeps the rootward fragment under its original id
  const std::size_t mid =
      new_vertex(pt.edge, 3, 0);  // created internal vertex
  host.child = static_cast<std::uint32_t>(mid);
  host.length = pt.offset;
  lengths_.set(pt.edge, pt.offset);

  const std::size_t leafward = edges_.size();
  edges_.push_back(Edge{static_cast<std::uint32_t>(mid), old_child,
                        leafward_len});
  lengths_.push_back(leafward_len);
  vertices_[old_child].parent_edge = leafward;

  const std::uint32_t label =
      static_cast<std::uint32_t>(leaf_of_label_.size() + 1);
  const std::size_t branch = edges_.size();
  const std::size_t leaf = new_vertex(branch, 1, label);
  edges_.push_back(Edge{static_cast<std::uint32_t>(mid),
                        static_cast<std::uint32_t>(leaf), branch_length});
  lengths_.push_back(branch_length);
  leaf_of_label_.push_back(leaf);

  if (track_weights_) {
    weight_slot_[mid] = weights_.size();
    slot_vertex_.push_back(mid);
    weights_.push_back(0.0);
  }
  last_glue_vertex_ = mid;
  return leaf;
}

std::size_t RTree::glue_at_vertex(std::size_t v, double branch_length) {
  if (v >= vertices_.size())
    throw structural_error("glue_at_vertex: no such vertex");
  if (vertices_[v].degree < 3)
    throw structural_error("glue_at_vertex: host must be an internal vertex");
  if (!(branch_length > 0.0))
    throw structural_error("glue_at_vertex: branch length must be > 0");
  const std::uint32_t label =
      static_cast<std::uint32_t>(leaf_of_label_.size() + 1);
  const std::size_t branch = edges_.size();
  const std::size_t leaf = new_vertex(branch, 1, label);
  edges_.push_back(Edge{static_cast<std::uint32_t>(v),
                        static_cast<std::uint32_t>(leaf), branch_length});
  lengths_.push_back(branch_length);
  vertices_[v].degree += 1;
  leaf_of_label_.push_back(leaf);
  last_glue_vertex_ = v;
  return leaf;
}

void RTree::add_weight(std::size_t v, double dw) {
  if (!track_weights_)
    throw structural_error("add_weight: weights not tracked");
  if (v >= vertices_.size() || weight_slot_[v] == npos)
    throw structural_error("add_weight: vertex carries no weight slot");
  weights_.add(weight_slot_[v], dw);
  weight_sum_ += dw;
}

std::vector<double> RTree::depths() const {
  std::vector<double> depth(vertices_.size(),
                            -std::numeric_limits<double>::infinity());
  depth[0] = 0.0;
  std::vector<std::size_t> stack;
  for (std::size_t v = 1; v < vertices_.size(); ++v) {
    if (depth[v] >= 0.0) continue;
    std::size_t u = v;
    stack.clear();
    while (depth[u] < 0.0) {
      stack.push_back(u);
      u = edges_[vertices_[u].parent_edge].parent;
    }
    double d = depth[u];
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      d += edges_[vertices_[*it].parent_edge].length;
      depth[*it] = d;
    }
  }
  return depth;
}

double RTree::distance(std::size_t a, std::size_t b) const {
  if (a >= vertices_.size() || b >= vertices_.size())
    throw structural_error("distance: no such vertex");
  const std::vector<double> depth = depths();
  // climb to the common ancestor, deeper side first
  auto hop = [&](std::size_t v) {
    return static_cast<std::size_t>(edges_[vertices_[v].parent_edge].parent);
  };
  std::size_t x = a, y = b;
  double d = 0.0;
  while (x != y) {
    if (depth[x] >= depth[y]) {
      d += edges_[vertices_[x].parent_edge].length;
      x = hop(x);
    } else {
      d += edges_[vertices_[y].parent_edge].length;
      y = hop(y);
    }
  }
  return d;
}

std::vector<std::vector<double>> RTree::distance_matrix() const {
  const std::vector<double> depth = depths();
  std::vector<std::size_t> nodes;
  nodes.push_back(0);
  for (std::size_t leaf : leaf_of_label_) nodes.push_back(leaf);
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  auto hop = [&](std::size_t v) {
    return static_cast<std::size_t>(edges_[vertices_[v].parent_edge].parent);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t x = nodes[i], y = nodes[j];
      while (x != y) {
        if (depth[x] >= depth[y])
          x = hop(x);
        else
          y = hop(y);
      }
      const double d = depth[nodes[i]] + depth[nodes[j]] - 2.0 * depth[x];
      m[i][j] = m[j][i] = d;
    }
  }
  return m;
}

std::vector<std::vector<std::size_t>> RTree::children_edges() const {
  std::vector<std::vector<std::size_t>> ch(vertices_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e)
    ch[edges_[e].parent].push_back(e);
  return ch;
}

namespace {

// iterative AHU encoding; labelled leaves render as (=k), unlabelled as ()
std::string ahu_encode(
    const std::vector<std::vector<std::size_t>>& children_of,
    const std::vector<RTree::Edge>& edges, std::size_t root, bool labelled,
    const std::vector<RTree::Vertex>& vertices) {
  struct Frame {
    std::size_t v;
    std::size_t next = 0;
    std::vector<std::string> parts;
  };
  std::vector<Frame> stack;
  stack.push_back(Frame{root});
  std::string result;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = children_of[f.v];
    if (f.next < kids.size()) {
      const std::size_t child = edges[kids[f.next]].child;
      ++f.next;
      stack.push_back(Frame{child});
      continue;
    }
    std::string enc;
    if (kids.empty() && labelled && vertices[f.v].label != 0) {
      enc = "(=" + std::to_string(vertices[f.v].label) + ")";
    } else {
      std::sort(f.parts.begin(), f.parts.end());
      enc = "(";
      for (const auto& s : f.parts) enc += s;
      enc += ")";
    }
    stack.pop_back();
    if (stack.empty())
      result = std::move(enc);
    else
      stack.back().parts.push_back(std::move(enc));
  }
  return result;
}

}  // namespace

std::string RTree::shape() const {
  return ahu_encode(children_edges(), edges_, 0, false, vertices_);
}

std::string RTree::labelled_shape() const {
  return ahu_encode(children_edges(), edges_, 0, true, vertices_);
}

std::vector<std::size_t> RTree::degree_census() const {
  std::size_t dmax = 0;
  for (const auto& v : vertices_) dmax = std::max<std::size_t>(dmax, v.degree);
  std::vector<std::size_t> census(dmax + 1, 0);
  for (const auto& v : vertices_) census[v.degree] += 1;
  return census;
}

std::vector<std::pair<std::size_t, double>> RTree::vertex_selection_weights(
    double alpha) const {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t v = 1; v < vertices_.size(); ++v)
    if (vertices_[v].degree >= 3)
      out.emplace_back(v, vertices_[v].degree - 1.0 - alpha);
  return out;
}

void RTree::validate() const {
  if (vertices_.empty() || vertices_[0].parent_edge != npos ||
      vertices_[0].degree != 1)
    throw structural_error("validate: malformed root");
  std::vector<std::uint32_t> deg(vertices_.size(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.parent >= vertices_.size() || ed.child >= vertices_.size())
      throw structural_error("validate: edge endpoint out of range");
    if (!(ed.length > 0.0))
      throw structural_error("validate: non-positive edge length");
    if (vertices_[ed.child].parent_edge != e)
      throw structural_error("validate: child/parent-edge mismatch");
    deg[ed.parent] += 1;
    deg[ed.child] += 1;
  }
  std::size_t leaves = 0;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (deg[v] != vertices_[v].degree)
      throw structural_error("validate: stored degree disagrees with edges");
    if (deg[v] == 2) throw structural_error("validate: degree-2 vertex");
    if (v != 0 && deg[v] == 1) {
      ++leaves;
      if (vertices_[v].label == 0)
        throw structural_error("validate: unlabelled leaf");
    }
  }
  if (leaves != leaf_of_label_.size())
    throw structural_error("validate: leaf count mismatch");
  const std::size_t p = leaf_of_label_.size();
  if (p >= 2 && size_nonroot() > 3 + 2 * (p - 2))
    throw structural_error("validate: vertex count exceeds 3 + 2(p-2)");
  const double exact = total_length_exact();
  if (std::abs(lengths_.total() - exact) > 1e-9 * std::max(1.0, exact))
    throw structural_error("validate: length index drifted from edge lengths");
  if (track_weights_) {
    const double wexact = weights_.total_exact();
    if (std::abs(weight_sum_ - wexact) > 1e-9 * std::max(1.0, wexact))
      throw structural_error("validate: weight ledger drifted");
  }
}

RTree RTree::from_parts(const std::vector<std::size_t>& parent,
                        const std::vector<double>& length,
                        const std::vector<std::size_t>& leaf_order,
                        const std::vector<double>* weights) {
  const std::size_t n = parent.size();
  if (length.size() != n || n < 2)
    throw structural_error("from_parts: inconsistent arrays");
  RTree t;
  t.track_weights_ = weights != nullptr;
  t.vertices_.assign(n, Vertex{npos, 0, 0});
  t.weight_slot_.assign(n, npos);
  for (std::size_t v = 1; v < n; ++v) {
    if (parent[v] >= n || parent[v] == v)
      throw structural_error("from_parts: bad parent id");
    const std::size_t e = t.edges_.size();
    t.edges_.push_back(Edge{static_cast<std::uint32_t>(parent[v]),
                            static_cast<std::uint32_t>(v), length[v]});
    t.lengths_.push_back(length[v]);
    t.vertices_[v].parent_edge = e;
    t.vertices_[v].degree += 1;
    t.vertices_[parent[v]].degree += 1;
  }
  for (std::size_t i = 0; i < leaf_order.size(); ++i) {
    if (leaf_order[i] >= n) throw structural_error("from_parts: bad leaf id");
    t.vertices_[leaf_order[i]].label = static_cast<std::uint32_t>(i + 1);
  }
  t.leaf_of_label_ = leaf_order;
  if (weights) {
    for (std::size_t v = 0; v < n; ++v) {
      if (t.vertices_[v].degree >= 3) {
        t.weight_slot_[v] = t.weights_.size();
        t.slot_vertex_.push_back(v);
        t.weights_.push_back((*weights)[v]);
        t.weight_sum_ += (*weights)[v];
      }
    }
  }
  t.validate();
  return t;
}

}  // namespace stabletrees

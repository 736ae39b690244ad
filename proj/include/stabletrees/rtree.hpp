#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stabletrees/fenwick.hpp"
#include "stabletrees/rng.hpp"

namespace stabletrees {

struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a point on the skeleton: host edge id plus offset from the rootward
// endpoint, strictly inside (0, length)
struct SkeletonPoint {
  std::size_t edge;
  double offset;
};

// Rooted tree with positive edge lengths, no degree-2 vertices and a
// degree-1 root (vertex 0).  Leaves carry labels 1..p in order of
// creation.  Edge ids are stable: splitting an edge keeps the rootward
// fragment under the original id.  A Fenwick index over edge lengths
// supports O(log n) uniform sampling on the skeleton; an optional second
// index tracks internal-vertex weights.
class RTree {
 public:
  struct Edge {
    std::uint32_t parent;
    std::uint32_t child;
    double length;
  };

  struct Vertex {
    std::size_t parent_edge;  // npos for the root
    std::uint32_t degree;
    std::uint32_t label;  // leaf label, 0 for root/internal
  };

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  RTree(double first_length, bool track_weights = false);

  std::size_t leaf_count() const { return leaf_of_label_.size(); }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  // non-root vertex count |T_p|, as used by the selection identities
  std::size_t size_nonroot() const { return vertices_.size() - 1; }

  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const Vertex& vertex(std::size_t v) const { return vertices_[v]; }
  std::size_t leaf_vertex(std::uint32_t label) const {
    return leaf_of_label_.at(label - 1);
  }
  const std::vector<std::size_t>& leaf_order() const { return leaf_of_label_; }
  bool weights_tracked() const { return track_weights_; }

  double total_length() const { return lengths_.total(); }
  double total_length_exact() const { return lengths_.total_exact(); }
  double weight_sum() const { return weight_sum_; }
  double weight_sum_exact() const;
  double weight(std::size_t v) const;

  // uniform point w.r.t. length measure; boundary hits are resampled
  SkeletonPoint sample_point(RngStream& rng) const;
  // internal vertex chosen proportionally to its tracked weight
  std::size_t sample_weighted_vertex(RngStream& rng) const;

  // split the host edge at the given point and hang a new leaf off the
  // created vertex; returns the new leaf's vertex id
  std::size_t glue_at_point(const SkeletonPoint& pt, double branch_length);
  // hang a new leaf off an existing internal vertex
  std::size_t glue_at_vertex(std::size_t v, double branch_length);
  void add_weight(std::size_t v, double dw);

  // the internal vertex created (edge glue) or reused (vertex glue) by the
  // most recent glue operation
  std::size_t last_glue_vertex() const { return last_glue_vertex_; }

  double distance(std::size_t a, std::size_t b) const;
  // symmetric matrix over {root, leaf 1, ..., leaf p} in that order
  std::vector<std::vector<double>> distance_matrix() const;

  // canonical (AHU) encoding of the combinatorial shape, leaves unlabelled
  std::string shape() const;
  // canonical encoding retaining leaf labels
  std::string labelled_shape() const;
  // census[d] = number of vertices of degree d
  std::vector<std::size_t> degree_census() const;
  // per-internal-vertex selection weights d_v - 1 - alpha (vertex id, weight)
  std::vector<std::pair<std::size_t, double>> vertex_selection_weights(
      double alpha) const;

  // structural invariants; throws structural_error on violation
  void validate() const;

  // rebuild from serialized parts: parent[i], length[i] per non-root
  // vertex (parent of vertex 0 ignored), labels as in leaf_order
  static RTree from_parts(const std::vector<std::size_t>& parent,
                          const std::vector<double>& length,
                          const std::vector<std::size_t>& leaf_order,
                          const std::vector<double>* weights = nullptr);

 private:
  RTree() = default;
  std::size_t new_vertex(std::size_t parent_edge, std::uint32_t degree,
                         std::uint32_t label);
  std::vector<std::vector<std::size_t>> children_edges() const;
  std::vector<double> depths() const;

  std::vector<Edge> edges_;
  std::vector<Vertex> vertices_;
  std::vector<std::size_t> leaf_of_label_;
  FenwickTree lengths_;
  bool track_weights_ = false;
  FenwickTree weights_;               // slot per vertex id (0 unless internal)
  std::vector<std::size_t> weight_slot_;  // vertex id -> weight slot, npos if none
  std::vector<std::size_t> slot_vertex_;  // weight slot -> vertex id
  double weight_sum_ = 0.0;
  std::size_t last_glue_vertex_ = npos;
};

}  // namespace stabletrees

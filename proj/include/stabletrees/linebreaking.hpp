#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabletrees/rtree.hpp"
#include "stabletrees/shape_law.hpp"

namespace stabletrees {

enum class Algorithm {
  I,             // vertex choice by degree weights d - 1 - alpha
  II,            // vertex choice by accumulated leftover weights
  NormalizedI,   // M_1 replaced by 1 (randomly rescaled tree)
  NormalizedII,
  Aldous,        // alpha = 2 only: cuts from a Poisson process of rate c*t
};

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_name(Algorithm a);

struct GrowthConfig {
  double alpha = 2.0;
  long p_target = 1;
  Algorithm algorithm = Algorithm::I;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  long n_trunc = 0;  // 0 -> default_n_trunc()
  bool track_weights = false;  // forced on for II / NormalizedII
  double aldous_intensity = 1.0;  // cut-point intensity c * t dt
  std::vector<long> snapshots;    // leaf counts at which to copy the tree
  bool record_trace = false;
};

struct TraceRow {
  long p;        // leaf count after the round
  double m;      // M_p
  double beta;   // backward factor used in the round (NaN for init/Aldous)
  double b;      // branch fraction B (1 for init/Aldous)
  char kind;     // 'i' init, 'e' edge glue, 'v' vertex glue
  std::size_t host;  // host edge id ('e') or vertex id ('v')
  double branch;     // length of the added branch
  // ledger snapshot after the round
  double ell;        // total length L_p
  double wsum;       // tracked weight sum (NaN when weights are off)
  double degsum;     // sum of d_v - 1 - alpha over internal vertices
  long nonroot;      // |T_p|, the non-root vertex count
};

struct GrowthResult {
  RTree tree;
  std::vector<RTree> snapshots;
  std::vector<TraceRow> trace;
  double m1 = 0.0;
  double m_final = 0.0;
  bool trunc_warning = false;
};

// Draw order: algorithms I/II at alpha < 2 consume the whole chain ladder
// up front (chain_init), then per round p -> p+1: B, the edge/vertex
// selector, the placement draw.  The normalized variants draw beta_p
// fresh each round instead of a ladder; Aldous and the alpha = 2 chain
// consume one exponential per round.  Beta(a,0) draws consume nothing.
// At alpha == 2 the vertex branch is structurally unreachable (L_p = M_p)
// and the selector is skipped.
GrowthResult grow(const GrowthConfig& cfg);

// Marchal's recursive construction of the discrete shape: an edge is
// picked with weight alpha - 1, an internal vertex of degree d with
// weight d - 1 - alpha (total p alpha - 1 after p leaves).
DiscreteTree grow_marchal(double alpha, long p_target, RngStream& rng);
// alpha = 2 specialization (uniform leaf-labelled binary trees)
DiscreteTree grow_remy(long p_target, RngStream& rng);

}  // namespace stabletrees

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stabletrees/rtree.hpp"

namespace stabletrees {

// Serialized tree: {format, alpha, seed, weights_tracked, leaf_order,
// vertices: [{id, parent, length[, weight]}]}.  Vertex 0 is the root and
// carries null parent/length.  Numbers survive a round trip bit for bit.
std::string tree_to_json(const RTree& tree, double alpha, std::uint64_t seed);
RTree tree_from_json(const std::string& text, double* alpha_out = nullptr,
                     std::uint64_t* seed_out = nullptr);

// Newick with the root vertex exported as an extra tip called "root" on
// the first branch point: "(L1:a,L2:b,root:c);".  A single-edge tree
// degenerates to "(root:c)L1;".  Leaf names are L1..Lp.
std::string tree_to_newick(const RTree& tree);
RTree tree_from_newick(const std::string& text);

// square CSV over {root, L1, ..., Lp} with a header row
std::string distance_matrix_csv(const RTree& tree);

// CSV of the chain trajectory with a "p,m" header
std::string chain_csv(const std::vector<std::pair<long, double>>& rows);

// write-temp-then-rename in the target directory
void atomic_write(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace stabletrees

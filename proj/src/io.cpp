#include "stabletrees/io.hpp"

#include <unistd.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stabletrees {

namespace {

using json = nlohmann::json;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// child edge ids grouped by parent vertex, in edge-id order
std::vector<std::vector<std::size_t>> children_of(const RTree& t) {
  std::vector<std::vector<std::size_t>> kids(t.vertex_count());
  for (std::size_t e = 0; e < t.edge_count(); ++e)
    kids[t.edge(e).parent].push_back(e);
  return kids;
}

}  // namespace

std::string tree_to_json(const RTree& tree, double alpha, std::uint64_t seed) {
  json j;
  j["format"] = "stabletrees-tree";
  j["version"] = 1;
  j["alpha"] = alpha;
  j["seed"] = seed;
  j["weights_tracked"] = tree.weights_tracked();
  j["leaf_order"] = tree.leaf_order();
  json verts = json::array();
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) {
    json jv;
    jv["id"] = v;
    if (v == 0) {
      jv["parent"] = nullptr;
      jv["length"] = nullptr;
    } else {
      const auto& e = tree.edge(tree.vertex(v).parent_edge);
      jv["parent"] = static_cast<std::size_t>(e.parent);
      jv["length"] = e.length;
    }
    if (tree.weights_tracked() && tree.vertex(v).degree >= 3)
      jv["weight"] = tree.weight(v);
    verts.push_back(std::move(jv));
  }
  j["vertices"] = std::move(verts);
  return j.dump(2) + "\n";
}

RTree tree_from_json(const std::string& text, double* alpha_out,
                     std::uint64_t* seed_out) {
  json j = json::parse(text);
  if (j.value("format", "") != "stabletrees-tree")
    throw structural_error("tree json: unrecognized format field");
  if (alpha_out) *alpha_out = j.at("alpha").get<double>();
  if (seed_out) *seed_out = j.at("seed").get<std::uint64_t>();
  const auto& verts = j.at("vertices");
  const std::size_t n = verts.size();
  if (n < 2) throw structural_error("tree json: need at least two vertices");
  std::vector<std::size_t> parent(n, 0);
  std::vector<double> length(n, 0.0);
  std::vector<double> weights(n, 0.0);
  for (const auto& jv : verts) {
    const std::size_t id = jv.at("id").get<std::size_t>();
    if (id >= n) throw structural_error("tree json: vertex id out of range");
    if (id > 0) {
      parent[id] = jv.at("parent").get<std::size_t>();
      length[id] = jv.at("length").get<double>();
    }
    if (jv.contains("weight")) weights[id] = jv["weight"].get<double>();
  }
  const auto leaf_order = j.at("leaf_order").get<std::vector<std::size_t>>();
  const bool tracked = j.value("weights_tracked", false);
  return RTree::from_parts(parent, length, leaf_order,
                           tracked ? &weights : nullptr);
}

namespace {

// subtree string for `start`, without the trailing ":length"
void write_subtree(const RTree& t,
                   const std::vector<std::vector<std::size_t>>& kids,
                   std::size_t start, std::string& out) {
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> stack{{start, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& ks = kids[f.v];
    if (f.next == 0 && !ks.empty()) out += '(';
    if (f.next < ks.size()) {
      if (f.next > 0) out += ',';
      const std::size_t child = t.edge(ks[f.next]).child;
      ++f.next;
      stack.push_back(Frame{child, 0});  // invalidates f
      continue;
    }
    const std::size_t v = f.v;
    if (ks.empty())
      out += "L" + std::to_string(t.vertex(v).label);
    else
      out += ')';
    stack.pop_back();
    if (!stack.empty()) {
      out += ':';
      out += fmt_double(t.edge(t.vertex(v).parent_edge).length);
    }
  }
}

}  // namespace

std::string tree_to_newick(const RTree& tree) {
  const auto kids = children_of(tree);
  if (kids[0].size() != 1)
    throw structural_error("newick: root must have exactly one child");
  const auto& e0 = tree.edge(kids[0][0]);
  if (tree.leaf_count() == 1)
    return "(root:" + fmt_double(e0.length) + ")L1;";
  const std::size_t v1 = e0.child;
  std::string out = "(";
  for (std::size_t ke : kids[v1]) {
    const auto& e = tree.edge(ke);
    write_subtree(tree, kids, e.child, out);
    out += ':';
    out += fmt_double(e.length);
    out += ',';
  }
  out += "root:";
  out += fmt_double(e0.length);
  out += ");";
  return out;
}

namespace {

struct PNode {
  std::string name;
  double length = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> kids;
  int parent = -1;
};

std::vector<PNode> parse_newick_nodes(const std::string& s) {
  std::vector<PNode> arena(1);  // [0] is a sentinel super-root
  int cur = 0;
  int last = -1;  // node that a following name/:length attaches to
  std::size_t i = 0;
  const std::size_t n = s.size();
  bool terminated = false;
  while (i < n) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      const int id = static_cast<int>(arena.size());
      arena.push_back(PNode{});
      arena[id].parent = cur;
      arena[cur].kids.push_back(id);
      cur = id;
      last = -1;
      ++i;
    } else if (c == ',') {
      last = -1;
      ++i;
    } else if (c == ')') {
      if (cur == 0) throw structural_error("newick: unbalanced ')'");
      last = cur;
      cur = arena[cur].parent;
      ++i;
    } else if (c == ':') {
      if (last < 0) throw structural_error("newick: dangling ':'");
      ++i;
      std::size_t used = 0;
      arena[last].length = std::stod(s.substr(i), &used);
      i += used;
    } else if (c == ';') {
      terminated = true;
      ++i;
      break;
    } else {
      std::size_t j = i;
      while (j < n && s[j] != '(' && s[j] != ')' && s[j] != ',' &&
             s[j] != ':' && s[j] != ';' &&
             !std::isspace(static_cast<unsigned char>(s[j])))
        ++j;
      if (last >= 0) {
        arena[last].name = s.substr(i, j - i);
      } else {
        const int id = static_cast<int>(arena.size());
        arena.push_back(PNode{});
        arena[id].parent = cur;
        arena[id].name = s.substr(i, j - i);
        arena[cur].kids.push_back(id);
        last = id;
      }
      i = j;
    }
  }
  if (!terminated || cur != 0 || arena[0].kids.size() != 1)
    throw structural_error("newick: malformed input");
  while (i < n) {
    if (!std::isspace(static_cast<unsigned char>(s[i])))
      throw structural_error("newick: trailing content after ';'");
    ++i;
  }
  return arena;
}

std::uint32_t parse_leaf_label(const std::string& name) {
  if (name.size() < 2 || name[0] != 'L')
    throw structural_error("newick: leaf name must look like L<k>: " + name);
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i])))
      throw structural_error("newick: leaf name must look like L<k>: " + name);
  return static_cast<std::uint32_t>(std::stoul(name.substr(1)));
}

double checked_length(const PNode& nd) {
  if (!std::isfinite(nd.length) || nd.length <= 0.0)
    throw structural_error("newick: every branch needs a positive length");
  return nd.length;
}

}  // namespace

RTree tree_from_newick(const std::string& text) {
  const auto arena = parse_newick_nodes(text);
  const PNode& top = arena[arena[0].kids[0]];

  // single-edge special case: "(root:len)L1;"
  if (top.kids.size() == 1 && arena[top.kids[0]].name == "root" &&
      arena[top.kids[0]].kids.empty()) {
    if (parse_leaf_label(top.name) != 1)
      throw structural_error("newick: single leaf must be L1");
    const std::vector<std::size_t> parent{0, 0};
    const std::vector<double> length{0.0, checked_length(arena[top.kids[0]])};
    return RTree::from_parts(parent, length, {1});
  }

  // locate the root tip among the top node's children
  int root_tip = -1;
  for (int k : top.kids)
    if (arena[k].name == "root" && arena[k].kids.empty()) {
      if (root_tip >= 0) throw structural_error("newick: duplicate root tip");
      root_tip = k;
    }
  if (root_tip < 0)
    throw structural_error("newick: no tip named root adjacent to the top");
  if (!top.name.empty())
    throw structural_error("newick: top node must be unnamed");

  // vertex 0 = root, vertex 1 = the top node, rest in preorder
  std::vector<std::size_t> parent{0, 0};
  std::vector<double> length{0.0, checked_length(arena[root_tip])};
  std::vector<std::pair<std::uint32_t, std::size_t>> labelled;  // label, vertex
  struct Item {
    int node;
    std::size_t parent_vertex;
  };
  std::vector<Item> stack;
  for (auto it = top.kids.rbegin(); it != top.kids.rend(); ++it)
    if (*it != root_tip) stack.push_back(Item{*it, 1});
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const PNode& nd = arena[item.node];
    const std::size_t id = parent.size();
    parent.push_back(item.parent_vertex);
    length.push_back(checked_length(nd));
    if (nd.kids.empty()) {
      labelled.emplace_back(parse_leaf_label(nd.name), id);
    } else {
      if (!nd.name.empty())
        throw structural_error("newick: internal nodes must be unnamed");
      for (auto it = nd.kids.rbegin(); it != nd.kids.rend(); ++it)
        stack.push_back(Item{*it, id});
    }
  }

  std::vector<std::size_t> leaf_order(labelled.size(), RTree::npos);
  for (const auto& [label, v] : labelled) {
    if (label == 0 || label > labelled.size() ||
        leaf_order[label - 1] != RTree::npos)
      throw structural_error("newick: leaf labels must be a permutation of 1..p");
    leaf_order[label - 1] = v;
  }
  return RTree::from_parts(parent, length, leaf_order);
}

std::string distance_matrix_csv(const RTree& tree) {
  const auto m = tree.distance_matrix();
  std::string out = "node,root";
  for (std::size_t i = 1; i < m.size(); ++i)
    out += ",L" + std::to_string(i);
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i == 0 ? "root" : "L" + std::to_string(i);
    for (double d : m[i]) {
      out += ',';
      out += fmt_double(d);
    }
    out += '\n';
  }
  return out;
}

std::string chain_csv(const std::vector<std::pair<long, double>>& rows) {
  std::string out = "p,m\n";
  for (const auto& [p, m] : rows) {
    out += std::to_string(p);
    out += ',';
    out += fmt_double(m);
    out += '\n';
  }
  return out;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw std::runtime_error("short write: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace stabletrees

#include "stabletrees/shape_law.hpp"

#include <algorithm>
#include <stdexcept>

#include "stabletrees/chain.hpp"

namespace stabletrees {

DiscreteTree DiscreteTree::initial() {
  DiscreteTree t;
  t.parent = {-1, 0};
  t.children = {{1}, {}};
  t.label = {0, 1};
  t.leaf_count = 1;
  return t;
}

std::vector<int> DiscreteTree::internal_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(parent.size()); ++v)
    if (degree(v) >= 3) out.push_back(v);
  return out;
}

DiscreteTree DiscreteTree::split_edge(int v) const {
  if (v <= 0 || v >= static_cast<int>(parent.size()))
    throw std::invalid_argument("split_edge: not a non-root vertex");
  DiscreteTree t = *this;
  const int u = t.parent[v];
  const int mid = static_cast<int>(t.parent.size());
  const int leaf = mid + 1;
  t.parent.push_back(u);    // mid
  t.parent.push_back(mid);  // new leaf
  t.children.push_back({v, leaf});
  t.children.push_back({});
  t.label.push_back(0);
  t.label.push_back(leaf_count + 1);
  auto& uc = t.children[u];
  *std::find(uc.begin(), uc.end(), v) = mid;
  t.parent[v] = mid;
  t.leaf_count += 1;
  return t;
}

DiscreteTree DiscreteTree::attach_at(int v) const {
  if (degree(v) < 3) throw std::invalid_argument("attach_at: not internal");
  DiscreteTree t = *this;
  const int leaf = static_cast<int>(t.parent.size());
  t.parent.push_back(v);
  t.children.push_back({});
  t.label.push_back(leaf_count + 1);
  t.children[v].push_back(leaf);
  t.leaf_count += 1;
  return t;
}

namespace {

std::string encode(const DiscreteTree& t, int v, bool labelled) {
  const auto& kids = t.children[v];
  if (kids.empty())
    return labelled ? "(=" + std::to_string(t.label[v]) + ")" : "()";
  std::vector<std::string> parts;
  parts.reserve(kids.size());
  for (int c : kids) parts.push_back(encode(t, c, labelled));
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (const auto& s : parts) out += s;
  out += ")";
  return out;
}

}  // namespace

std::string DiscreteTree::shape() const { return encode(*this, 0, false); }
std::string DiscreteTree::labelled_shape() const {
  return encode(*this, 0, true);
}

ShapeTable enumerate_shape_law(double alpha, int p, int cap) {
  make_alpha(alpha);
  if (p < 1) throw std::invalid_argument("enumerate_shape_law: p must be >= 1");
  if (p > cap)
    throw std::range_error("enumerate_shape_law: p exceeds the enumeration cap");

  // DP over distinct signatures; transition probabilities depend on the
  // structure only, so one concrete representative per signature suffices
  std::map<std::string, std::pair<double, DiscreteTree>> level;
  const DiscreteTree t1 = DiscreteTree::initial();
  level.emplace(t1.shape(), std::make_pair(1.0, t1));
  for (int q = 1; q < p; ++q) {
    const double denom = q * alpha - 1.0;
    std::map<std::string, std::pair<double, DiscreteTree>> next;
    for (const auto& [sig, entry] : level) {
      const auto& [prob, tree] = entry;
      auto deposit = [&](DiscreteTree&& child, double transition) {
        std::string key = child.shape();
        auto it = next.find(key);
        if (it == next.end())
          next.emplace(std::move(key),
                       std::make_pair(prob * transition, std::move(child)));
        else
          it->second.first += prob * transition;
      };
      for (int v = 1; v < static_cast<int>(tree.parent.size()); ++v)
        deposit(tree.split_edge(v), (alpha - 1.0) / denom);
      for (int v : tree.internal_vertices())
        deposit(tree.attach_at(v), (tree.degree(v) - 1.0 - alpha) / denom);
    }
    level = std::move(next);
  }
  ShapeTable out;
  for (const auto& [sig, entry] : level) out[sig] = entry.first;
  return out;
}

double shape_formula_probability(const DiscreteTree& t, double alpha) {
  make_alpha(alpha);
  const int p = t.leaf_count;
  if (p < 1) throw std::invalid_argument("shape_formula_probability: empty tree");
  if (p == 1) return 1.0;
  double num = 1.0;
  for (int v = 0; v < static_cast<int>(t.parent.size()); ++v) {
    const int d = t.degree(v);
    if (d >= 3) {
      num *= alpha - 1.0;
      for (int k = 2; k <= d - 2; ++k) num *= k - alpha;
    }
  }
  double den = 1.0;
  for (int i = 1; i < p; ++i) den *= i * alpha - 1.0;
  return num / den;
}

std::vector<DiscreteTree> enumerate_labelled_trees(int p, int cap) {
  if (p < 1)
    throw std::invalid_argument("enumerate_labelled_trees: p must be >= 1");
  if (p > cap)
    throw std::range_error("enumerate_labelled_trees: p exceeds the cap");
  std::vector<DiscreteTree> level = {DiscreteTree::initial()};
  for (int q = 1; q < p; ++q) {
    std::vector<DiscreteTree> next;
    for (const auto& tree : level) {
      // every labelled (q+1)-leaf tree has a unique predecessor and move,
      // so this generates each exactly once
      for (int v = 1; v < static_cast<int>(tree.parent.size()); ++v)
        next.push_back(tree.split_edge(v));
      for (int v : tree.internal_vertices()) next.push_back(tree.attach_at(v));
    }
    level = std::move(next);
  }
  return level;
}

ShapeTable shape_formula_law(double alpha, int p, int cap) {
  ShapeTable out;
  for (const auto& t : enumerate_labelled_trees(p, cap))
    out[t.shape()] += shape_formula_probability(t, alpha);
  return out;
}

}  // namespace stabletrees

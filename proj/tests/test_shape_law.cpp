#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "stabletrees/shape_law.hpp"

using namespace stabletrees;

namespace {

DiscreteTree three_leaf_star() {
  DiscreteTree t = DiscreteTree::initial();
  t = t.split_edge(1);       // root - v - {L1, L2}
  return t.attach_at(t.internal_vertices().front());
}

double table_sum(const ShapeTable& tab) {
  double s = 0.0;
  for (const auto& [sig, prob] : tab) s += prob;
  return s;
}

}  // namespace

TEST_CASE("discrete moves") {
  DiscreteTree t = DiscreteTree::initial();
  CHECK(t.leaf_count == 1);
  CHECK(t.edge_count() == 1);
  CHECK(t.degree(0) == 1);

  t = t.split_edge(1);
  CHECK(t.leaf_count == 2);
  CHECK(t.size_nonroot() == 3);
  REQUIRE(t.internal_vertices().size() == 1);
  CHECK(t.degree(t.internal_vertices().front()) == 3);

  const DiscreteTree star = three_leaf_star();
  CHECK(star.leaf_count == 3);
  CHECK(star.degree(star.internal_vertices().front()) == 4);

  // labels are assigned in order of appearance
  std::set<int> labels;
  for (int v = 0; v < (int)star.parent.size(); ++v)
    if (star.label[v] > 0) labels.insert(star.label[v]);
  CHECK(labels == std::set<int>{1, 2, 3});
}

TEST_CASE("enumerations sum to one") {
  for (double alpha : {1.2, 1.5, 1.8, 2.0})
    for (int p = 2; p <= 5; ++p) {
      CHECK(table_sum(enumerate_shape_law(alpha, p)) ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(table_sum(shape_formula_law(alpha, p)) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("three-leaf star probability") {
  const std::string star_sig = three_leaf_star().shape();
  // (2 - alpha) / (2 alpha - 1)
  CHECK(enumerate_shape_law(1.5, 3).at(star_sig) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(enumerate_shape_law(1.2, 3).at(star_sig) ==
        doctest::Approx(0.8 / 1.4).epsilon(1e-12));
  // impossible in the binary case
  const ShapeTable binary = enumerate_shape_law(2.0, 3);
  const auto it = binary.find(star_sig);
  CHECK((it == binary.end() || it->second == 0.0));
}

TEST_CASE("closed form equals the transition-product enumeration") {
  for (double alpha : {1.3, 1.75}) {
    for (int p = 2; p <= 5; ++p) {
      const ShapeTable a = enumerate_shape_law(alpha, p);
      const ShapeTable b = shape_formula_law(alpha, p);
      REQUIRE(a.size() == b.size());
      for (const auto& [sig, prob] : a) {
        REQUIRE(b.count(sig) == 1);
        CHECK(b.at(sig) == doctest::Approx(prob).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("labelled enumeration is exhaustive and duplicate free") {
  // labelled trees with p leaves and no degree-2 vertices: 1, 4, 26, 236
  const std::size_t expected[] = {1, 4, 26, 236};
  for (int p = 2; p <= 5; ++p) {
    const auto trees = enumerate_labelled_trees(p);
    CHECK(trees.size() == expected[p - 2]);
    std::set<std::string> seen;
    double total = 0.0;
    for (const auto& t : trees) {
      CHECK(t.leaf_count == p);
      seen.insert(t.labelled_shape());
      total += shape_formula_probability(t, 1.5);
    }
    CHECK(seen.size() == trees.size());
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the cap guards the state space") {
  CHECK_THROWS(enumerate_shape_law(1.5, 7));
  CHECK_THROWS(enumerate_shape_law(1.5, 8, 7));
}

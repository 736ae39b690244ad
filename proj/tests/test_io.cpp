#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabletrees/io.hpp"
#include "stabletrees/linebreaking.hpp"
#include "stabletrees/rtree.hpp"

using namespace stabletrees;
namespace fs = std::filesystem;

namespace {

RTree grown_tree(long leaves, bool weights) {
  GrowthConfig cfg;
  cfg.alpha = 1.5;
  cfg.p_target = leaves;
  cfg.seed = 4242;
  cfg.n_trunc = 2048;
  cfg.track_weights = weights;
  return grow(cfg).tree;
}

void check_matrices_close(const RTree& a, const RTree& b, double tol) {
  const auto da = a.distance_matrix();
  const auto db = b.distance_matrix();
  REQUIRE(da.size() == db.size());
  for (std::size_t i = 0; i < da.size(); ++i)
    for (std::size_t j = 0; j < da.size(); ++j)
      CHECK(std::fabs(da[i][j] - db[i][j]) <= tol);
}

}  // namespace

TEST_CASE("json round trip") {
  const RTree t = grown_tree(9, true);
  const std::string text = tree_to_json(t, 1.5, 4242);

  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("format") == "stabletrees-tree");
  CHECK(j.at("version") == 1);
  CHECK(j.at("alpha").get<double>() == doctest::Approx(1.5));
  CHECK(j.at("weights_tracked") == true);
  CHECK(j.at("vertices").size() == t.vertex_count());
  CHECK(j.at("vertices")[0].at("parent").is_null());

  double alpha = 0.0;
  std::uint64_t seed = 0;
  const RTree u = tree_from_json(text, &alpha, &seed);
  CHECK(alpha == 1.5);
  CHECK(seed == 4242);
  CHECK(u.leaf_count() == t.leaf_count());
  CHECK(u.labelled_shape() == t.labelled_shape());
  CHECK(u.weight_sum() == doctest::Approx(t.weight_sum()).epsilon(1e-12));
  check_matrices_close(t, u, 1e-12);

  // numbers survive bit for bit, so a second trip is byte-identical
  CHECK(tree_to_json(u, alpha, seed) == text);
}

TEST_CASE("newick round trip") {
  const RTree t = grown_tree(11, false);
  const std::string nwk = tree_to_newick(t);
  CHECK(nwk.back() == ';');
  const RTree u = tree_from_newick(nwk);
  CHECK(u.leaf_count() == t.leaf_count());
  CHECK(u.labelled_shape() == t.labelled_shape());
  check_matrices_close(t, u, 1e-12);
}

TEST_CASE("single-edge newick degenerates gracefully") {
  const RTree t(1.75);
  const std::string nwk = tree_to_newick(t);
  CHECK(nwk == "(root:1.75)L1;");
  const RTree u = tree_from_newick(nwk);
  CHECK(u.leaf_count() == 1);
  CHECK(u.total_length() == 1.75);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS(tree_from_json("{}"), std::exception);
  CHECK_THROWS_AS(tree_from_json("{\"format\":\"other\",\"version\":1}"),
                  std::exception);
  CHECK_THROWS_AS(tree_from_json("not json at all"), std::exception);

  CHECK_THROWS_AS(tree_from_newick(""), std::exception);
  CHECK_THROWS_AS(tree_from_newick("(L1:1,L2:1"), std::exception);           // unbalanced
  CHECK_THROWS_AS(tree_from_newick("(L1:1,root:1);extra"), std::exception);  // trailing
  CHECK_THROWS_AS(tree_from_newick("(L1:-1,L2:1,root:1);"), std::exception); // negative
  CHECK_THROWS_AS(tree_from_newick("(L1:1,L1:1,root:1);"), std::exception);  // dup label
  CHECK_THROWS_AS(tree_from_newick("(L1:1,L3:1,root:1);"), std::exception);  // gap
}

TEST_CASE("distance matrix csv") {
  // root - v (1) - {L1 (0.5), L2 (0.25)}
  const RTree t = RTree::from_parts({0, 0, 1, 1}, {0.0, 1.0, 0.5, 0.25},
                                    {2, 3}, nullptr);
  const std::string csv = distance_matrix_csv(t);
  CHECK(csv ==
        "node,root,L1,L2\n"
        "root,0,1.5,1.25\n"
        "L1,1.5,0,0.75\n"
        "L2,1.25,0.75,0\n");
}

TEST_CASE("chain csv") {
  CHECK(chain_csv({{1, 0.5}, {2, 1.25}}) == "p,m\n1,0.5\n2,1.25\n");
  CHECK(chain_csv({}) == "p,m\n");
}

TEST_CASE("atomic write") {
  const fs::path dir = fs::temp_directory_path() / "stabletrees_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path target = dir / "out.txt";

  atomic_write(target.string(), "hello\n");
  CHECK(read_file(target.string()) == "hello\n");
  atomic_write(target.string(), "replaced\n");
  CHECK(read_file(target.string()) == "replaced\n");

  // no temp files left behind
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path().filename() == "out.txt");
  }
  CHECK(entries == 1);

  CHECK_THROWS_AS(atomic_write((dir / "missing" / "x.txt").string(), "x"),
                  std::exception);
  CHECK_THROWS_AS(read_file((dir / "nope.txt").string()), std::exception);
  fs::remove_all(dir);
}

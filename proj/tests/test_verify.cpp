#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabletrees/shape_law.hpp"
#include "stabletrees/verify.hpp"

using namespace stabletrees;

namespace {

VerifyOptions small_options() {
  VerifyOptions opt;
  opt.alphas = {1.5};
  opt.n_samples = 20000;
  opt.n_trunc = 512;
  opt.seed = 7;
  return opt;
}

std::string to_jsonl(const std::vector<TestReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += r.to_json() + "\n";
  return out;
}

}  // namespace

TEST_CASE("exact shape check") {
  const TestReport r = check_shape_formula(1.5, 4);
  CHECK(r.pass);
  CHECK(r.kind == "exact");
  CHECK_FALSE(r.inconclusive);
  CHECK(check_shape_formula(1.2, 5).pass);
  CHECK(check_shape_formula(2.0, 5).pass);
}

TEST_CASE("suite names and dispatch") {
  const auto names = suite_names();
  CHECK(names == std::vector<std::string>{"shapes", "lengths", "mixture",
                                          "dirichlet", "brownian", "all"});
  CHECK_THROWS_AS(run_suite("nope", small_options()), std::invalid_argument);
}

TEST_CASE("shapes suite passes at reduced size") {
  const auto reports = run_suite("shapes", small_options());
  CHECK(reports.size() == 10);  // four exact tables + two algorithms x three p
  CHECK(all_passed(reports));
  std::set<std::string> names;
  for (const auto& r : reports) {
    CHECK(!r.name.empty());
    names.insert(r.name);
    CHECK(nlohmann::json::parse(r.to_json()).contains("verdict"));
  }
  CHECK(names.size() == reports.size());
}

TEST_CASE("reports are byte-stable for a fixed seed") {
  const auto a = run_suite("shapes", small_options());
  const auto b = run_suite("shapes", small_options());
  CHECK(to_jsonl(a) == to_jsonl(b));
}

TEST_CASE("dirichlet suite passes at reduced size") {
  const auto reports = run_suite("dirichlet", small_options());
  CHECK(reports.size() >= 20);
  CHECK(all_passed(reports));
}

TEST_CASE("brownian suite passes at reduced size") {
  VerifyOptions opt = small_options();
  opt.alphas = {2.0};
  const auto reports = run_suite("brownian", opt);
  CHECK(reports.size() == 6);  // five increments + one correlation bound
  CHECK(all_passed(reports));
}

TEST_CASE("moment checks at a short matched truncation") {
  const auto reports = check_ml_moments(1.5, 2, 2, small_options());
  CHECK(reports.size() == 4);
  CHECK(all_passed(reports));
  for (const auto& r : reports) CHECK(r.kind == "moment");
}

TEST_CASE("rare shapes come back inconclusive") {
  VerifyOptions opt = small_options();
  opt.n_samples = 2000;
  opt.shape_floor = 0.5;
  const ShapeTable law = enumerate_shape_law(1.5, 3);
  bool saw_inconclusive = false;
  for (const auto& [sig, prob] : law) {
    const auto reports = check_lengths_given_shape(1.5, 3, sig, opt);
    CHECK(!reports.empty());
    for (const auto& r : reports) {
      if (prob < opt.shape_floor) {
        CHECK(r.inconclusive);
        saw_inconclusive = true;
      } else {
        CHECK(r.pass);
      }
    }
  }
  CHECK(saw_inconclusive);
  // inconclusive results never fail a run
  const auto starved = check_lengths_given_shape(
      1.5, 3, enumerate_shape_law(1.5, 3).begin()->first, opt);
  CHECK(all_passed(starved));
}

TEST_CASE("mixture check at reduced size") {
  const auto reports = run_suite("mixture", small_options());
  CHECK(reports.size() == 1);
  CHECK(all_passed(reports));
}

TEST_CASE("calibration of the decision harness") {
  const TestReport r = check_calibration(small_options());
  CHECK(r.pass);
  CHECK(r.kind == "moment");
}

TEST_CASE("all_passed semantics") {
  CHECK(all_passed({}));
  TestReport fail;
  fail.pass = false;
  CHECK_FALSE(all_passed({fail}));
  TestReport inconclusive;
  inconclusive.pass = false;
  inconclusive.inconclusive = true;
  CHECK(all_passed({inconclusive}));
  TestReport ok;
  ok.pass = true;
  CHECK(all_passed({ok, inconclusive}));
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mkvnet/experiment.hpp"

using namespace mkvnet;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mkvnet_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("defaults and overrides") {
    const auto c = parse("# comment only\n\nproblem = relu\nd = 1, 3 ,5\nepsilon = 0.4\n"
                         "delta = 0.25  # trailing\nT = 2\nlevels = 1,2\n");
    CHECK(c.problem == "relu");
    CHECK(c.dims == std::vector<std::size_t>{1, 3, 5});
    CHECK(c.epsilons == std::vector<double>{0.4});
    CHECK(c.delta == 0.25);
    CHECK(c.horizon == 2.0);
    CHECK(c.levels == std::vector<unsigned>{1, 2});
    CHECK(c.samples == std::vector<std::uint64_t>{1, 4});
    CHECK(parse("").problem == "linear");
  }

  TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(parse("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("d\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("delta = half\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("delta = 1.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("epsilon = 0.5, 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("problem = cubic\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("seed_count = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("samples = 1, 0\n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse("d =\n"), "config: d list is empty", std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/mkvnet.conf"), std::runtime_error);
  }

  TEST_CASE("suite names") {
    CHECK(parse_suite("equivalence") == Suite::equivalence);
    CHECK(parse_suite("bounds") == Suite::bounds);
    CHECK(parse_suite("convergence") == Suite::convergence);
    CHECK(parse_suite("scaling") == Suite::scaling);
    CHECK(parse_suite("all") == Suite::all);
    CHECK_FALSE(parse_suite("Everything").has_value());
  }

  TEST_CASE("problems by name") {
    ExperimentConfig c;
    CHECK(make_problem(c, 2, 1.0).d == 2);
    c.problem = "constant";
    CHECK(make_problem(c, 1, 1.0).f(std::vector<double>{3.0}) == 1.0);
    c.problem = "relu";
    CHECK(make_problem(c, 3, 0.5).T == 0.5);
  }

  TEST_CASE("equivalence suite writes csv and networks") {
    auto c = parse("d = 1, 2\nlevels = 0, 1, 2\nsamples = 1, 2\nseed_count = 2\nprobes = 4\n");
    const auto dir = scratch("equiv");
    std::ostringstream log;
    CHECK(run_suite(c, Suite::equivalence, 1, dir, log) == 0);
    const std::string csv = slurp(dir / "equivalence.csv");
    CHECK(csv.rfind("kind,problem,d,n,m,K,seed,max_rel_error", 0) == 0);
    CHECK(csv.find(",0\n") == std::string::npos);
    CHECK(fs::exists(dir / "networks" / "mlp_linear_d1_n2_K1.txt"));
    CHECK(log.str().find("FAIL") == std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("reruns are byte-identical") {
    auto c = parse("d = 1\nlevels = 1, 2\nsamples = 2\nseed_count = 1\nprobes = 3\n"
                   "epsilon = 0.5\nscaling_d = 1\nseed_count = 1\n");
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    std::ostringstream la, lb;
    const int ra = run_suite(c, Suite::equivalence, 3, a, la);
    const int rb = run_suite(c, Suite::equivalence, 3, b, lb);
    CHECK(ra == rb);
    CHECK(la.str() == lb.str());
    CHECK(slurp(a / "equivalence.csv") == slurp(b / "equivalence.csv"));
    run_suite(c, Suite::scaling, 3, a, la);
    run_suite(c, Suite::scaling, 3, b, lb);
    CHECK(slurp(a / "scaling.csv") == slurp(b / "scaling.csv"));
    CHECK(slurp(a / "networks" / "mc_linear_d1_n2_K2.txt") ==
          slurp(b / "networks" / "mc_linear_d1_n2_K2.txt"));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "labelprop/io.hpp"
#include "support/oracles.hpp"

using namespace labelprop;
using testsupport::scratch_file;
using testsupport::scratch_path;

TEST_CASE("membership writes tab-separated ascending rows and round-trips") {
  const std::vector<VertexId> labels{3, 0, 0, 2};
  const auto path = scratch_path("membership_rt.tsv");
  write_membership(path, labels);
  CHECK_EQ(read_membership(path, 4), labels);

  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK_EQ(first, "0\t3");
}

TEST_CASE("membership accepts comments, blanks and loose whitespace") {
  const auto path = scratch_file("membership_loose.tsv",
                                 "# comment\n"
                                 "\n"
                                 "  1   2\n"
                                 "0\t1\n"
                                 "% more\n"
                                 "2 0  \n");
  CHECK_EQ(read_membership(path, 3), std::vector<VertexId>{1, 2, 0});
}

TEST_CASE("membership validation failures name the offending line or vertex") {
  auto expect = [](const std::string& name, const std::string& content, std::uint32_t n,
                   const std::string& needle) {
    const auto path = scratch_file(name, content);
    try {
      (void)read_membership(path, n);
      FAIL_CHECK("expected a failure for " << name);
    } catch (const std::runtime_error& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  expect("mem_trail.tsv", "0 1 junk\n1 0\n", 2, ":1:");
  expect("mem_alpha.tsv", "zero 1\n", 2, ":1:");
  expect("mem_range_v.tsv", "5 0\n", 2, "out of range");
  expect("mem_range_l.tsv", "0 9\n1 0\n", 2, "out of range");
  expect("mem_dup.tsv", "0 1\n0 0\n1 0\n", 2, "assigned twice");
  expect("mem_missing.tsv", "0 1\n", 2, "no label for vertex 1");
  CHECK_THROWS_AS(read_membership("/nonexistent/m.tsv", 2), ValidationError);
}

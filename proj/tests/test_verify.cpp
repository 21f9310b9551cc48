#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "coarsetk/verify.hpp"

using namespace coarsetk;

TEST_CASE("unknown suites are rejected") {
  Budget big;
  CHECK_THROWS_WITH_AS(run_suite("nope", 1, big), doctest::Contains("unknown suite"),
                       validation_error);
}

TEST_CASE("the examples suite passes and renders a stable report") {
  Budget big;
  SuiteReport rep = run_suite("examples", 7, big);
  CHECK(rep.suite == "examples");
  CHECK(rep.seed == 7);
  CHECK(rep.all_pass());
  CHECK(static_cast<size_t>(rep.passed()) == rep.checks.size());
  CHECK_FALSE(rep.checks.empty());

  std::string text = render_report(rep);
  CHECK(text.rfind("suite examples seed 7\n", 0) == 0);
  CHECK(text.find("PASS ") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  // one line per check plus header and summary
  size_t lines = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == rep.checks.size() + 2);
  // rendering is a pure function of the report
  CHECK(render_report(rep) == text);
}

#include "qsturm/errors.hpp"
#include "qsturm/problem.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace qsturm;

TEST_SUITE("problem") {
  TEST_CASE("chafee-infante file") {
    const ProblemFile p = parse_problem("a = \"1\"\nf = \"lambda*u*(1-u^2)\"\nlambda = 2\n");
    CHECK(p.parameters.at("lambda") == 2.0);
    CHECK(to_string(p.spec.a) == "1");
    CHECK(eval(p.spec.f, 0, 0.5, 0) == doctest::Approx(0.75));
    CHECK_FALSE(p.spec.window.has_value());
    CHECK(p.verify.grid == 101);
  }

  TEST_CASE("comments, quotes and settings") {
    const ProblemFile p = parse_problem(
        "# header\n"
        "\n"
        "f = 'k*sin(x)*u - u^3'   # trailing comment\n"
        "k = 1.5e0\n"
        "a = \"1 + 0.5*u^2\"  # quoted value, then a comment\n"
        "b_min = -3\n"
        "b_max = 3\n"
        "scan_points = 1024\n"
        "rtol = 1e-9\n"
        "sim_grid = 151\n"
        "t_end = 50\n");
    CHECK(p.parameters.size() == 1);
    CHECK(eval(p.spec.a, 0, 2.0, 0) == 3.0);
    REQUIRE(p.spec.window.has_value());
    CHECK(p.spec.window->b_min == -3.0);
    CHECK(p.spec.scan_points == 1024);
    CHECK(p.spec.rtol == 1e-9);
    CHECK(p.verify.grid == 151);
    CHECK(p.verify.t_end == 50.0);
    CHECK(describe(p).find("k = 1.5") != std::string::npos);
  }

  TEST_CASE("validation errors") {
    CHECK_THROWS_AS((void)parse_problem("a = -1\nf = -u\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_problem("a = 1\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\nb_min = -1\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\nsim_grid = 50\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\nrtol = 0\n"), ValidationError);
  }

  TEST_CASE("syntax errors name the line") {
    try {
      (void)parse_problem("# c\nf = q*(1-u\nq = 1\n", "demo.txt");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(std::string(e.what()).find("demo.txt:2:") == 0);
      CHECK(e.position() == 6);
    }
    CHECK_THROWS_AS((void)parse_problem("f = -u\nf = u\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f -u\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f = \"-u\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\nk = two\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\npi = 3\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f = -u*w\n"), SyntaxError);
    CHECK_THROWS_AS((void)parse_problem("f = -u\nscan_points = 1.5\n"), SyntaxError);
  }

  TEST_CASE("files") {
    const auto path = std::filesystem::temp_directory_path() / "qsturm_problem_test.txt";
    {
      std::ofstream out(path);
      out << "f = lambda*u*(1-u^2)\nlambda = 0.5\n";
    }
    const ProblemSpec spec = load_problem(path);
    CHECK(eval(spec.f, 0, 0.5, 0) == doctest::Approx(0.1875));
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)load_problem(path), IoError);
  }
}

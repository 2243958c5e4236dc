#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace testing;
using pkam::TorusEmbedding;

namespace {

const char* kMinimal = R"(
[frequency]
omega = [0.6180339887498949, 0.41421356237309515]
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

}  // namespace

TEST_CASE("torus round trip is bit-exact") {
  const TorusEmbedding K = random_torus({5, 7}, 12, 0.05);
  const std::string text = pkam::torus_to_json(K);
  std::vector<std::string> warnings;
  const TorusEmbedding back = pkam::torus_from_json(text, &warnings);
  CHECK(warnings.empty());
  CHECK(back.radius() == K.radius());
  for (int c = 0; c < K.periodic().components(); ++c) {
    for (std::size_t i = 0; i < K.periodic().mode_count(); ++i) {
      CHECK(back.periodic().coeff(c, i) == K.periodic().coeff(c, i));
    }
  }
  CHECK(max_abs(back.winding() - K.winding()) == 0.0);
  CHECK(pkam::torus_to_json(back) == text);
}

TEST_CASE("only the nonnegative half of the modes is stored") {
  const TorusEmbedding K = random_torus({3, 3}, 1, 0.05);
  const auto doc = nlohmann::json::parse(pkam::torus_to_json(K));
  CHECK(doc["coeffs"].size() == (7 * 7 + 1) / 2);
  for (const auto& e : doc["coeffs"]) {
    const int a = e["k"][0], b = e["k"][1];
    CHECK((a > 0 || (a == 0 && b >= 0)));
  }
}

TEST_CASE("torus schema errors") {
  auto doc = nlohmann::json::parse(pkam::torus_to_json(random_torus({2, 2}, 4, 0.05)));
  SUBCASE("missing rho warns and defaults") {
    doc.erase("rho");
    std::vector<std::string> warnings;
    const auto K = pkam::torus_from_json(doc.dump(), &warnings);
    CHECK(warnings.size() == 1);
    CHECK(K.rho() == 0.0);
  }
  SUBCASE("Hermitian violation") {
    nlohmann::json extra;
    extra["k"] = {-1, 0};
    extra["re"] = {9.0, 0.0, 0.0};
    extra["im"] = {0.0, 0.0, 0.0};
    doc["coeffs"].push_back(extra);
    CHECK_THROWS_AS(pkam::torus_from_json(doc.dump()), pkam::SchemaError);
  }
  SUBCASE("complex average") {
    for (auto& e : doc["coeffs"]) {
      if (e["k"] == nlohmann::json{0, 0}) e["im"][1] = 0.5;
    }
    CHECK_THROWS_AS(pkam::torus_from_json(doc.dump()), pkam::SchemaError);
  }
  SUBCASE("mode outside the box") {
    doc["coeffs"][1]["k"] = {9, 0};
    CHECK_THROWS_AS(pkam::torus_from_json(doc.dump()), pkam::SchemaError);
  }
  SUBCASE("wrong truncation length") {
    doc["truncation"] = {2, 2, 2};
    CHECK_THROWS_AS(pkam::torus_from_json(doc.dump()), pkam::DimensionMismatch);
  }
  SUBCASE("not json") { CHECK_THROWS_AS(pkam::torus_from_json("{"), pkam::SchemaError); }
}

TEST_CASE("run config defaults") {
  const auto c = pkam::parse_run_config(kMinimal);
  CHECK(c.d == 1);
  CHECK(c.n == 1);
  CHECK(c.sigma == 2.0);
  CHECK(c.truncation == std::vector<int>{32, 32});
  CHECK(c.family.drift == c.omega(1));
  CHECK(c.y0(0) == c.omega(0));
  CHECK(c.solve.parameter_mask == std::vector<bool>{true, true, true});
  CHECK_FALSE(c.frequency.rejected);
  CHECK(c.scan_radius == 64);
}

TEST_CASE("echoed config parses to the same values") {
  const auto c = pkam::parse_run_config(with(R"(
[family]
strength = 0.45
[solve]
max_iterations = 9
parameter_mask = [true, false, true]
coefficient_floor = 0.0
)"));
  const std::string echo = pkam::echo_config(c);
  const auto d = pkam::parse_run_config(echo);
  CHECK(pkam::echo_config(d) == echo);
  CHECK(d.family.strength == 0.45);
  CHECK(d.solve.max_iterations == 9);
  CHECK(d.solve.parameter_mask == std::vector<bool>{true, false, true});
  CHECK(d.solve.coefficient_floor == 0.0);
}

TEST_CASE("run config errors") {
  SUBCASE("sigma below d+n") {
    try {
      (void)pkam::parse_run_config(with("sigma = 1.5\n"));
      FAIL("expected ConfigError");
    } catch (const pkam::ConfigError& e) {
      CHECK(std::string(e.what()).find("sigma") != std::string::npos);
    }
  }
  SUBCASE("rational frequency") {
    CHECK_THROWS_WITH_AS(pkam::parse_run_config("[frequency]\nomega = [0.5, 0.41421356237309515]\n"),
                         doctest::Contains("frequency rejected"), pkam::ConfigError);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_WITH_AS(pkam::parse_run_config(with("[solve]\nmax_iters = 3\n")),
                         doctest::Contains("solve.max_iters"), pkam::ConfigError);
  }
  SUBCASE("unknown family") {
    CHECK_THROWS_AS(pkam::parse_run_config(with("[family]\nname = \"henon\"\n")), pkam::ConfigError);
  }
  SUBCASE("wrong type") {
    CHECK_THROWS_AS(pkam::parse_run_config(with("[torus]\ntruncation = 8\n")), pkam::ConfigError);
  }
  SUBCASE("bad TOML") {
    CHECK_THROWS_AS(pkam::parse_run_config("[frequency\n"), pkam::ConfigError);
  }
}

TEST_CASE("families") {
  CHECK(pkam::builtin_families() == std::vector<std::string>{"coupled_standard"});
  pkam::FamilySpec spec;
  spec.strength = 0.4;
  spec.coupling = 0.1;
  spec.drift = 0.2;
  const auto a = pkam::make_family(spec);
  spec.name = "coupled_standard_fd";
  const auto b = pkam::make_family(spec);
  const Vec u = vec({0.3, 0.2, 0.7});
  CHECK(max_abs(a.map(u, Vec::Zero(3)) - b.map(u, Vec::Zero(3))) == 0.0);
  CHECK(max_abs(a.jacobian(u, Vec::Zero(3)) - b.jacobian(u, Vec::Zero(3))) <= 1e-6);
}

TEST_CASE("CSV log") {
  pkam::StepReport r;
  r.iteration = 2;
  r.err_before = 1.25e-4;
  r.err_after = 3.0e-8;
  r.accepted = true;
  r.radius = {16, 16};
  r.wall_seconds = 0.5;
  std::ostringstream a, b;
  pkam::write_csv_log(a, "run header\nsecond line", {r, r});
  pkam::write_csv_log(b, "run header\nsecond line", {r, r});
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "# run header");
  CHECK(lines[1] == "# second line");
  CHECK(lines[2] == pkam::csv_columns());
  CHECK(lines[3] == pkam::csv_row(r));
  const auto cols = std::count(lines[2].begin(), lines[2].end(), ',');
  CHECK(std::count(lines[3].begin(), lines[3].end(), ',') == cols);
  CHECK(lines[3].rfind("2,", 0) == 0);
}

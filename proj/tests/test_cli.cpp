#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using casdec::cli::run;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::stringstream h(line);
  for (std::string cell; std::getline(h, cell, ',');) c.header.push_back(cell);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) row.push_back(std::stod(cell));
    c.rows.push_back(row);
  }
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("figure 2 is even with its maximum at the centre") {
  const auto r = call({"figures", "--which", "2", "--samples", "401"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.header == std::vector<std::string>{"x", "V"});
  REQUIRE(csv.rows.size() == 401);
  const std::size_t mid = 200;
  CHECK(csv.rows[mid][0] == 0.0);
  CHECK(std::abs(csv.rows[mid][1]) < 1e-10);
  for (std::size_t i = 0; i < 401; ++i) {
    CHECK(csv.rows[i][0] == -csv.rows[400 - i][0]);
    CHECK(csv.rows[i][1] == csv.rows[400 - i][1]);
    CHECK(std::abs(csv.rows[i][0]) < 0.5);
    if (i != mid) CHECK(csv.rows[i][1] < csv.rows[mid][1]);
  }
  CHECK(csv.rows.front()[1] < -1.0);
}

TEST_CASE("figure 3 dips at the plate round trips") {
  const auto r = call({"figures", "--which", "3", "--dx", "0.1", "--t-max", "5", "--dt", "1e-3"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.header == std::vector<std::string>{"t", "D", "exponent", "divergent"});
  REQUIRE(csv.rows.size() == 5001);
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < csv.rows.size(); ++i) {
    if (csv.rows[i][1] < csv.rows[i - 1][1] && csv.rows[i][1] < csv.rows[i + 1][1]) minima.push_back(csv.rows[i][0]);
  }
  REQUIRE(minima.size() == 4);
  for (int m = 1; m <= 4; ++m) {
    CHECK(minima[m - 1] == doctest::Approx(m).epsilon(1e-9));
    CHECK(csv.rows[1000 * m][1] == 0.0);
    CHECK(csv.rows[1000 * m][3] == 1.0);
  }
  CHECK(r.out.find("nan") == std::string::npos);
}

TEST_CASE("adiabatic deckernel is a single row") {
  const auto r = call({"deckernel", "--mode", "adiabatic", "--dx", "0.1"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 1);
  CHECK(csv.rows[0][1] == doctest::Approx(std::exp(-M_PI / 137.035999 / 3.0 * 0.01)).epsilon(1e-14));
}

TEST_CASE("output is byte-identical across runs") {
  const std::vector<std::string> args{"n2", "--t-max", "3.3", "--dt", "0.01"};
  const auto a = call(args);
  const auto b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("1,inf,1") != std::string::npos);
}

TEST_CASE("CSV file with metadata sidecar") {
  const std::string path = temp("casdec_cli_test.csv");
  const auto r = call({"kernel", "--mode", "total", "--epsilon", "0.01", "--t-max", "1", "--dt", "0.1", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto csv = parse_csv(slurp(path));
  CHECK(csv.rows.size() == 11);
  const json meta = json::parse(slurp(path + ".meta.json"));
  CHECK(meta["tool"] == "casdec");
  CHECK(meta["version"] == CASDEC_VERSION);
  CHECK(meta["command"] == "kernel");
  CHECK(meta["mode"] == "total");
  CHECK(meta["parameters"]["epsilon"] == 0.01);
  CHECK(meta["rows"] == 11);
  CHECK(meta["arguments"].size() == 11);
  // the recorded arguments reproduce the file
  std::vector<std::string> again = meta["arguments"].get<std::vector<std::string>>();
  const std::string copy = temp("casdec_cli_test_copy.csv");
  again.back() = copy;
  REQUIRE(call(again).code == 0);
  CHECK(slurp(copy) == slurp(path));
  for (const auto& p : {path, path + ".meta.json", copy, copy + ".meta.json"}) std::remove(p.c_str());
}

TEST_CASE("JSON output") {
  const auto r = call({"n2", "--t-max", "1", "--dt", "0.5", "--format", "json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["columns"][1] == "N2");
  REQUIRE(doc["rows"].size() == 3);
  CHECK(doc["rows"][2][1] == "inf");
  CHECK(doc["meta"]["command"] == "n2");
}

TEST_CASE("config file with flag precedence") {
  const std::string cfg = temp("casdec_cli_test.ini");
  {
    std::ofstream f(cfg);
    f << "dx=0.2\nt-max=0.5\ndt=0.25\n";
  }
  const auto from_file = parse_csv(call({"deckernel", "--config", cfg}).out);
  REQUIRE(from_file.rows.size() == 3);
  const auto expected = parse_csv(call({"deckernel", "--dx", "0.2", "--t-max", "0.5", "--dt", "0.25"}).out);
  CHECK(from_file.rows == expected.rows);
  const auto overridden = parse_csv(call({"deckernel", "--config", cfg, "--dx", "0.4"}).out);
  const auto direct = parse_csv(call({"deckernel", "--dx", "0.4", "--t-max", "0.5", "--dt", "0.25"}).out);
  CHECK(overridden.rows == direct.rows);
  CHECK(overridden.rows[1][1] != from_file.rows[1][1]);
  std::remove(cfg.c_str());
}

TEST_CASE("usage errors exit 2 with one JSON line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"kernel", "--mode", "nonsense"},
           {"figures", "--which", "7"},
           {"potential", "--format", "xml"},
           {"deckernel", "--dx", "2"},
           {"n2", "--no-such-flag", "1"}}) {
    const auto r = call(args);
    CHECK(r.code == 2);
    REQUIRE_FALSE(r.err.empty());
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    const json e = json::parse(r.err);
    CHECK(e["exit_code"] == 2);
    CHECK(e.contains("error"));
    CHECK(e.contains("message"));
  }
}

TEST_CASE("computation errors exit 3") {
  // the trap is too weak to hold the electron at this mass
  const auto r = call({"evolve", "--omega", "0.01", "--mass", "1"});
  CHECK(r.code == 3);
  const json e = json::parse(r.err);
  CHECK(e["error"] == "instability");
  CHECK(e["exit_code"] == 3);
}

TEST_CASE("switched N2 through the CLI") {
  const auto r = call({"adiabatic", "--mode", "switched", "--profile", "half", "--T", "50", "--epsilon", "0.01"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 1);
  CHECK(csv.rows[0][1] == doctest::Approx(2.0 / M_PI * M_PI * M_PI / 6.0 / 137.035999).epsilon(1e-12));
}

TEST_CASE("image and potential commands") {
  const auto pos = parse_csv(call({"images", "--x", "0.2", "--n-max", "1"}).out);
  REQUIRE(pos.rows.size() == 4);
  const auto series = parse_csv(call({"potential", "--mode", "series", "--samples", "5", "--n-max", "1000000"}).out);
  const auto closed = parse_csv(call({"potential", "--samples", "5"}).out);
  REQUIRE(series.rows.size() == closed.rows.size());
  for (std::size_t i = 0; i < series.rows.size(); ++i) {
    CHECK(series.rows[i][1] == doctest::Approx(closed.rows[i][1]).epsilon(1e-6));
  }
}

TEST_CASE("version flag") {
  const auto r = call({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out == std::string(CASDEC_VERSION) + "\n");
}

}

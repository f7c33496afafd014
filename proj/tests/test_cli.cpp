#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mbdos/cli.hpp"

using namespace mbdos;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mbdos");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) {
  const char* dir = std::getenv("TMPDIR");
  return std::string(dir ? dir : "/tmp") + "/mbdos_test_" + name;
}

}  // namespace

TEST_CASE("dos of two fermions reads 0.75 at E = 2") {
  const Run r = run({"dos", "--n", "2", "--d", "2", "--stat", "fermion", "--gamma", "0", "--emin",
                     "0", "--emax", "6", "--points", "601"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 602);
  CHECK(rows[0] == std::vector<std::string>{"energy", "density"});
  bool found = false;
  for (const auto& row : rows)
    if (row[0] == "2") {
      found = true;
      CHECK(row[1] == "0.75");
    }
  CHECK(found);
}

TEST_CASE("gs-energy for twelve particles") {
  const Run r = run({"gs-energy", "--n", "12", "--d", "2", "--gamma", "0"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  const auto& h = rows[0];
  const auto col = std::find(h.begin(), h.end(), "gs_energy") - h.begin();
  CHECK(rows[1][col] == "72");
}

TEST_CASE("coeffs row l = N is one") {
  const Run r = run({"coeffs", "--n", "5", "--d", "2"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  const auto& h = rows[0];
  const auto l = std::find(h.begin(), h.end(), "l") - h.begin();
  const auto lv = std::find(h.begin(), h.end(), "l_volume") - h.begin();
  const auto val = std::find(h.begin(), h.end(), "enumeration") - h.begin();
  const auto rat = std::find(h.begin(), h.end(), "rational") - h.begin();
  int hits = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][l] == "5" && rows[i][lv] == "5") {
      ++hits;
      CHECK(rows[i][val] == "1");
      CHECK(rows[i][rat] == "1");
    }
  CHECK(hits == 1);
}

TEST_CASE("identical configs give byte-identical output") {
  const std::vector<std::string> args{"counting", "--n", "7", "--gamma", "-0.5", "--points", "50",
                                      "--digits", "30"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> spec{"exact-spectrum", "--n", "3", "--model", "rectangle:1,1.3",
                                      "--emax", "200"};
  CHECK(run(spec).out == run(spec).out);
}

TEST_CASE("replay reproduces CSV and JSON artifacts") {
  for (const char* fmt : {"csv", "json"}) {
    const std::string a = tmp_path(std::string("a.") + fmt);
    const std::string b = tmp_path(std::string("b.") + fmt);
    REQUIRE(run({"dos", "--n", "6", "--d", "3", "--gamma", "0.3", "--points", "17", "--format", fmt,
                 "--precision", "160", "--out", a})
                .code == 0);
    REQUIRE(run({"--replay", a, "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
  const std::string c = tmp_path("c.csv");
  REQUIRE(run({"fig", "fig9", "--n", "10", "--points", "5", "--out", c}).code == 0);
  CHECK(run({"--replay", c}).out == slurp(c));
}

TEST_CASE("embedded config round-trips") {
  cli::RunConfig c;
  c.command = "bethe";
  c.n = 17;
  c.omit = {1, 3};
  c.geometry = "disk:2";
  const auto back = cli::from_json(cli::to_json(c));
  CHECK(cli::to_json(back) == cli::to_json(c));
  CHECK_FALSE(cli::to_json(c).contains("out"));
}

TEST_CASE("usage errors") {
  CHECK(run({"dos", "--n", "0"}).code == cli::kUsage);
  CHECK(run({"dos", "--bogus"}).code == cli::kUsage);
  CHECK(run({"nonsense"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"dos", "--emin", "3", "--emax", "1"}).code == cli::kUsage);
  CHECK(run({"fig", "fig8"}).code == cli::kUsage);
  CHECK(run({"dos", "--geometry", "disk:1", "--d", "3"}).code == cli::kUsage);
  CHECK(run({"--replay", tmp_path("does_not_exist")}).code == cli::kUsage);
  CHECK(run({"compare", "--model", "equidistant:1"}).code == cli::kUsage);
  CHECK_FALSE(run({"dos", "--n", "0"}).err.empty());
}

TEST_CASE("spectrum commands cut the levels at emax") {
  CHECK(run({"exact-spectrum", "--n", "3", "--emax", "10"}).code == 0);
}

TEST_CASE("geometry sets gamma") {
  const Run a = run({"gs-energy", "--n", "12", "--geometry", "disk:1"});
  const Run b = run({"gs-energy", "--n", "12", "--gamma", "-0.886226925452758"});
  REQUIRE(a.code == 0);
  const auto ra = csv_rows(a.out), rb = csv_rows(b.out);
  const auto col = std::find(ra[0].begin(), ra[0].end(), "gs_energy") - ra[0].begin();
  CHECK(std::stod(ra[1][col]) == doctest::Approx(std::stod(rb[1][col])).epsilon(1e-12));
}

TEST_CASE("physical units rescale energies") {
  const Run nat = run({"dos", "--n", "2", "--emax", "6", "--points", "4"});
  const Run phys = run({"dos", "--n", "2", "--emax", "6", "--points", "4", "--units", "physical",
                        "--volume", "12.566370614359172"});
  REQUIRE(phys.code == 0);
  // rho0 = V / (2 pi) = 2: density doubles at half the energy.
  const auto b = csv_rows(phys.out);
  CHECK(csv_rows(nat.out)[2][0] == "2");
  const double e = std::stod(b[2][0]);
  CHECK(std::stod(b[2][1]) == doctest::Approx(2 * ((2 * e) / 2 - 0.25)).epsilon(1e-12));
}

TEST_CASE("verify suite passes") {
  const Run r = run({"verify"});
  CHECK(r.code == 0);
  for (const auto& row : csv_rows(r.out))
    if (row.size() == 5 && row[0] != "check") CHECK(row[4] == "1");
}

TEST_CASE("every subcommand produces output") {
  for (std::vector<std::string> args : std::vector<std::vector<std::string>>{
           {"bethe", "--n", "10", "--points", "3"},
           {"erdos-lehner", "--n", "10", "--points", "3"},
           {"convolve", "--n", "2", "--emax", "6"},
           {"compare", "--n", "3", "--model", "rectangle:1.2,0.8", "--emax", "30", "--points", "5"},
           {"counting", "--n", "4", "--order", "3", "--points", "5"},
           {"fig", "fig5", "--points", "5"},
           {"fig", "fig6", "--n", "8", "--points", "5"},
           {"fig", "fig7", "--n", "4", "--points", "5", "--emax", "30"}}) {
    const Run r = run(args);
    CAPTURE(args[0]);
    CHECK(r.code == 0);
    CHECK(csv_rows(r.out).size() >= 2);
  }
}

TEST_CASE("installed binary") {
  const char* bin = std::getenv("MBDOS_BIN");
  if (!bin) return;
  const std::string out = tmp_path("bin.csv");
  const std::string cmd = std::string(bin) + " gs-energy --n 12 --out " + out;
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(out).find(",72,") != std::string::npos);
  CHECK(std::system((std::string(bin) + " dos --n 0 2>/dev/null").c_str()) != 0);
}

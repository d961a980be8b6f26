#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "corpus.hpp"
#include "qunfold/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qunfold");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = qunfold::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("qunfold-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kFig = corpus::seed_path("fig1");

}  // namespace

TEST_CASE("run writes one JSON line per stage") {
  auto dir = scratch("run");
  auto r = invoke({"run", "--seed", kFig, "--stages", "3", "--out", (dir / "trace.jsonl").string()});
  REQUIRE(r.code == 0);
  auto text = slurp(dir / "trace.jsonl");
  CHECK(count_lines(text) == 4);
  std::istringstream lines(text);
  std::string line;
  std::vector<std::size_t> ns;
  while (std::getline(lines, line)) ns.push_back(qunfold::io::parse_json(line, "trace")["n"].get<std::size_t>());
  CHECK(ns == std::vector<std::size_t>{1, 4, 7, 8});
  auto again = invoke({"run", "--seed", kFig, "--stages", "3"});
  CHECK(again.out == text);
}

TEST_CASE("unfold writes an eight-node DOT with self-loops") {
  auto dir = scratch("unfold");
  auto r = invoke({"unfold", "--seed", kFig, "--alpha", "3", "--dot", (dir / "tree.dot").string()});
  REQUIRE(r.code == 0);
  auto dot = slurp(dir / "tree.dot");
  std::size_t labels = 0, pos = 0;
  while ((pos = dot.find("[label=", pos)) != std::string::npos) ++labels, ++pos;
  CHECK(labels == 8);
  CHECK(dot.find("\"*\" -> \"*\";") != std::string::npos);
  CHECK(r.out.find("\"z_u\":8") != std::string::npos);
}

TEST_CASE("ds reproduces the worked two-world table") {
  auto dir = scratch("ds");
  put(dir / "m.json",
      R"({"worlds":["w1","w2"],"access":[["w1","w1"],["w1","w2"],["w2","w2"]],)"
      R"("valuation":{"w1":["x1"],"w2":["x2"]},"weights":{"w1":0.6,"w2":0.4}})");
  auto r = invoke({"ds", "--model", (dir / "m.json").string(), "--frame", "x1,x2", "--report",
                   (dir / "bel.csv").string()});
  REQUIRE(r.code == 0);
  auto csv = slurp(dir / "bel.csv");
  CHECK(csv.find("\"{x1}\",0.0,0.0,0.59999999999999998,0.0,0.0,0.59999999999999998") != std::string::npos);
  CHECK(csv.find("\"{x2}\",0.40000000000000002,0.40000000000000002,1.0") != std::string::npos);
  CHECK(csv.find("\"{x1 x2}\",0.59999999999999998,1.0,1.0") != std::string::npos);

  put(dir / "b.json", R"({"frame":["x1","x2"],"masses":[{"set":["x2"],"mass":0.4},{"set":["x1","x2"],"mass":0.6}]})");
  auto b = invoke({"ds", "--bpa", (dir / "b.json").string()});
  REQUIRE(b.code == 0);
  CHECK(b.out.rfind("set,mass,bel,pl\n", 0) == 0);

  // weights fall back to uniform when absent
  put(dir / "u.json", R"({"worlds":["a","b"],"access":[["a","a"],["b","b"]],"valuation":{"a":["x"],"b":["y"]}})");
  auto u = invoke({"ds", "--model", (dir / "u.json").string(), "--frame", "x,y"});
  REQUIRE(u.code == 0);
  CHECK(u.out.find("\"{x}\",0.5,0.5,0.5") != std::string::npos);
}

TEST_CASE("stage writes every artifact") {
  auto dir = scratch("stage");
  auto r = invoke({"stage", "--seed", kFig, "--alpha", "2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"tree.dot", "tree.json", "sigma.dot", "spectrum.csv", "d2.csv", "codewords.txt", "omega.json",
                        "diagnostics.json", "prediction.json", "explanation.json", "config.txt"})
    CHECK(fs::exists(dir / f));
  auto first = slurp(dir / "diagnostics.json");
  auto again = invoke({"stage", "--seed", kFig, "--alpha", "2", "--out", dir.string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir / "diagnostics.json") == first);
}

TEST_CASE("bisim, lattice and spectrum subcommands") {
  auto r = invoke({"bisim", "--seed", kFig, "--alpha", "3"});
  REQUIRE(r.code == 0);
  CHECK(qunfold::io::parse_json(r.out, "report")["ok"] == true);

  auto dir = scratch("misc");
  put(dir / "g.json", R"({"worlds":["x"],"access":[["x","x"]],"valuation":{}})");
  put(dir / "h.json", R"({"worlds":["y"],"access":[["y","y"]],"valuation":{}})");
  auto m = invoke({"bisim", "--left", (dir / "g.json").string(), "--right", (dir / "h.json").string()});
  REQUIRE(m.code == 0);
  CHECK(m.out.find("\"x\"") != std::string::npos);

  put(dir / "p.json", R"({"carrier":["1","2","3"],"pairs":[["1","2"],["2","3"]]})");
  auto l = invoke({"lattice", "--proximity", (dir / "p.json").string()});
  REQUIRE(l.code == 0);
  CHECK(qunfold::io::parse_json(l.out, "lattice")["quantum_sets"].size() == 4);

  auto s = invoke({"spectrum", "--seed", corpus::seed_path("single_atom"), "--alpha", "1"});
  REQUIRE(s.code == 0);
  CHECK(s.out == "index,eigenvalue,degenerate\n1,1.0,0\n2,-1.0,0\n");
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"unfold", "--seed", kFig, "--alpha", "1", "--frobnicate"}).code == 2);
  CHECK(invoke({"unfold", "--alpha", "1"}).code == 2);
  CHECK(invoke({"unfold", "--seed", kFig, "--alpha", "1", "--depth-cap", "0"}).code == 2);
  CHECK(invoke({"unfold", "--seed", kFig, "--alpha", "1", "--pairing-rule", "nearest"}).code == 2);
  CHECK(invoke({"ds", "--frame", "x"}).code == 2);

  auto missing = invoke({"unfold", "--seed", "/nonexistent/seed.json", "--alpha", "1"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error: ", 0) == 0);

  auto dir = scratch("codes");
  put(dir / "bad.json", "{\"nodes\": [\"a\",]}");
  auto bad = invoke({"unfold", "--seed", (dir / "bad.json").string(), "--alpha", "1"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("byte") != std::string::npos);

  auto cap = invoke({"unfold", "--seed", corpus::seed_path("k3_loops"), "--alpha", "6", "--node-cap", "50"});
  CHECK(cap.code == 1);
}

TEST_CASE("help lists defaults") {
  auto r = invoke({"run", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--depth-cap") != std::string::npos);
  CHECK(r.out.find("12") != std::string::npos);
  CHECK(r.out.find("positional") != std::string::npos);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file values yield to flags") {
  auto dir = scratch("config");
  put(dir / "c.ini", "node_cap = 5\n");
  auto capped = invoke({"unfold", "--seed", kFig, "--alpha", "3", "--config", (dir / "c.ini").string()});
  CHECK(capped.code == 1);
  auto flagged =
      invoke({"unfold", "--seed", kFig, "--alpha", "3", "--config", (dir / "c.ini").string(), "--node-cap", "100"});
  CHECK(flagged.code == 0);
  put(dir / "bad.ini", "colour = blue\n");
  CHECK(invoke({"unfold", "--seed", kFig, "--alpha", "1", "--config", (dir / "bad.ini").string()}).code == 2);
  put(dir / "neg.ini", "eps_zero = -1\n");
  CHECK(invoke({"unfold", "--seed", kFig, "--alpha", "1", "--config", (dir / "neg.ini").string()}).code == 2);
}

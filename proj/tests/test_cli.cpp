#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracvar/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = fracvar::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("fracvar_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
  fs::path dir_;
  static inline int counter_ = 0;
};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

// every diagnostic line is a standalone JSON object
void check_diagnostics(const std::string& err) {
  for (const auto& l : lines(err)) {
    auto j = json::parse(l, nullptr, false);
    CHECK_FALSE(j.is_discarded());
    CHECK(j.contains("level"));
    CHECK(j.contains("message"));
  }
}

const char* kRlOne = R"({"interval": [0, 1], "grid_n": 512,
  "operator": {"kind": "K", "order": 0.5, "kernel": "rl-power"}, "f": 1})";

}  // namespace

TEST_CASE("op-eval writes the RL integral of one") {
  Scratch s;
  auto r = run({"op-eval", s.write("p.json", kRlOne)});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls.front() == "t,value");
  CHECK(ls.size() == 514);
  auto comma = ls.back().find(',');
  CHECK(ls.back().substr(0, comma) == "1");
  CHECK(std::stod(ls.back().substr(comma + 1)) == doctest::Approx(1.1283792).epsilon(1e-7));
}

TEST_CASE("output is byte-identical across runs and honours overrides") {
  Scratch s;
  auto in = s.write("p.json", kRlOne);
  auto a = run({"op-eval", in, "-o", s.path("a.csv")});
  auto b = run({"op-eval", in, "-o", s.path("b.csv")});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(s.path("a.csv")) == slurp(s.path("b.csv")));
  CHECK(slurp(s.path("a.csv")).size() > 1000);

  auto c = run({"op-eval", in, "--grid-n", "16", "--alpha", "0.3"});
  REQUIRE(c.code == 0);
  CHECK(lines(c.out).size() == 18);
  auto last = lines(c.out).back();
  CHECK(std::stod(last.substr(last.find(',') + 1)) == doctest::Approx(1 / std::tgamma(1.3)).epsilon(1e-10));
  auto d = run({"op-eval", in, "--set", "operator.p=0", "--set", "operator.q=1"});
  REQUIRE(d.code == 0);
  CHECK(lines(d.out)[1].rfind("0,", 0) == 0);
}

TEST_CASE("verify-ibp --check on the symmetric case") {
  Scratch s;
  auto in = s.write("p.json", R"({"interval": [0, 1], "grid_n": 128,
    "operator": {"kind": "K", "order": 0.5, "p": 1, "q": 1},
    "f": {"polynomial": [1, 2, -1]}, "g": {"polynomial": [1, 2, -1]}, "tolerance": 1e-12})");
  auto r = run({"verify-ibp", "--check", in});
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["defect"].get<double>() <= 1e-12);

}

TEST_CASE("falva-delta near t = 0") {
  Scratch s;
  auto in = s.write("d.json", R"({"kernel": {"family": "katugampola", "rho": 1e-9}, "alpha": 0.4, "b": 1})");
  auto r = run({"falva-delta", in});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls[0] == "t,delta");
  double delta = std::stod(ls[1].substr(ls[1].find(',') + 1));
  CHECK(delta == doctest::Approx(0.6).epsilon(1e-6));

  auto lim = s.write("l.json", R"({"kernel": "power-cosh", "alpha": 0.5, "b": 5, "limits": true})");
  auto rl = run({"falva-delta", "--check", lim});
  CHECK(rl.code == 0);
  CHECK(json::parse(rl.out)["passed"] == true);
  CHECK(run({"falva-delta", "--check", in}).code == 2);
}

TEST_CASE("schema strictness and usage errors") {
  Scratch s;
  auto extra = s.write("x.json", R"({"interval": [0, 1], "grid_n": 8, "operator": {"kind": "K", "order": 0.5},
    "f": 1, "colour": "blue"})");
  auto r = run({"op-eval", extra});
  CHECK(r.code == 2);
  check_diagnostics(r.err);
  CHECK(r.err.find("colour") != std::string::npos);

  auto nested = s.write("n.json", R"({"interval": [0, 1], "grid_n": 8,
    "operator": {"kind": "K", "order": 0.5, "kernel": {"family": "rl-power", "alpha": 0.5}}, "f": 1})");
  CHECK(run({"op-eval", nested}).code == 2);

  CHECK(run({"op-eval", s.path("missing.json")}).code == 2);
  CHECK(run({"frobnicate", extra}).code == 2);
  CHECK(run({}).code == 2);
  auto in = s.write("p.json", kRlOne);
  CHECK(run({"op-eval", in, "--xi", "0.3"}).code == 2);
  CHECK(run({"op-eval", in, "--set", "operator.colour=1"}).code == 2);
  CHECK(run({"op-eval", in, "--set", "operator.kind.x=1"}).code == 2);  // kind is a string
  CHECK(run({"op-eval", in, "--grid-n", "1"}).code == 2);
  CHECK(run({"op-eval", in, "--help"}).code == 0);
  CHECK(run({"op-eval", s.write("bad.json", "{not json")}).code == 2);
}

TEST_CASE("variational subcommands") {
  Scratch s;
  auto iso = s.write("iso.json", R"({"interval": [0, 1], "grid_n": 64,
    "outer": {"kernel": "identity"}, "lagrangian": "classical-kinetic",
    "bc": {"left": 0, "right": 0}, "constraint": {"g": "value", "xi": 0.1}})");
  auto solved = run({"solve", iso, "-o", s.path("y.csv")});
  REQUIRE(solved.code == 0);
  auto info = json::parse(lines(solved.err).back());
  CHECK(info["converged"] == true);
  CHECK(info["multiplier"].get<double>() == doctest::Approx(2.4).epsilon(1e-3));

  // feed the solution back as a CSV curve
  auto check = s.write("check.json", R"({"interval": [0, 1], "grid_n": 64,
    "outer": {"kernel": "identity"}, "lagrangian": "classical-kinetic",
    "bc": {"left": 0, "right": 0}, "constraint": {"g": "value", "xi": 0.1}, "y": {"csv": "y.csv"}})");
  auto r = run({"iso-residual", "--check", check, "--grid-out", s.path("res.csv")});
  CHECK(r.code == 0);
  auto rep = json::parse(r.out);
  CHECK(rep["lambda"].get<double>() == doctest::Approx(2.4).epsilon(1e-3));
  CHECK(rep["lambda_source"] == "estimated");
  CHECK(fs::exists(s.path("res.csv")));
  CHECK(run({"iso-residual", check, "--grid-n", "32"}).code == 2);  // CSV no longer on the grid

  auto free = s.write("free.json", R"({"interval": [0, 1], "grid_n": 32, "lagrangian": "classical-kinetic",
    "outer": {"kernel": "identity"}, "bc": {"left": "free", "right": 1}, "y": {"polynomial": [0, 1]}})");
  auto nbc = run({"nbc-residual", free});
  REQUIRE(nbc.code == 0);
  CHECK(json::parse(nbc.out)["nbc_residual"].get<double>() == doctest::Approx(2.0));
  CHECK(run({"nbc-residual", "--check", free}).code == 1);
  auto el = run({"el-residual", "--check", free});
  CHECK(el.code == 0);

  auto capped = run({"solve", iso, "--set", "solver.max_iters=2"});
  CHECK(capped.code == 1);
  check_diagnostics(capped.err);
  CHECK(lines(capped.out).size() == 66);  // best iterate still written
}

TEST_CASE("volterra, simulation and Mittag-Leffler subcommands") {
  Scratch s;
  auto vol = s.write("v.json", R"({"interval": [0, 1], "grid_n": 100, "kernel": "identity",
    "rhs": {"polynomial": [0, 0, 1]}})");
  auto rv = run({"volterra", vol});
  REQUIRE(rv.code == 0);
  auto last = lines(rv.out).back();
  CHECK(std::stod(last.substr(last.find(',') + 1)) == doctest::Approx(2.0).epsilon(1e-9));

  auto sim = s.write("s.json", R"({"model": "caldirola-kanai", "kernel": "exponential", "alpha": 0.5,
    "omega": 6.283185307179586, "gamma": 0.5, "b": 1, "grid_n": 50, "sweep": {"param": "gamma", "values": [0.5, 1.0]}})");
  auto rs = run({"falva-sim", sim});
  REQUIRE(rs.code == 0);
  auto ls = lines(rs.out);
  CHECK(ls[0] == "param,t,y,v,delta");
  CHECK(ls.size() == 1 + 2 * 51);
  CHECK(ls[1] == "0.5,0,1,0,-0.5");

  auto ml = s.write("m.json", R"({"alpha": 1, "beta": 1, "z": [0, 1]})");
  auto rm = run({"ml-eval", ml});
  REQUIRE(rm.code == 0);
  CHECK(lines(rm.out)[1] == "0,1");
  CHECK(std::stod(lines(rm.out)[2].substr(2)) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(run({"ml-eval", ml, "--set", "z=[40]"}).code == 1);
}

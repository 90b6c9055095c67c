#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "roughcadlag/cli.hpp"
#include "roughcadlag/io.hpp"

namespace fs = std::filesystem;
using roughcadlag::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("roughcadlag_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate writes identical bytes across runs") {
  const fs::path dir = scratch("simulate");
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  for (const std::string& out : {a, b}) {
    const Result r = call({"simulate", "--model", "brownian", "--d", "2", "--T", "1", "--steps",
                           "4096", "--seed", "7", "--out", out});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("t,x1,x2\n", 0) == 0);
  const std::string cmd = std::string(ROUGHCADLAG_CLI) +
                          " simulate --model brownian --d 2 --T 1 --steps 4096 --seed 7 --out " +
                          (dir / "c.csv").string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(dir / "c.csv") == slurp(a));
}

TEST_CASE("pipeline: pvar, lift, verify, rate, reparam, report") {
  const fs::path dir = scratch("pipeline");
  const std::string path = (dir / "bm.csv").string();
  const std::string spec = (dir / "bm.spec.json").string();
  const std::string lift = (dir / "bm.lift.json").string();
  const std::string rate = (dir / "bm.rate.json").string();
  REQUIRE(call({"simulate", "--model", "brownian", "--d", "2", "--steps", "4096", "--seed", "3",
                "--out", path, "--spec-out", spec})
              .code == 0);

  const Result pvar = call({"pvar", "--input", path, "--p", "2.5"});
  CHECK(pvar.code == 0);
  CHECK(nlohmann::json::parse(pvar.out)["value"].get<double>() > 0.0);

  CHECK(call({"lift", "--input", path, "--spec", spec, "--out", lift}).code == 0);
  const nlohmann::json lj = roughcadlag::load_json(lift);
  CHECK(lj["meta"]["source"]["model"] == "brownian");
  CHECK(lj["meta"]["source"]["seed"] == "3");
  CHECK(lj["meta"]["method"] == "ito");

  const Result verify = call({"verify", "--input", lift, "--checks", "chen,ibp"});
  CHECK(verify.code == 0);
  CHECK(verify.err.empty());
  CHECK(call({"verify", "--input", lift, "--checks", "chen,ibp,zero,stabilized"}).code == 0);

  CHECK(call({"rate", "--input", path, "--nmin", "3", "--nmax", "10", "--check-points", "10",
              "--out", rate})
            .code == 0);
  const nlohmann::json rj = roughcadlag::load_json(rate);
  CHECK(rj["levels"].size() == 8);
  CHECK(rj["reference_level"] == 12);

  const Result reparam = call({"reparam", "--input", path, "--p", "2.5"});
  CHECK(reparam.code == 0);
  CHECK(nlohmann::json::parse(reparam.out)["max_holder_ratio"].get<double>() <= 1.0 + 1e-6);

  const Result report = call({"report", "--lift", lift, "--rate", rate});
  CHECK(report.code == 0);
  std::istringstream lines(report.out);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(!std::getline(lines, extra));
  CHECK(header == "model,d,steps,seed,p,pvar_x,pvar_area,max_chen_defect,rate_slope,rate_r2");
  CHECK(row.rfind("brownian,2,4096,3,2.5,", 0) == 0);
  const double slope = std::stod(row.substr(row.rfind(',', row.rfind(',') - 1) + 1));
  CHECK(slope <= -0.5);
  CHECK(call({"report", "--lift", lift, "--rate", rate}).out == report.out);
}

TEST_CASE("report without inputs is a bare header") {
  const Result r = call({"report"});
  CHECK(r.code == 0);
  CHECK(r.out == "model,d,steps,seed,p,pvar_x,pvar_area,max_chen_defect,rate_slope,rate_r2\n");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  const Result unknown = call({"simulate", "--bogus", "1"});
  CHECK(unknown.code == 64);
  CHECK(unknown.err.rfind("error=usage", 0) == 0);
  CHECK(call({"frobnicate"}).code == 64);
  CHECK(call({}).code == 64);
  CHECK(call({"simulate", "--steps", "many"}).code == 64);

  const Result domain = call({"simulate", "--steps", "1"});
  CHECK(domain.code == 1);
  CHECK(domain.err.rfind("error=domain", 0) == 0);
  CHECK(std::count(domain.err.begin(), domain.err.end(), '\n') == 1);
  CHECK(call({"simulate", "--model", "fbm", "--steps", "5000"}).code == 1);
  CHECK(call({"pvar", "--input", (dir / "missing.csv").string()}).code == 1);

  const std::string path = (dir / "x.csv").string();
  REQUIRE(call({"simulate", "--steps", "256", "--out", path}).code == 0);
  CHECK(call({"pvar", "--input", path, "--p", "0.5"}).code == 1);
  const std::string strict = (dir / "strict.json").string();
  const Result conv = call({"lift", "--input", path, "--nmax", "2", "--strict", "--out", strict});
  CHECK(conv.code == 2);
  CHECK(conv.err.rfind("error=convergence", 0) == 0);

  const std::string lift = (dir / "x.lift.json").string();
  REQUIRE(call({"lift", "--input", path, "--out", lift}).code == 0);
  nlohmann::json j = roughcadlag::load_json(lift);
  j["I"][100][0][0] = j["I"][100][0][0].get<double>() + 0.5;
  const std::string broken = (dir / "broken.json").string();
  roughcadlag::save_json(broken, j);
  const Result fail = call({"verify", "--input", broken, "--checks", "chen,ibp"});
  CHECK(fail.code == 2);
  CHECK(fail.err.rfind("error=verification check=ibp", 0) == 0);

  j = roughcadlag::load_json(lift);
  j["meta"].erase("tol");
  const std::string schema = (dir / "schema.json").string();
  roughcadlag::save_json(schema, j);
  const Result bad = call({"verify", "--input", schema});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("field=meta.tol") != std::string::npos);
  const Result bad_report = call({"report", "--lift", schema, "--rate", lift});
  CHECK(bad_report.code == 1);
  CHECK(bad_report.err.find("field=meta.tol") != std::string::npos);
  const Result no_rate = call({"report", "--lift", lift, "--rate", lift});
  CHECK(no_rate.code == 1);
  CHECK(no_rate.err.find("field=slope") != std::string::npos);
  CHECK(call({"verify", "--input", lift, "--checks", "nonsense"}).code == 1);
}

TEST_CASE("other lift methods through the CLI") {
  const fs::path dir = scratch("methods");
  const std::string x = (dir / "x.csv").string();
  const std::string y = (dir / "y.csv").string();
  REQUIRE(call({"simulate", "--model", "fbm", "--hurst", "0.75", "--d", "2", "--steps", "512",
                "--out", x})
              .code == 0);
  REQUIRE(call({"simulate", "--model", "fv_staircase", "--d", "2", "--steps", "512", "--out", y})
              .code == 0);
  const std::string g = (dir / "g.json").string();
  CHECK(call({"lift", "--input", x, "--method", "gaussian", "--out", g}).code == 0);
  CHECK(call({"verify", "--input", g, "--checks", "chen,ibp,diagonal"}).code == 0);
  const std::string yl = (dir / "young.json").string();
  CHECK(call({"lift", "--input", y, "--method", "young", "--q", "1.5", "--out", yl}).code == 0);
  CHECK(call({"verify", "--input", yl, "--checks", "chen,ibp,zero"}).code == 0);
  const std::string p = (dir / "p.json").string();
  CHECK(call({"lift", "--input", x, "--method", "perturbed", "--perturbation", y, "--out", p})
            .code == 0);
  CHECK(roughcadlag::load_json(p)["meta"].contains("cross_terms"));
  CHECK(call({"verify", "--input", p}).code == 0);
  CHECK(call({"lift", "--input", x, "--method", "perturbed"}).code == 1);
  CHECK(call({"lift", "--input", x, "--method", "marcus"}).code == 1);
}

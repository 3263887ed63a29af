#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hkreg/cli.hpp"
#include "hkreg/io.hpp"
#include "hkreg/kernel_regression.hpp"

namespace fs = std::filesystem;
using namespace hkreg;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hkreg");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hkreg_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("generate writes the default 30-row dataset reproducibly") {
  TempDir dir;
  const auto a = invoke({"generate", "--out", dir / "a.csv"});
  CHECK(a.code == cli::kOk);
  CHECK(count_lines(slurp(dir / "a.csv")) == 31);
  CHECK(invoke({"generate", "--out", dir / "b.csv"}).code == cli::kOk);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(invoke({"generate", "--seed", "2", "--out", dir / "c.csv"}).code == cli::kOk);
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
  CHECK(invoke({"generate", "--n", "0", "--out", dir / "d.csv"}).code == cli::kConfigError);
  CHECK(invoke({"generate", "--manifold", "sphere", "--n", "5", "--out", dir / "s.csv"}).code == cli::kOk);
  CHECK(slurp(dir / "s.csv").rfind("t,coord1,coord2,coord3\n", 0) == 0);
}

TEST_CASE("fit reports DBM error and appends a result row") {
  TempDir dir;
  REQUIRE(invoke({"generate", "--out", dir / "data.csv"}).code == cli::kOk);
  const auto r = invoke({"fit", "--data", dir / "data.csv", "--out", dir / "fit.json",
                         "--results", dir / "results.csv"});
  REQUIRE(r.code == cli::kOk);
  const auto doc = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK(doc.at("method") == "dbm");
  CHECK(doc.at("path").at("K") == 40);
  CHECK(doc.contains("trace_subsampled"));
  const double l1 = doc.at("l1_error").get<double>();
  CHECK(l1 >= 0.0);
  CHECK(l1 < 0.5);

  CHECK(invoke({"fit", "--data", dir / "data.csv", "--method", "cbm", "--out", dir / "fit2.json",
                "--results", dir / "results.csv"}).code == cli::kOk);
  const auto csv = slurp(dir / "results.csv");
  CHECK(count_lines(csv) == 3);
  CHECK(csv.rfind("run_id,method,n,K,c,sigma2,seed,l1_error,runtime_ms", 0) == 0);
}

TEST_CASE("fit with KER prints the rule bandwidth") {
  TempDir dir;
  REQUIRE(invoke({"generate", "--out", dir / "data.csv"}).code == cli::kOk);
  const auto r = invoke({"fit", "--data", dir / "data.csv", "--method", "ker", "--out", dir / "k.json",
                         "--results", dir / "r.csv"});
  REQUIRE(r.code == cli::kOk);
  const auto data = load_dataset(dir / "data.csv", Manifold::circle());
  std::vector<double> ts;
  for (const auto& o : data.observations) ts.push_back(o.t);
  CHECK(r.out.find("bandwidth=" + format_double(bandwidth_rule(ts))) != std::string::npos);
}

TEST_CASE("fit configuration errors exit with code 2") {
  TempDir dir;
  REQUIRE(invoke({"generate", "--out", dir / "data.csv"}).code == cli::kOk);
  CHECK(invoke({"fit", "--data", dir / "data.csv", "--method", "spline"}).code == cli::kConfigError);
  CHECK(invoke({"fit", "--data", dir / "missing.csv"}).code == cli::kConfigError);
  CHECK(invoke({"fit", "--data", dir / "data.csv", "--grid-K", "5", "--rate-epsilon", "0.1"}).code ==
        cli::kConfigError);
  CHECK(invoke({"fit", "--data", dir / "data.csv", "--anneal-cool", "1.5"}).code == cli::kConfigError);
  CHECK(invoke({"fit", "--bogus-flag"}).code == cli::kConfigError);
  CHECK(invoke({}).code == cli::kConfigError);
}

TEST_CASE("fit failures during inference exit with code 3") {
  TempDir dir;
  std::ofstream(dir / "flat.csv") << "t,coord1\n0.5,1.0\n0.5,2.0\n0.5,1.5\n";
  const auto r = invoke({"fit", "--data", dir / "flat.csv", "--method", "ker", "--out", dir / "k.json",
                         "--results", dir / "r.csv"});
  CHECK(r.code == cli::kRuntimeError);
  CHECK(r.err.find("DegeneratePredictors") != std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir dir;
  std::ofstream(dir / "cfg.json") << R"({"n": 12, "seed": 3, "sigma2": 0.2})";
  CHECK(invoke({"generate", "--config", dir / "cfg.json", "--out", dir / "a.csv"}).code == cli::kOk);
  CHECK(count_lines(slurp(dir / "a.csv")) == 13);
  CHECK(invoke({"generate", "--config", dir / "cfg.json", "--n", "7", "--out", dir / "b.csv"}).code == cli::kOk);
  CHECK(count_lines(slurp(dir / "b.csv")) == 8);
  std::ofstream(dir / "bad.json") << R"({"nn": 12})";
  CHECK(invoke({"generate", "--config", dir / "bad.json"}).code == cli::kConfigError);
  std::ofstream(dir / "broken.json") << "{";
  CHECK(invoke({"generate", "--config", dir / "broken.json"}).code == cli::kConfigError);
}

TEST_CASE("sweep output is independent of the thread count") {
  TempDir dir;
  const std::vector<std::string> base{"sweep", "--axis", "K", "--values", "1,40", "--replicates", "3"};
  auto with = [&](std::string threads, std::string out) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", dir / out});
    return invoke(args);
  };
  REQUIRE(with("1", "a.csv").code == cli::kOk);
  REQUIRE(with("4", "b.csv").code == cli::kOk);
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(count_lines(a) == 7);
  CHECK(invoke({"sweep", "--axis", "c", "--values", "0.01"}).code == cli::kConfigError);
  CHECK(invoke({"sweep", "--axis", "q", "--values", "1,2"}).code == cli::kConfigError);
}

TEST_CASE("contract validates its sample sizes and is deterministic") {
  TempDir dir;
  CHECK(invoke({"contract", "--n-values", "50,200"}).code == cli::kConfigError);
  CHECK(invoke({"contract", "--n-values", "20,40,80", "--grid-K", "4"}).code == cli::kConfigError);
  const std::vector<std::string> args{"contract", "--n-values", "20,40,80", "--replicates", "2",
                                      "--mcmc-iterations", "4000", "--mcmc-burn-in", "1000",
                                      "--mcmc-thinning", "50"};
  auto a_args = args;
  a_args.insert(a_args.end(), {"--out", dir / "a.csv", "--threads", "1"});
  auto b_args = args;
  b_args.insert(b_args.end(), {"--out", dir / "b.csv", "--threads", "3"});
  const auto a = invoke(a_args);
  const auto b = invoke(b_args);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(a.out.find("slope=") != std::string::npos);
}

TEST_CASE("check-kernels passes and catches an injected fault") {
  const auto ok = invoke({"check-kernels"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("semigroup") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const auto bad = invoke({"check-kernels", "--inject-kernel-offset", "1e-3"});
  CHECK(bad.code == cli::kCheckFailed);
  CHECK(bad.out.find("FAIL circle normalization") != std::string::npos);
}

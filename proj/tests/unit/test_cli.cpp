#include <doctest.h>

#include <cstdlib>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "small_configs.hpp"

using namespace anderson::cli;

TEST_CASE("every subcommand has defaults that validate") {
  for (const auto& name : subcommands()) {
    const RunConfig c = RunConfig::defaults(name);
    CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS(RunConfig::defaults("bogus"), ConfigError);
}

TEST_CASE("degenerate uniform width is rejected") {
  RunConfig c = RunConfig::defaults("spectrum");
  c.set("n", "3");
  c.set("lo", "0");
  c.set("hi", "0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  std::ostringstream out, err;
  CHECK(run(c, out, err) == 2);
  const auto e = nlohmann::json::parse(err.str());
  CHECK(e["error"]["type"] == "config");
  CHECK(out.str().empty());
}

TEST_CASE("malformed and non-positive values are rejected") {
  RunConfig c = RunConfig::defaults("lyapunov");
  CHECK_THROWS_AS(c.set("nonsense", "1"), ConfigError);
  c.set("steps", "-5");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults("lyapunov");
  c.set("lambda_lo", "1x");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults("lyapunov");
  c.set("lambda_lo", "2");
  c.set("lambda_hi", "1");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults("spectrum");
  c.set("workers", "0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults("fb-verify");
  c.set("bandwidth", "1.0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig::defaults("spectrum");
  c.set("dist", "bernoulli");
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config text round-trips losslessly") {
  RunConfig c = RunConfig::defaults("fb-verify");
  c.set("bandwidth", "0.019999999999999999");
  c.set("lo", "-0.1");
  c.set("seed", "18446744073709551615");
  const RunConfig back = RunConfig::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.values() == c.values());
  CHECK(back.hash() == c.hash());
  CHECK(back.real("bandwidth") == c.real("bandwidth"));
  CHECK(back.seed() == 18446744073709551615ULL);
}

TEST_CASE("config hash ignores workers, out and format only") {
  RunConfig a = RunConfig::defaults("spectrum");
  RunConfig b = a;
  b.set("workers", "8");
  b.set("out", "/tmp/x.csv");
  b.set("format", "json");
  CHECK(a.hash() == b.hash());
  b.set("n", "101");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("file values yield to the environment, which yields to flags") {
  RunConfig c = RunConfig::defaults("spectrum");
  c.merge_text("# comment\nseed = 11\nworkers=2\nn=7\n");
  CHECK(c.seed() == 11);
  ::setenv("ANDERSON_SEED", "22", 1);
  ::setenv("ANDERSON_WORKERS", "3", 1);
  c.merge_environment();
  ::unsetenv("ANDERSON_SEED");
  ::unsetenv("ANDERSON_WORKERS");
  CHECK(c.seed() == 22);
  CHECK(c.count("workers") == 3);
  CHECK(c.count("n") == 7);
  c.set("seed", "33");
  CHECK(c.seed() == 33);
  CHECK_THROWS_AS(c.merge_text("n 5\n"), ConfigError);
  CHECK_THROWS_AS(c.merge_text("command=dos\n"), ConfigError);
}

TEST_CASE("CSV outputs carry the declared headers and the metadata trailer") {
  const std::map<std::string, std::string> headers{
      {"spectrum", "index,eigenvalue"},
      {"dos", "lambda_bin_center,density,method"},
      {"lyapunov", "lambda,gamma,gamma_se,sigma2,sigma2_se"},
      {"invariant-measure", "bin_center,histogram,operator"},
      {"mixing", "lag,corr_sin2,corr_cos2,corr_cos4"},
      {"fb-verify", "observable,lhs,lhs_se,rhs,rhs_se,bandwidth"},
      {"dtheta-check", "instance,lambda,relative_error"},
      {"tails", "sample_id,s,q,fluct"},
      {"temperature", "x,measured,stderr,predicted"},
      {"critical", "sample_id,s,q,fluct"},
      {"periodic", "index,eigenvalue"},
      {"figure", "n,log_norm,fit"},
  };
  for (const auto& name : subcommands()) {
    CAPTURE(name);
    const RunConfig c = small_config(name, 1);
    const RunOutput o = execute(c);
    CHECK(o.body.rfind(headers.at(name) + "\n", 0) == 0);
    std::ostringstream trailer;
    trailer << "# seed=" << c.seed() << " config_hash=";
    CHECK(o.body.find(trailer.str()) != std::string::npos);
    CHECK(o.body.back() == '\n');
    CHECK_FALSE(o.summary.empty());
  }
}

TEST_CASE("eigenvector dump") {
  RunConfig c = RunConfig::defaults("spectrum");
  c.set("n", "20");
  c.set("vector", "4");
  const RunOutput o = execute(c);
  CHECK(o.body.rfind("site,amplitude,log_amplitude\n", 0) == 0);
}

TEST_CASE("JSON summary schema") {
  RunConfig c = small_config("lyapunov", 1);
  c.set("format", "json");
  const auto j = nlohmann::json::parse(execute(c).body);
  for (const char* key : {"estimate", "stderr", "n_samples", "params", "warnings"}) CHECK(j.contains(key));
  CHECK(j["params"]["steps"] == 20000);
  CHECK(j["stderr"].get<double>() > 0.0);
  CHECK(j["warnings"].is_array());
}

TEST_CASE("runs are byte-identical across repeats and worker counts") {
  for (const auto& name : subcommands()) {
    CAPTURE(name);
    const std::string one = execute(small_config(name, 1)).body;
    CHECK(execute(small_config(name, 1)).body == one);
    CHECK(execute(small_config(name, 8)).body == one);
  }
}

TEST_CASE("module failures map to a runtime error object") {
  RunConfig c = RunConfig::defaults("lyapunov");
  c.set("steps", "100");
  std::ostringstream out, err;
  CHECK(run(c, out, err) != 0);
  const auto e = nlohmann::json::parse(err.str());
  CHECK(e.contains("error"));
}

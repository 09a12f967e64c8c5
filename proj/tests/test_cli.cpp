#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "arlo/cli/commands.hpp"
#include "arlo/units/policy_io.hpp"

namespace {

using namespace arlo;
namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arlo_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_json(const fs::path& path, const Json& j) {
  std::ofstream(path) << j.dump(2);
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json chain_qlearning_config(std::size_t episodes = 100) {
  return {{"version", 1},
          {"pipeline", "online"},
          {"environment", {{"type", "chain"}, {"n_states", 5}, {"gamma", 0.9}, {"horizon", 10}}},
          {"stages",
           {{{"kind", "PolicyGeneration"},
             {"unit", {{"variant", "fixed"}, {"algorithm", "q_learning"}, {"hyperparams", {{"episodes", episodes}}}}}}}},
          {"evaluation", {{"n_episodes", 20}, {"kind", "discounted"}}}};
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run_cli(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out,
                   std::vector<std::string> overrides = {}) {
  RunArgs a;
  a.config_path = config.string();
  a.seed = seed;
  a.out = out.string();
  a.overrides = std::move(overrides);
  std::ostringstream o, e;
  const int code = cmd_run(a, o, e);
  return {code, o.str(), e.str()};
}

Invocation report_cli(const fs::path& dir) {
  std::ostringstream o, e;
  const int code = cmd_report(dir.string(), o, e);
  return {code, o.str(), e.str()};
}

Invocation oracle_cli(const fs::path& config, std::size_t episodes = 200) {
  std::ostringstream o, e;
  const int code = cmd_oracle(config.string(), episodes, 0, o, e);
  return {code, o.str(), e.str()};
}

std::set<std::string> files_under(const fs::path& root) {
  std::set<std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) out.insert(fs::relative(entry.path(), root).generic_string());
  }
  return out;
}

// ---------------------------------------------------------------- config

TEST(Config, SampleConfigsRoundTrip) {
  for (const auto& entry : fs::directory_iterator(fs::path(ARLO_SOURCE_DIR) / "configs")) {
    const Json raw = read_json_file(entry.path().string());
    if (!raw.contains("version")) continue;
    const auto c = RunConfig::from_json(raw);
    const Json once = c.to_json();
    EXPECT_EQ(RunConfig::from_json(once).to_json(), once) << entry.path();
    const auto diags = validate_pipeline(c.to_pipeline(0), SlotSet{SlotType::Environment});
    EXPECT_TRUE(diags.empty()) << entry.path() << ": " << (diags.empty() ? "" : diags.front());
  }
}

TEST(Config, StrictParsingRejectsUnknownAndBadFields) {
  Json j = chain_qlearning_config();
  j["unexpected"] = 1;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["version"] = 2;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["environment"]["slope"] = 1;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["environment"]["type"] = "cartpole";
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["stages"][0]["unit"]["variant"] = "mystery";
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["threads"] = "many";
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = chain_qlearning_config();
  j["environment"] = {{"type", "lqg"}, {"A", {{1.0, 0.0}}}};
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);
}

TEST(Config, EnvironmentSpecCompletesDefaults) {
  const auto e = EnvironmentSpec::from_json({{"type", "chain"}});
  const Json full = e.to_json();
  EXPECT_EQ(full.at("n_states"), 5);
  EXPECT_EQ(full.at("horizon"), 10);
  EXPECT_EQ(EnvironmentSpec::from_json(full).to_json(), full);
  const auto lqg = EnvironmentSpec::from_json({{"type", "lqg"}});
  EXPECT_EQ(EnvironmentSpec::from_json(lqg.to_json()).to_json(), lqg.to_json());
  const auto inf = EnvironmentSpec::from_json({{"type", "chain"}, {"horizon", nullptr}});
  EXPECT_FALSE(inf.finite()->horizon.has_value());
}

TEST(Config, EvaluationShorthandAppendsFixedMonteCarlo) {
  const auto c = RunConfig::from_json(chain_qlearning_config());
  const auto p = c.to_pipeline(3);
  ASSERT_EQ(p.stages.size(), 2u);
  EXPECT_EQ(p.stages[1].kind, StageKind::PolicyEvaluation);
  const auto& fixed = std::get<FixedUnit>(p.stages[1].unit);
  EXPECT_EQ(fixed.algorithm, "monte_carlo");
  EXPECT_EQ(std::get<std::int64_t>(fixed.hyperparams.at("n_episodes")), 20);
}

TEST(Config, Overrides) {
  Json j = chain_qlearning_config();
  apply_override(j, "stages.0.unit.hyperparams.alpha=0.5");
  EXPECT_DOUBLE_EQ(j["stages"][0]["unit"]["hyperparams"]["alpha"].get<double>(), 0.5);
  apply_override(j, "evaluation.kind=total");
  EXPECT_EQ(j["evaluation"]["kind"], "total");
  apply_override(j, "environment.horizon=null");
  EXPECT_TRUE(j["environment"]["horizon"].is_null());
  apply_override(j, "new.nested.key=[1,2]");
  EXPECT_EQ(j["new"]["nested"]["key"], Json({1, 2}));
  EXPECT_THROW(apply_override(j, "stages.3.kind=x"), ConfigError);
  EXPECT_THROW(apply_override(j, "stages.first.kind=x"), ConfigError);
  EXPECT_THROW(apply_override(j, "version.x=1"), ConfigError);
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(j, "a..b=1"), ConfigError);
}

// ---------------------------------------------------------------- run

TEST(RunCommand, WritesEveryArtifactAndAManifestThatCoversThem) {
  const auto dir = fresh_dir("run_smoke");
  const auto cfg = write_json(dir / "config.json", chain_qlearning_config());
  const auto r = run_cli(cfg, 5, dir / "out");
  ASSERT_EQ(r.code, 0) << r.err;

  const auto out = dir / "out";
  const auto files = files_under(out);
  for (const char* f : {"result.json", "config.json", "policy.json", "manifest.json"}) EXPECT_TRUE(files.count(f)) << f;

  const Json manifest = Json::parse(slurp(out / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& e : manifest.at("files")) {
    const std::string path = e.at("path");
    listed.insert(path);
    const std::string content = slurp(out / path);
    EXPECT_EQ(e.at("bytes").get<std::size_t>(), content.size()) << path;
    EXPECT_EQ(e.at("sha256").get<std::string>(), sha256_hex(content)) << path;
  }
  std::set<std::string> expected = files;
  expected.erase("manifest.json");
  EXPECT_EQ(listed, expected);

  const Json result = Json::parse(slurp(out / "result.json"));
  EXPECT_EQ(result.at("seed"), 5);
  EXPECT_EQ(result.at("stages").size(), 2u);
  EXPECT_FALSE(result.at("evaluation").is_null());
  const Json resolved = Json::parse(slurp(out / "config.json"));
  EXPECT_EQ(resolved.at("seed"), 5);
  EXPECT_EQ(result.at("run_id"), sha256_hex(RunConfig::from_json(resolved).to_json().dump()).substr(0, 16));
  const auto policy = policy_from_json(Json::parse(slurp(out / "policy.json")));
  EXPECT_NE(policy, nullptr);
}

TEST(RunCommand, SameSeedGivesIdenticalManifestAndDifferentSeedDoesNot) {
  const auto dir = fresh_dir("run_determinism");
  const auto cfg = write_json(dir / "config.json", chain_qlearning_config());
  ASSERT_EQ(run_cli(cfg, 9, dir / "a").code, 0);
  ASSERT_EQ(run_cli(cfg, 9, dir / "b").code, 0);
  ASSERT_EQ(run_cli(cfg, 10, dir / "c").code, 0);
  EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
  EXPECT_NE(slurp(dir / "a" / "result.json"), slurp(dir / "c" / "result.json"));
}

TEST(RunCommand, SeedAndOutputMayComeFromTheConfig) {
  const auto dir = fresh_dir("run_config_seed");
  Json j = chain_qlearning_config();
  j["seed"] = 4;
  j["output"] = (dir / "from_config").string();
  const auto cfg = write_json(dir / "config.json", j);
  RunArgs a;
  a.config_path = cfg.string();
  std::ostringstream o, e;
  ASSERT_EQ(cmd_run(a, o, e), 0) << e.str();
  EXPECT_TRUE(fs::exists(dir / "from_config" / "manifest.json"));
  // --seed wins over the config's seed
  ASSERT_EQ(run_cli(cfg, 4, dir / "explicit").code, 0);
  EXPECT_EQ(slurp(dir / "from_config" / "manifest.json"), slurp(dir / "explicit" / "manifest.json"));
}

TEST(RunCommand, EvaluationBeforeGenerationIsRejectedWithExitTwo) {
  const auto dir = fresh_dir("run_order");
  Json j = chain_qlearning_config();
  j.erase("evaluation");
  Json pe = {{"kind", "PolicyEvaluation"},
             {"unit", {{"variant", "fixed"}, {"algorithm", "monte_carlo"}, {"hyperparams", Json::object()}}}};
  j["stages"].insert(j["stages"].begin(), pe);
  const auto cfg = write_json(dir / "config.json", j);
  const auto r = run_cli(cfg, 1, dir / "out");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("PolicyEvaluation before PolicyGeneration"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(RunCommand, ValidationAndMalformedInputGiveExitTwo) {
  const auto dir = fresh_dir("run_invalid");
  const auto cfg = write_json(dir / "config.json", chain_qlearning_config());
  EXPECT_EQ(run_cli(cfg, std::nullopt, dir / "out").code, 2);  // no seed anywhere
  EXPECT_EQ(run_cli(dir / "missing.json", 1, dir / "out").code, 2);
  std::ofstream(dir / "broken.json") << "{\"version\": 1,";
  EXPECT_EQ(run_cli(dir / "broken.json", 1, dir / "out").code, 2);
  EXPECT_EQ(run_cli(cfg, 1, dir / "out", {"stages.0.unit.algorithm=fqi_tabular"}).code, 2);
  EXPECT_EQ(run_cli(cfg, 1, dir / "out", {"stages.0.unit.hyperparams.gamma_bogus=1"}).code, 2);
  EXPECT_EQ(run_cli(cfg, 1, dir / "out", {"stages.0.unit.hyperparams.alpha=-1"}).code, 2);
  EXPECT_EQ(run_cli(cfg, 1, dir / "out", {"pipeline=offline"}).code, 2);  // q_learning is online-only
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(RunCommand, UnwritableOutputIsARuntimeFailure) {
  const auto dir = fresh_dir("run_unwritable");
  const auto cfg = write_json(dir / "config.json", chain_qlearning_config());
  std::ofstream(dir / "blocker") << "x";
  const auto r = run_cli(cfg, 1, dir / "blocker" / "out");
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(RunCommand, OfflinePipelineReadsADatasetRelativeToTheConfig) {
  const auto dir = fresh_dir("run_dataset");
  Json gen = {{"version", 1},
              {"pipeline", "offline"},
              {"environment", {{"type", "chain"}}},
              {"stages",
               {{{"kind", "DataGeneration"},
                 {"unit", {{"variant", "fixed"}, {"algorithm", "random_uniform"}, {"hyperparams", {{"n_episodes", 30}}}}}},
                {{"kind", "PolicyGeneration"},
                 {"unit", {{"variant", "fixed"}, {"algorithm", "fqi_tabular"}, {"hyperparams", Json::object()}}}}}}};
  ASSERT_EQ(run_cli(write_json(dir / "gen.json", gen), 2, dir / "gen").code, 0);
  fs::create_directories(dir / "cfg" / "data");
  fs::copy_file(dir / "gen" / "datasets" / "stage0.jsonl", dir / "cfg" / "data" / "d.jsonl");

  Json use = gen;
  use["stages"].erase(0);
  use["dataset"] = "data/d.jsonl";
  use["evaluation"] = {{"n_episodes", 10}};
  const auto r = run_cli(write_json(dir / "cfg" / "use.json", use), 2, dir / "use");
  ASSERT_EQ(r.code, 0) << r.err;
  // tabular FQI draws no randomness, so the same data gives the same policy
  EXPECT_EQ(Json::parse(slurp(dir / "gen" / "policy.json")), Json::parse(slurp(dir / "use" / "policy.json")));

  use["dataset"] = "data/nope.jsonl";
  EXPECT_EQ(run_cli(write_json(dir / "cfg" / "use2.json", use), 2, dir / "use2").code, 2);
  std::ofstream(dir / "cfg" / "data" / "bad.jsonl") << "{\"state\": [0]}\n";
  use["dataset"] = "data/bad.jsonl";
  EXPECT_EQ(run_cli(write_json(dir / "cfg" / "use3.json", use), 2, dir / "use3").code, 2);
}

// ---------------------------------------------------------------- oracle

TEST(OracleCommand, LqgPrintsFifteenGainsMatchingTheRecursion) {
  const auto dir = fresh_dir("oracle_lqg");
  const auto r = oracle_cli(write_json(dir / "env.json", {{"type", "lqg"}}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j.at("gains").size(), 15u);
  const auto sol = riccati_solve(default_lqg());
  for (std::size_t t = 0; t < 15; ++t) {
    const Matrix k = matrix_from_json(j.at("gains")[t], "gain");
    EXPECT_LE((k - sol.gains[t]).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
  EXPECT_DOUBLE_EQ(j.at("closed_form_return").get<double>(), riccati_mean_return(sol, default_lqg()));
  const auto mc = ReturnEstimate::from_json(j.at("monte_carlo_return"));
  EXPECT_EQ(mc.n_episodes, 200u);
  EXPECT_LE(std::abs(mc.mean - j.at("closed_form_return").get<double>()), 4 * mc.standard_error() + 0.05);
}

TEST(OracleCommand, FiniteHorizonChainMatchesIndependentBackwardInduction) {
  const auto dir = fresh_dir("oracle_chain");
  const auto r = oracle_cli(write_json(dir / "cfg.json", chain_qlearning_config()));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("iterations"), 10);
  const Matrix q = matrix_from_json(j.at("q_table"), "q");
  // backward induction written directly against the transition table
  const auto m = chain_mdp(5, 0.9, 10);
  std::vector<double> v(5, 0.0);
  Matrix ref(5, 2);
  for (int t = 0; t < 10; ++t) {
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t a = 0; a < 2; ++a) {
        double e = 0.0;
        for (std::size_t s2 = 0; s2 < 5; ++s2) e += m.p(s, a, s2) * v[s2];
        ref(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = m.R(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) + 0.9 * e;
      }
    }
    for (std::size_t s = 0; s < 5; ++s) v[s] = ref.row(static_cast<Eigen::Index>(s)).maxCoeff();
  }
  EXPECT_LE((q - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(j.at("optimal_return").get<double>(), m.mu0.dot(ref.rowwise().maxCoeff()));
}

TEST(OracleCommand, InfiniteHorizonIsABellmanFixedPoint) {
  const auto dir = fresh_dir("oracle_inf");
  const auto r = oracle_cli(write_json(dir / "env.json", {{"type", "random_finite"}, {"n_states", 6}, {"n_actions", 3}, {"horizon", nullptr}}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const Matrix q = matrix_from_json(j.at("q_table"), "q");
  const auto spec = EnvironmentSpec::from_json({{"type", "random_finite"}, {"n_states", 6}, {"n_actions", 3}, {"horizon", nullptr}});
  const auto& m = *spec.finite();
  for (std::size_t s = 0; s < 6; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      double e = 0.0;
      for (std::size_t s2 = 0; s2 < 6; ++s2) e += m.p(s, a, s2) * q.row(static_cast<Eigen::Index>(s2)).maxCoeff();
      const auto si = static_cast<Eigen::Index>(s), ai = static_cast<Eigen::Index>(a);
      EXPECT_NEAR(q(si, ai), m.R(si, ai) + m.gamma * e, 1e-9);
    }
  }
  const auto greedy = j.at("greedy_actions").get<std::vector<std::size_t>>();
  EXPECT_EQ(greedy, greedy_actions(q));
}

TEST(OracleCommand, UnsupportedOrMalformedInputGivesExitTwo) {
  const auto dir = fresh_dir("oracle_bad");
  EXPECT_EQ(oracle_cli(write_json(dir / "res.json", {{"type", "reservoir"}})).code, 2);
  std::ofstream(dir / "broken.json") << "[1,";
  EXPECT_EQ(oracle_cli(dir / "broken.json").code, 2);
  EXPECT_EQ(oracle_cli(write_json(dir / "odd.json", {{"type", "lqg"}, {"bound", "wide"}})).code, 2);
  EXPECT_EQ(oracle_cli(dir / "absent.json").code, 2);
}

// ---------------------------------------------------------------- report

Json tunable_chain_config(std::size_t generations) {
  Json j = chain_qlearning_config(20);
  j["stages"][0]["unit"] = {{"variant", "tunable"},
                            {"algorithm", "q_learning"},
                            {"hyperparams", {{"episodes", 20}}},
                            {"space", {{"alpha", {{"type", "real"}, {"lo", 0.05}, {"hi", 1.0}, {"scale", "linear"}}},
                                       {"epsilon", {{"type", "real"}, {"lo", 0.0}, {"hi", 1.0}, {"scale", "linear"}}}}},
                            {"tuner", {{"type", "genetic"}, {"n_generations", generations}, {"n_agents", 2}, {"tournament_size", 2}}},
                            {"index", {{"id", "discounted_return"}, {"n_episodes", 3}}}};
  return j;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

double cell_value(const std::string& s) { return s == "-inf" ? -std::numeric_limits<double>::infinity() : std::stod(s); }

TEST(ReportCommand, FiftyGenerationTraceGivesFiftyRowsEqualToTheTrace) {
  const auto dir = fresh_dir("report_tuned");
  ASSERT_EQ(run_cli(write_json(dir / "cfg.json", tunable_chain_config(50)), 3, dir / "run").code, 0);
  const auto r = report_cli(dir / "run");
  ASSERT_EQ(r.code, 0) << r.err;

  const auto trace = TuningTrace::from_json(Json::parse(slurp(dir / "run" / "traces" / "stage0.json")));
  const auto best = read_csv(dir / "run" / "reports" / "stage0_best_fitness.csv");
  ASSERT_EQ(best.size(), 51u);
  EXPECT_EQ(best[0], (std::vector<std::string>{"generation", "best_fitness"}));
  for (std::size_t g = 0; g < 50; ++g) {
    EXPECT_EQ(std::stoul(best[g + 1][0]), g);
    double expected = -std::numeric_limits<double>::infinity();
    for (const auto& m : trace.generations[g].members) expected = std::max(expected, m.fitness.score());
    EXPECT_EQ(cell_value(best[g + 1][1]), expected) << g;
  }

  const auto scatter = read_csv(dir / "run" / "reports" / "stage0_hyperparams.csv");
  ASSERT_EQ(scatter.size(), 1u + 50u * 2u * 2u);
  EXPECT_EQ(scatter[0], (std::vector<std::string>{"generation", "agent", "param_name", "value", "fitness"}));
  for (std::size_t i = 1; i < scatter.size(); ++i) {
    const auto& row = scatter[i];
    const auto& member = trace.generations.at(std::stoul(row[0])).members.at(std::stoul(row[1]));
    EXPECT_EQ(std::stod(row[3]), std::get<double>(member.assignment.at(row[2])));
    EXPECT_EQ(cell_value(row[4]), member.fitness.score());
  }
  EXPECT_TRUE(fs::exists(dir / "run" / "reports" / "summary.txt"));
}

TEST(ReportCommand, FixedOnlyRunGetsOnlyASummary) {
  const auto dir = fresh_dir("report_fixed");
  ASSERT_EQ(run_cli(write_json(dir / "cfg.json", chain_qlearning_config()), 3, dir / "run").code, 0);
  ASSERT_EQ(report_cli(dir / "run").code, 0);
  EXPECT_EQ(files_under(dir / "run" / "reports"), std::set<std::string>{"summary.txt"});
  const std::string summary = slurp(dir / "run" / "reports" / "summary.txt");
  EXPECT_NE(summary.find("evaluation: mean"), std::string::npos);
}

TEST(ReportCommand, MissingManifestOrTraceGivesExitTwo) {
  const auto dir = fresh_dir("report_missing");
  EXPECT_EQ(report_cli(dir / "nothing").code, 2);
  ASSERT_EQ(run_cli(write_json(dir / "cfg.json", tunable_chain_config(2)), 3, dir / "run").code, 0);
  fs::remove(dir / "run" / "traces" / "stage0.json");
  const auto r = report_cli(dir / "run");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing trace"), std::string::npos) << r.err;
}

TEST(Hash, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace

// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// if any selected criterion fails. Usage: acceptance [criterion ...]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arlo/arlo.hpp"
#include "trace_checks.hpp"

namespace {

using namespace arlo;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

/// Every trace produced by any criterion; criterion 6 checks them all.
struct CollectedTrace {
  std::string label;
  TuningTrace trace;
};
std::vector<CollectedTrace> g_traces;

void collect(const std::string& label, const RunResult& res) {
  for (std::size_t i = 0; i < res.stages.size(); ++i) {
    const auto& s = res.stages[i];
    if (s.trace) g_traces.push_back({label + " stage " + std::to_string(i), *s.trace});
    if (s.automatic) {
      for (std::size_t j = 0; j < s.automatic->subunits.size(); ++j) {
        const auto& sub = s.automatic->subunits[j];
        if (sub.trace) g_traces.push_back({label + " stage " + std::to_string(i) + " sub " + std::to_string(j), *sub.trace});
      }
    }
  }
}

std::string check_trace(const TuningTrace& t) {
  const auto& cfg = t.config;
  if (cfg.value("type", "") == "genetic") {
    return testing::trace_violation(t, cfg.at("n_agents").get<std::size_t>(), true);
  }
  if (t.generations.empty()) return "trace has no generations";
  return testing::trace_violation(t, t.generations.front().members.size(), false);
}

RunResult run_config(const Json& j, std::uint64_t seed) {
  const auto cfg = RunConfig::from_json(j);
  StageIO input;
  input.env = cfg.environment.make();
  RunOptions opts;
  opts.threads = default_thread_count();
  return run_pipeline(cfg.to_pipeline(seed), input, RngStream(seed), default_registry(), opts);
}

// ---------------------------------------------------------------- 1

Json lqg_gpomdp_config(bool tuned) {
  Json unit;
  const Json base = {{"n_epochs", 400}, {"baseline", "mean"}};
  if (tuned) {
    unit = {{"variant", "tunable"},
            {"algorithm", "gpomdp"},
            {"hyperparams", base},
            {"space",
             {{"learning_rate", {{"type", "real"}, {"lo", 1e-4}, {"hi", 2e-2}, {"scale", "log"}}},
              {"n_episodes_per_fit", {{"type", "int"}, {"lo", 20}, {"hi", 100}}},
              {"init_std", {{"type", "real"}, {"lo", 0.05}, {"hi", 0.95}, {"scale", "log"}}}}},
            {"tuner", {{"type", "genetic"}, {"n_generations", 50}, {"n_agents", 20}}},
            {"index", {{"id", "discounted_return"}, {"n_episodes", 200}}}};
  } else {
    unit = {{"variant", "fixed"}, {"algorithm", "gpomdp"}, {"hyperparams", base}};
  }
  return {{"version", 1},
          {"pipeline", "online"},
          {"environment", {{"type", "lqg"}}},
          {"stages", {{{"kind", "PolicyGeneration"}, {"unit", unit}}}},
          {"evaluation", {{"n_episodes", 100}, {"kind", "discounted"}}}};
}

Outcome criterion1() {
  const auto params = default_lqg();
  const LqgEnvironment env(params);
  const auto oracle = riccati_policy(riccati_solve(params), env.spec().action_space);
  bool all = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto tuned = run_config(lqg_gpomdp_config(true), seed);
    collect("criterion 1 seed " + std::to_string(seed), tuned);
    const auto deflt = run_config(lqg_gpomdp_config(false), seed);
    // the oracle is scored on the evaluation stage's own stream
    const RngStream eval_stream = RngStream(seed).child(1).child(kStageExecute);
    const double j_star = evaluate_policy(env, *oracle, 100, ReturnKind::discounted, eval_stream).mean;
    const double j_tuned = tuned.evaluation->mean;
    const double j_default = deflt.evaluation->mean;
    const double threshold = 1.15 * j_star;
    const bool ok = j_tuned >= threshold && j_tuned > j_default;
    all = all && ok;
    detail += "seed " + std::to_string(seed) + " (" + tuned.stages[0].chosen_hyperparams.to_json().dump() + "): tuned " + fmt(j_tuned) + " default " + fmt(j_default) + " oracle " +
              fmt(j_star) + " threshold " + fmt(threshold) + (ok ? "" : " [fail]") + "; ";
  }
  return {all, detail};
}

// ---------------------------------------------------------------- 2

Outcome criterion2() {
  RngStream rng(2002);
  double worst = 0.0;
  std::string detail;
  for (int i = 0; i < 5; ++i) {
    const auto S = static_cast<std::size_t>(rng.integer(2, 6));
    const auto A = static_cast<std::size_t>(rng.integer(2, 3));
    const std::size_t denom = 4;
    const auto m = random_finite_mdp(S, A, denom, 0.9, std::nullopt, rng);
    const auto d = generative_dataset(m, denom);
    for (std::size_t iters : {1, 2, 5, 10}) {
      FqiConfig cfg;
      cfg.regressor = RegressorKind::tabular_mean;
      cfg.n_iterations = iters;
      const auto res = pg_fqi(d, cfg, m.gamma, m.spec().action_space, RngStream(1));
      const Matrix vi = value_iteration(m, iters);
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          const double q = res.q->value(Vector::Constant(1, static_cast<double>(s)), Vector::Constant(1, static_cast<double>(a)));
          worst = std::max(worst, std::abs(q - vi(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a))));
        }
      }
    }
    detail += std::to_string(S) + "x" + std::to_string(A) + " ";
  }
  return {worst <= 1e-12, "MDPs " + detail + "max |FQI - VI| = " + fmt(worst, 3) + " (tolerance 1e-12)"};
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  RngStream rng(3003);
  std::vector<Vector> pts, doubled, shifted;
  for (int i = 0; i < 10000; ++i) {
    // on a 2^-30 grid so that the shift below is exact
    Vector p(2);
    p << std::floor(rng.uniform() * 0x1p30) * 0x1p-30, std::floor(rng.uniform() * 0x1p30) * 0x1p-30;
    pts.push_back(p);
    doubled.push_back(2.0 * p);
    shifted.push_back(p + Vector::Constant(2, 0.5));
  }
  const double h = knn_entropy(pts, 5).value;
  const double h2 = knn_entropy(doubled, 5).value;
  const double hs = knn_entropy(shifted, 5).value;
  const double scale_err = std::abs((h2 - h) - 2.0 * std::log(2.0));
  const bool translation = std::bit_cast<std::uint64_t>(h) == std::bit_cast<std::uint64_t>(hs);
  const bool ok = std::abs(h) <= 0.05 && scale_err <= 1e-9 && translation;
  return {ok, "H(uniform square) = " + fmt(h) + " (|H| <= 0.05); scale-law error " + fmt(scale_err, 3) +
                  " (<= 1e-9); translation bitwise " + (translation ? "yes" : "no")};
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  bool ok = true;
  std::string detail;
  for (double rho : {0.0, 0.5, 0.9}) {
    RngStream rng(4004, {static_cast<std::uint64_t>(rho * 10)});
    std::vector<Vector> x, y;
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.normal(), v = rng.normal();
      x.push_back(Vector::Constant(1, u));
      y.push_back(Vector::Constant(1, rho * u + std::sqrt(1 - rho * rho) * v));
    }
    const double est = knn_mutual_information(x, y, 5).value;
    const double truth = 0.5 * std::log(1 / (1 - rho * rho));
    const bool good = std::abs(est - truth) <= 0.05;
    ok = ok && good;
    detail += "rho " + fmt(rho) + ": " + fmt(est) + " vs " + fmt(truth) + (good ? "" : " [fail]") + "; ";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 5

Outcome criterion5() {
  const ReservoirEnvironment env(ReservoirParams{});  // 2 informative + 4 distractor features
  const std::size_t dim = env.spec().state_space.dim();
  std::size_t recovered = 0, not_worse = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(5005, {seed});
    const auto d = dg_random_uniform(env, 50, rng.child(0));
    auto selected = fe_forward_mi_select(d, 5, 2).transform.selected;
    std::sort(selected.begin(), selected.end());

    std::vector<std::size_t> best;
    double best_mi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i + 1; j < dim; ++j) {
        const std::vector<std::size_t> pair{i, j};
        const double mi = feature_subset_mi(d, pair, 5).value;
        if (mi > best_mi) {
          best_mi = mi;
          best = pair;
        }
      }
    }
    recovered += selected == best;

    RngStream pick = rng.child(1);
    const auto a = static_cast<std::size_t>(pick.integer(0, static_cast<std::int64_t>(dim) - 1));
    auto b = static_cast<std::size_t>(pick.integer(0, static_cast<std::int64_t>(dim) - 2));
    if (b >= a) ++b;
    const std::vector<std::size_t> random_pair{std::min(a, b), std::max(a, b)};

    auto fqi_return = [&](const std::vector<std::size_t>& subset) {
      FeatureTransform t;
      t.selected = subset;
      FqiConfig cfg;
      cfg.regressor = RegressorKind::extra_trees;
      cfg.n_iterations = 20;
      const auto fit = pg_fqi(transform_dataset(d, t), cfg, env.spec().gamma, env.spec().action_space, rng.child(2));
      const auto engineered = fe_engineer_environment(env, t);
      return evaluate_policy(*engineered, *fit.policy, 100, ReturnKind::discounted, rng.child(3)).mean;
    };
    const double r_sel = fqi_return(selected);
    const double r_rand = fqi_return(random_pair);
    not_worse += r_sel >= r_rand;
    detail += "{" + std::to_string(selected[0]) + "," + std::to_string(selected[1]) + "} " + fmt(r_sel) + " vs {" +
              std::to_string(random_pair[0]) + "," + std::to_string(random_pair[1]) + "} " + fmt(r_rand) + "; ";
  }
  return {recovered == 10 && not_worse >= 8, "forward = brute force on " + std::to_string(recovered) +
                                                  "/10; selected >= random on " + std::to_string(not_worse) + "/10 (" +
                                                  detail + ")"};
}

// ---------------------------------------------------------------- 6

Outcome criterion6() {
  std::size_t hits = 0;
  std::string worst_violation;
  HyperparamSpace space;
  space.add("h", RealRange{0.0, 10.0});
  const FitnessFn fitness = [](const HyperparamAssignment& a, RngStream) {
    const double h = a.get_real("h");
    return Fitness{-(h - 3.0) * (h - 3.0)};
  };
  TunerConfig cfg;
  cfg.genetic.n_generations = 50;
  cfg.genetic.n_agents = 20;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = run_tuner(space, fitness, cfg, RngStream(6006, {seed}), default_thread_count());
    hits += std::abs(t.best_assignment.get_real("h") - 3.0) <= 0.3;
    g_traces.push_back({"criterion 6 seed " + std::to_string(seed), t});
  }
  std::size_t violations = 0;
  for (const auto& c : g_traces) {
    const auto v = check_trace(c.trace);
    if (!v.empty()) {
      ++violations;
      if (worst_violation.empty()) worst_violation = c.label + ": " + v;
    }
  }
  return {hits == 10 && violations == 0,
          "|h* - 3| <= 0.3 on " + std::to_string(hits) + "/10; trace invariants hold on " +
              std::to_string(g_traces.size() - violations) + "/" + std::to_string(g_traces.size()) + " traces" +
              (worst_violation.empty() ? "" : " (first violation: " + worst_violation + ")")};
}

// ---------------------------------------------------------------- 7

Json automatic_config(std::uint64_t mdp_seed) {
  const Json genetic = {{"type", "genetic"}, {"n_generations", 5}, {"n_agents", 6}};
  const Json knn = {{"algorithm", "fqi_knn"},
                    {"hyperparams", Json::object()},
                    {"space", {{"k", {{"type", "int"}, {"lo", 1}, {"hi", 15}}}}},
                    {"tuner", genetic}};
  const Json tabular = {{"algorithm", "fqi_tabular"},
                        {"hyperparams", Json::object()},
                        {"space", {{"n_iterations", {{"type", "int"}, {"lo", 1}, {"hi", 30}}}}},
                        {"tuner", genetic}};
  const Json automatic = {{"variant", "automatic"},
                          {"index", {{"id", "discounted_return"}, {"n_episodes", 30}}},
                          {"subunits", Json::array({knn, tabular})}};
  const Json dg = {{"variant", "fixed"}, {"algorithm", "random_uniform"}, {"hyperparams", {{"n_episodes", 40}}}};
  Json stages = Json::array();
  stages.push_back({{"kind", "DataGeneration"}, {"unit", dg}});
  stages.push_back({{"kind", "PolicyGeneration"}, {"unit", automatic}});
  return {{"version", 1},
          {"pipeline", "offline"},
          {"environment", {{"type", "random_finite"}, {"n_states", 6}, {"n_actions", 3}, {"seed", mdp_seed}}},
          {"stages", stages},
          {"evaluation", {{"n_episodes", 100}, {"kind", "discounted"}}}};
}

Outcome criterion7() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto res = run_config(automatic_config(seed), 700 + seed);
    collect("criterion 7 seed " + std::to_string(seed), res);
    const auto& a = *res.stages.at(1).automatic;
    std::size_t argmax = a.subunits.size();
    double worst_member = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.subunits.size(); ++j) {
      const auto& sub = a.subunits[j];
      if (sub.ok() && !sub.reevaluation.failed &&
          (argmax == a.subunits.size() || sub.reevaluation.mean > a.subunits[argmax].reevaluation.mean)) {
        argmax = j;
      }
      if (sub.trace) {
        for (const auto& g : sub.trace->generations) {
          for (const auto& m : g.members) {
            if (!m.fitness.failed) worst_member = std::min(worst_member, m.fitness.mean);
          }
        }
      }
    }
    const double final_eval = res.evaluation->mean;
    const bool good = a.chosen == argmax && final_eval >= worst_member;
    ok = ok && good;
    detail += "seed " + std::to_string(seed) + ": chose " + a.subunits[a.chosen].algorithm + " (" +
              fmt(a.subunits[0].reevaluation.mean) + " vs " + fmt(a.subunits[1].reevaluation.mean) + "), final " +
              fmt(final_eval) + " >= worst member " + fmt(worst_member) + (good ? "" : " [fail]") + "; ";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 8

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

Outcome criterion8() {
  const fs::path work = fs::temp_directory_path() / "arlo_acceptance_determinism";
  fs::remove_all(work);
  bool ok = true;
  std::size_t n_configs = 0;
  std::string detail;
  std::ostringstream sink;
  for (const auto& entry : fs::directory_iterator(fs::path(ARLO_SOURCE_DIR) / "configs")) {
    if (!read_json_file(entry.path().string()).contains("version")) continue;
    ++n_configs;
    const std::string name = entry.path().stem().string();
    auto run_and_report = [&](std::uint64_t seed, const std::string& tag) {
      RunArgs a;
      a.config_path = entry.path().string();
      a.seed = seed;
      a.out = (work / (name + "_" + tag)).string();
      if (cmd_run(a, sink, sink) != 0 || cmd_report(*a.out, sink, sink) != 0) return std::map<std::string, std::string>{};
      return tree_contents(*a.out);
    };
    const auto first = run_and_report(17, "a");
    const auto second = run_and_report(17, "b");
    const auto other = run_and_report(18, "c");
    const bool identical = !first.empty() && first == second;
    bool has_trace = false, trace_differs = false;
    for (const auto& [path, content] : first) {
      if (path.rfind("traces/", 0) != 0) continue;
      has_trace = true;
      const auto it = other.find(path);
      trace_differs = trace_differs || it == other.end() || it->second != content;
    }
    const bool differs = has_trace ? trace_differs : first.at("result.json") != other.at("result.json");
    ok = ok && identical && differs;
    detail += name + ": " + std::to_string(first.size()) + " files " + (identical ? "identical" : "DIFFER") + ", other seed " +
              (differs ? "differs" : "SAME") + (has_trace ? " (trace)" : " (result)") + "; ";
  }
  fs::remove_all(work);
  return {ok && n_configs > 0, detail};
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  const LqgEnvironment env;
  const auto& space = env.spec().action_space;
  const auto m = static_cast<Eigen::Index>(space.dim());
  const auto n = static_cast<Eigen::Index>(env.spec().state_space.dim());
  RngStream draw(9009);
  const std::size_t fd_episodes = 20000, pg_episodes = 200000;
  const double step = 1e-4;
  double worst = 0.0;
  std::string detail;
  for (std::uint64_t i = 0; i < 5; ++i) {
    GaussianPolicyParams theta{Matrix(m, n), std::log(draw.uniform(0.3, 0.8))};
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) theta.gain(r, c) = draw.uniform(-0.5, 0.5);
    }
    // common random numbers: every perturbed policy replays the same stream
    const RngStream crn(9010, {i});
    auto value = [&](const GaussianPolicyParams& p) {
      const LinearGaussianPolicy pi(p.gain, p.log_std, space);
      return evaluate_policy(env, pi, fd_episodes, ReturnKind::discounted, crn).mean;
    };
    Vector fd(m * n + 1), pg(m * n + 1);
    for (Eigen::Index k = 0; k < m * n; ++k) {
      auto plus = theta, minus = theta;
      plus.gain.reshaped()[k] += step;
      minus.gain.reshaped()[k] -= step;
      fd[k] = (value(plus) - value(minus)) / (2 * step);
    }
    auto plus = theta, minus = theta;
    plus.log_std += step;
    minus.log_std -= step;
    fd[m * n] = (value(plus) - value(minus)) / (2 * step);

    const auto g = gpomdp_gradient(env, theta, pg_episodes, Baseline::mean, RngStream(9011, {i}));
    pg << g.gain.reshaped(), g.log_std;
    const double rel = (pg - fd).norm() / fd.norm();
    worst = std::max(worst, rel);
    detail += fmt(rel, 3) + " ";
  }
  return {worst <= 0.05, "relative errors " + detail + "(<= 0.05)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.insert(i);
  }
  // criterion 6 also audits the traces produced by the others, so it runs last
  std::vector<std::size_t> order;
  for (auto c : selected) {
    if (c != 6) order.push_back(c);
  }
  if (selected.count(6)) order.push_back(6);

  std::map<std::size_t, std::string> lines;
  bool all = true;
  for (auto c : order) {
    if (c < 1 || c > criteria.size()) {
      std::cerr << "unknown criterion " << c << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    lines[c] = "criterion " + std::to_string(c) + ": " + (o.pass ? "PASS" : "FAIL") + " [" + fmt(secs, 3) + " s] " + o.detail;
    std::cerr << lines[c] << std::endl;
  }
  for (const auto& [c, line] : lines) std::cout << line << "\n";
  return all ? 0 : 1;
}

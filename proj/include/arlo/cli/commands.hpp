#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "arlo/cli/config.hpp"
#include "arlo/cli/hash.hpp"
#include "arlo/core/dataset_io.hpp"
#include "arlo/envs/riccati.hpp"
#include "arlo/framework/run.hpp"

namespace arlo {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitRuntime = 3 };

namespace detail {

namespace fs = std::filesystem;

inline std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

/// Exact text form of a double (shortest round-trip digits).
inline std::string number_text(double x) { return Json(x).dump(); }

inline void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << content;
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& ex) {
    throw ConfigError(what + " is not valid JSON: " + ex.what());
  }
}

/// Files of a run, keyed by path relative to the run directory.
using FileSet = std::map<std::string, std::string>;

inline FileSet run_artifacts(const RunResult& res, const Json& resolved_config) {
  FileSet files;
  files["config.json"] = pretty(resolved_config);
  files["result.json"] = pretty(res.to_json());
  if (res.final_policy) files["policy.json"] = pretty(res.final_policy->to_json());
  for (std::size_t i = 0; i < res.stages.size(); ++i) {
    const auto& s = res.stages[i];
    if (s.trace) files[RunResult::trace_path(i)] = pretty(s.trace->to_json());
    if (s.automatic) {
      for (std::size_t j = 0; j < s.automatic->subunits.size(); ++j) {
        const auto& sub = s.automatic->subunits[j];
        if (sub.trace) files[RunResult::trace_path(i, j)] = pretty(sub.trace->to_json());
      }
    }
    if (s.dataset) {
      std::ostringstream os;
      write_dataset_jsonl(os, *s.dataset);
      files["datasets/stage" + std::to_string(i) + ".jsonl"] = os.str();
    }
  }
  return files;
}

inline Json manifest_of(const FileSet& files) {
  Json list = Json::array();
  for (const auto& [path, content] : files) {
    list.push_back({{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }
  return {{"files", list}};
}

}  // namespace detail

struct RunArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
};

/// Loads, validates and runs a configuration, then writes result.json,
/// config.json, policy.json, traces/, datasets/ and manifest.json.
inline int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  RunConfig cfg;
  StageIO input;
  Pipeline pipeline;
  std::string out_dir;
  try {
    Json raw = read_json_file(args.config_path);
    for (const auto& o : args.overrides) apply_override(raw, o);
    cfg = RunConfig::from_json(raw);
    if (args.seed) cfg.seed = args.seed;
    if (!cfg.seed) throw ConfigError("no seed given (use --seed or the config's seed field)");
    if (args.out) cfg.output = args.out;
    if (!cfg.output) throw ConfigError("no output directory given (use --out or the config's output field)");
    out_dir = *cfg.output;
    input.env = cfg.environment.make();
    if (cfg.dataset) {
      fs::path p(*cfg.dataset);
      if (p.is_relative()) p = fs::path(args.config_path).parent_path() / p;
      std::ifstream in(p);
      if (!in) throw ConfigError("cannot read dataset '" + p.string() + "'");
      auto d = std::make_shared<const Dataset>(read_dataset_jsonl(in));
      const auto& spec = input.env->spec();
      if (d->empty() || d->state_dim() != spec.state_space.dim() || d->action_dim() != spec.action_space.dim()) {
        throw ConfigError("dataset '" + p.string() + "' does not match the environment's state/action dimensions");
      }
      input.dataset = std::move(d);
    }
    pipeline = cfg.to_pipeline(*cfg.seed);
    const auto diags = validate_pipeline(pipeline, input.live());
    if (!diags.empty()) {
      err << "invalid pipeline:\n";
      for (const auto& d : diags) err << "  " << d << "\n";
      return kExitInvalid;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    err << "malformed input: " << e.what() << "\n";
    return kExitInvalid;
  }

  // The output location is not part of the run's identity.
  Json resolved = cfg.to_json();
  resolved.erase("output");
  RunOptions opts;
  opts.threads = cfg.threads;
  opts.run_id = sha256_hex(resolved.dump()).substr(0, 16);
  try {
    const auto res = run_pipeline(pipeline, input, RngStream(*cfg.seed), default_registry(), opts);
    auto files = detail::run_artifacts(res, resolved);
    const std::string manifest = detail::pretty(detail::manifest_of(files));
    for (const auto& [path, content] : files) detail::write_text(fs::path(out_dir) / path, content);
    detail::write_text(fs::path(out_dir) / "manifest.json", manifest);
    out << "run " << opts.run_id << " written to " << out_dir;
    if (res.evaluation) out << "; evaluation mean " << detail::number_text(res.evaluation->mean);
    out << "\n";
    return kExitOk;
  } catch (const StageFailed& e) {
    err << (e.config_cause() ? "config error: " : "runtime failure: ") << e.what() << "\n";
    return e.config_cause() ? kExitInvalid : kExitRuntime;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
}

/// Reference solution of an LQG (Riccati gains, closed-form and Monte-Carlo
/// returns) or finite environment (value-iteration Q-table). Accepts a run
/// config or a bare environment section.
inline int cmd_oracle(const std::string& config_path, std::size_t mc_episodes, std::uint64_t seed, std::ostream& out,
                      std::ostream& err) {
  try {
    const Json raw = read_json_file(config_path);
    const Json env_json = raw.is_object() && raw.contains("version") ? RunConfig::from_json(raw).environment.to_json() : raw;
    const auto spec = EnvironmentSpec::from_json(env_json);
    Json result;
    if (spec.lqg()) {
      const auto& p = *spec.lqg();
      const auto sol = riccati_solve(p);
      Json gains = Json::array();
      for (const auto& k : sol.gains) gains.push_back(matrix_to_json(k));
      LqgEnvironment env(p);
      const auto policy = riccati_policy(sol, env.spec().action_space);
      const auto mc = evaluate_policy(env, *policy, mc_episodes, ReturnKind::discounted, RngStream(seed));
      result = {{"environment", "lqg"},
                {"horizon", p.horizon},
                {"gains", gains},
                {"cost_matrix_0", matrix_to_json(sol.cost_matrices.front())},
                {"noise_offset_0", sol.noise_offsets.front()},
                {"closed_form_return", riccati_mean_return(sol, p)},
                {"monte_carlo_return", mc.to_json()},
                {"monte_carlo_seed", seed}};
    } else if (spec.finite()) {
      const auto& m = *spec.finite();
      Matrix q;
      std::size_t iters = 0;
      if (m.horizon) {
        iters = *m.horizon;
        q = value_iteration(m, iters);
      } else {
        std::tie(q, iters) = value_iteration_converged(m);
      }
      const Vector v = q.rowwise().maxCoeff();
      result = {{"environment", spec.type()},
                {"iterations", iters},
                {"q_table", matrix_to_json(q)},
                {"values", vector_to_json(v)},
                {"greedy_actions", greedy_actions(q)},
                {"optimal_return", m.mu0.dot(v)}};
    } else {
      err << "oracle: no reference solution for environment type '" << spec.type() << "'\n";
      return kExitInvalid;
    }
    out << result.dump(2) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    err << "malformed input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string fitness_text(const Fitness& f) { return f.failed ? "-inf" : number_text(f.mean); }

/// (generation, best_fitness) and (generation, agent, param_name, value,
/// fitness) tables of one trace.
inline std::pair<std::string, std::string> trace_tables(const TuningTrace& t) {
  std::string best = "generation,best_fitness\n";
  std::string scatter = "generation,agent,param_name,value,fitness\n";
  for (const auto& g : t.generations) {
    best += std::to_string(g.index) + "," + fitness_text(g.members.at(g.best_index).fitness) + "\n";
    for (std::size_t a = 0; a < g.members.size(); ++a) {
      const auto& m = g.members[a];
      for (const auto& [name, value] : m.assignment.values()) {
        scatter += std::to_string(g.index) + "," + std::to_string(a) + "," + csv_field(name) + "," +
                   csv_field(hyper_to_string(value)) + "," + fitness_text(m.fitness) + "\n";
      }
    }
  }
  return {best, scatter};
}

inline std::string assignment_text(const Json& h) {
  std::string s;
  for (const auto& [k, v] : h.items()) {
    if (!s.empty()) s += ", ";
    s += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return s.empty() ? "(none)" : s;
}

}  // namespace detail

/// Re-derives CSV tables from the traces of a run directory and writes a
/// plain-text summary, all under <run>/reports/.
inline int cmd_report(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const fs::path root(run_dir);
  try {
    if (!fs::exists(root / "manifest.json")) throw ConfigError("'" + run_dir + "' has no manifest.json");
    detail::parse_json_text(detail::read_text(root / "manifest.json"), "manifest.json");
    const Json result = detail::parse_json_text(detail::read_text(root / "result.json"), "result.json");

    detail::FileSet files;
    std::ostringstream summary;
    summary << "run " << result.at("run_id").get<std::string>() << " (" << result.at("pipeline_kind").get<std::string>()
            << " pipeline, seed " << result.at("seed").get<std::uint64_t>() << ")\n";

    auto add_trace = [&](const Json& ref, const std::string& stem) -> std::optional<TuningTrace> {
      if (ref.is_null()) return std::nullopt;
      const std::string path = ref.get<std::string>();
      if (!fs::exists(root / path)) throw ConfigError("missing trace '" + path + "'");
      auto trace = TuningTrace::from_json(detail::parse_json_text(detail::read_text(root / path), path));
      auto [best, scatter] = detail::trace_tables(trace);
      files["reports/" + stem + "_best_fitness.csv"] = best;
      files["reports/" + stem + "_hyperparams.csv"] = scatter;
      return trace;
    };

    const auto& stages = result.at("stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const auto& s = stages[i];
      const std::string stem = "stage" + std::to_string(i);
      summary << "stage " << i << " " << s.at("kind").get<std::string>() << ": " << s.at("unit_variant").get<std::string>()
              << " " << s.at("algorithm").get<std::string>() << "\n";
      summary << "  hyper-parameters: " << detail::assignment_text(s.at("chosen_hyperparams")) << "\n";
      if (auto t = add_trace(s.at("trace_ref"), stem)) {
        summary << "  best fitness " << detail::fitness_text(t->best_fitness) << " at generation " << t->best_generation
                << ", member " << t->best_member << " (" << t->generations.size() << " generations)\n";
      }
      if (s.contains("automatic")) {
        const auto& a = s.at("automatic");
        const auto chosen = a.at("chosen").get<std::size_t>();
        for (std::size_t j = 0; j < a.at("subunits").size(); ++j) {
          const auto& sub = a.at("subunits")[j];
          add_trace(sub.at("trace_ref"), stem + "_sub" + std::to_string(j));
          summary << "  subunit " << j << " " << sub.at("algorithm").get<std::string>() << (j == chosen ? " [chosen]" : "");
          if (sub.at("ok").get<bool>() && !sub.at("reevaluation").at("failed").get<bool>()) {
            summary << ": re-evaluated " << detail::number_text(sub.at("reevaluation").at("mean").get<double>());
          } else {
            summary << ": failed";
          }
          summary << "\n";
        }
      }
    }
    if (result.at("evaluation").is_null()) {
      summary << "evaluation: none\n";
    } else {
      const auto e = ReturnEstimate::from_json(result.at("evaluation"));
      summary << "evaluation: mean " << detail::number_text(e.mean) << ", std " << detail::number_text(e.std) << " over "
              << e.n_episodes << " episodes (" << to_string(e.kind) << " return)\n";
    }
    files["reports/summary.txt"] = summary.str();
    for (const auto& [path, content] : files) detail::write_text(root / path, content);
    for (const auto& [path, content] : files) out << path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "report error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Json::exception& e) {
    err << "report error: malformed run files: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace arlo

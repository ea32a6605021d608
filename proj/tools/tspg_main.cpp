// tspg: train, evaluate and analyze self-play policies.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspg/checkpoint.hpp"
#include "tspg/config.hpp"
#include "tspg/evaluation.hpp"
#include "tspg/training.hpp"

namespace fs = std::filesystem;
using namespace tspg;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> game;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  cmd->add_option("--game", o.game, "game id");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.overrides, "extra key=value override (repeatable)");
}

// Config file first, then flags.
RunConfig resolve(const CommonOptions& o, const std::vector<std::pair<std::string, std::string>>& flags) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_run_config(o.config_path, cfg);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.game) cfg.train.game = *o.game;
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
  return cfg;
}

void log_config(const RunConfig& cfg, const fs::path& dir) {
  const std::string text = describe(cfg);
  std::cout << "# resolved config\n" << text << std::flush;
  std::ofstream(dir / "config.txt") << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int cmd_train(const CommonOptions& o, std::optional<int> games, std::optional<int> iterations) {
  std::vector<std::pair<std::string, std::string>> flags;
  if (games) flags.emplace_back("games", std::to_string(*games));
  if (iterations) flags.emplace_back("iterations", std::to_string(*iterations));
  RunConfig cfg = resolve(o, flags);
  validate_run_config(cfg);

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  log_config(cfg, dir);

  std::ofstream log(dir / "train_log.csv");
  std::ofstream search_log;
  if (cfg.search_log) {
    search_log.open(dir / "search_log.csv");
    search_log << "move,iterations,root_value,top1,top2,top3\n";
  }
  TrainHooks hooks;
  hooks.log = &log;
  hooks.search_log = cfg.search_log ? &search_log : nullptr;
  hooks.on_checkpoint = [&](const Checkpoint& ck) {
    const fs::path path = dir / (std::to_string(ck.games_played) + ".ckpt");
    save_checkpoint(path.string(), ck);
    std::cout << "checkpoint " << path.string() << " features=" << ck.features.size() << "\n"
              << std::flush;
  };
  train(cfg.train, hooks);
  return 0;
}

struct EvaluateOptions {
  std::vector<std::string> checkpoints;
  std::optional<std::string> agent_a, agent_b;
  std::optional<int> games, iterations, threads;
  bool sample = false;
  std::vector<std::string> observe;
};

int cmd_evaluate(const CommonOptions& o, const EvaluateOptions& e) {
  std::vector<std::pair<std::string, std::string>> flags;
  if (e.agent_a) flags.emplace_back("agent_a", *e.agent_a);
  if (e.agent_b) flags.emplace_back("agent_b", *e.agent_b);
  if (e.games) flags.emplace_back("eval_games", std::to_string(*e.games));
  if (e.iterations) flags.emplace_back("eval_iterations", std::to_string(*e.iterations));
  if (e.threads) flags.emplace_back("threads", std::to_string(*e.threads));
  if (e.sample) flags.emplace_back("greedy", "false");
  RunConfig cfg = resolve(o, flags);

  std::vector<Checkpoint> cks;
  for (const auto& path : e.checkpoints) cks.push_back(load_checkpoint(path));
  if (!cks.empty()) {
    if (cfg.train.game.empty()) {
      cfg.train.game = cks.front().game_id;
      cfg.train.game_options = cks.front().game_options;
    }
    for (const auto& ck : cks) {
      if (ck.game_id != cfg.train.game) {
        throw UsageError("checkpoint for '" + ck.game_id + "' does not match game '" +
                         cfg.train.game + "'");
      }
    }
  }
  validate_run_config(cfg);
  const auto game = make_game(cfg.train.game, cfg.train.game_options);

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  log_config(cfg, dir);

  std::string match_csv = "repetition,game,a_seat,length,winner\n";
  std::string moves_csv = "repetition,game,turn,length,source,label,n_actions,entropy,distribution\n";
  std::vector<double> win_pcts;
  int total = 0, wins_a = 0, wins_b = 0, draws = 0;
  const std::size_t reps = cks.empty() ? 1 : cks.size();
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const Checkpoint* ck = cks.empty() ? nullptr : &cks[rep];
    const AgentSpec a = make_agent(cfg.agent_a, ck, cfg);
    const AgentSpec b = make_agent(cfg.agent_b, ck, cfg);
    MatchOptions mo;
    mo.move_cap = cfg.train.move_cap;
    mo.threads = cfg.threads;
    for (const auto& name : e.observe) {
      if (!ck) throw UsageError("--observe needs --checkpoint");
      const auto spec = make_agent("policy:" + name, ck, cfg);
      mo.observers.push_back({"policy:" + name, std::get<RawPolicyAgent>(spec).policy, ck->features});
    }
    const MatchResult r =
        play_match(a, b, *game, cfg.eval_games, cfg.train.seed + rep, mo);
    win_pcts.push_back(r.win_percentage_a());
    total += r.games;
    wins_a += r.wins_a;
    wins_b += r.wins_b;
    draws += r.draws;
    for (std::size_t g = 0; g < r.records.size(); ++g) {
      const MatchGame& mg = r.records[g];
      const std::string prefix = std::to_string(rep) + "," + std::to_string(g) + ",";
      match_csv += prefix + (mg.a_is_p1 ? "P1" : "P2") + "," + std::to_string(mg.length) + "," +
                   (mg.winner == 0 ? "a" : mg.winner == 1 ? "b" : "draw") + "\n";
      for (const MoveRecord& m : mg.moves) {
        const auto row = [&](const std::string& source, const std::string& label,
                             const std::vector<double>& d) {
          std::string dist;
          for (double p : d) dist += (dist.empty() ? "" : " ") + fmt9(p);
          moves_csv += prefix + std::to_string(m.turn) + "," + std::to_string(mg.length) + "," +
                       source + "," + label + "," + std::to_string(d.size()) + "," +
                       fmt9(normalized_entropy(d)) + "," + dist + "\n";
        };
        row(m.actor == 0 ? "a" : "b", m.actor == 0 ? cfg.agent_a : cfg.agent_b, m.distribution);
        for (std::size_t k = 0; k < m.observed.size(); ++k) {
          row("observer", r.observer_labels[k], m.observed[k]);
        }
      }
    }
    std::cout << "repetition " << rep << ": " << cfg.agent_a << " win% " << fmt9(win_pcts.back())
              << " (" << r.wins_a << "/" << r.wins_b << "/" << r.draws << ")\n";
  }
  write_file(dir / "match.csv", match_csv);
  write_file(dir / "moves.csv", moves_csv);

  Rng rng(cfg.train.seed);
  const auto [lo, hi] = bootstrap_ci(win_pcts, cfg.confidence, cfg.bootstrap_resamples, rng);
  const double pooled = 100.0 * (wins_a + 0.5 * draws) / total;
  std::string summary;
  summary += "agent_a = " + cfg.agent_a + "\n";
  summary += "agent_b = " + cfg.agent_b + "\n";
  summary += "repetitions = " + std::to_string(reps) + "\n";
  summary += "games = " + std::to_string(total) + "\n";
  summary += "wins_a = " + std::to_string(wins_a) + "\n";
  summary += "wins_b = " + std::to_string(wins_b) + "\n";
  summary += "draws = " + std::to_string(draws) + "\n";
  summary += "win_percentage_a = " + fmt9(pooled) + "\n";
  summary += "ci_low = " + fmt9(lo) + "\n";
  summary += "ci_high = " + fmt9(hi) + "\n";
  summary += "confidence = " + fmt9(cfg.confidence) + "\n";
  write_file(dir / "summary.txt", summary);
  std::cout << summary;
  return 0;
}

struct AnalyzeOptions {
  std::string matches;
  std::string checkpoint;
  std::optional<int> bins;
};

int cmd_analyze(const CommonOptions& o, const AnalyzeOptions& an) {
  if (an.matches.empty() && an.checkpoint.empty()) {
    throw UsageError("analyze needs --matches and/or --checkpoint");
  }
  std::vector<std::pair<std::string, std::string>> flags;
  if (an.bins) flags.emplace_back("entropy_bins", std::to_string(*an.bins));
  RunConfig cfg = resolve(o, flags);
  if (cfg.entropy_bins < 1) throw ConfigError("entropy_bins must be at least 1");
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  log_config(cfg, dir);

  if (!an.matches.empty()) {
    const fs::path moves = fs::path(an.matches) / "moves.csv";
    std::ifstream f(moves);
    if (!f) throw std::runtime_error("no match records in " + an.matches + " (moves.csv missing)");
    std::string line;
    std::getline(f, line);
    // label -> samples, in first-seen order
    std::vector<std::pair<std::string, std::vector<EntropySample>>> series;
    std::map<std::string, std::size_t> index;
    std::size_t rows = 0;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto cols = split(line, ',');
      if (cols.size() < 8) throw std::runtime_error("malformed row in " + moves.string());
      const std::string key = cols[4] + "," + cols[5];
      auto [it, inserted] = index.emplace(key, series.size());
      if (inserted) series.push_back({key, {}});
      const double t = std::stod(cols[2]) / std::stod(cols[3]);
      series[it->second].second.push_back({t, std::stod(cols[7])});
      ++rows;
    }
    if (rows == 0) throw std::runtime_error("no match records in " + an.matches);
    std::string out = "source,label,bin_center,mean,stddev,count\n";
    for (const auto& [key, samples] : series) {
      for (const auto& b : entropy_profile(samples, cfg.entropy_bins).bins) {
        out += key + "," + fmt9(b.center) + "," + fmt9(b.mean) + "," + fmt9(b.stddev) + "," +
               std::to_string(b.count) + "\n";
      }
    }
    write_file(dir / "entropy.csv", out);
    std::cout << "wrote " << (dir / "entropy.csv").string() << "\n";
  }
  if (!an.checkpoint.empty()) {
    const WeightExport ex = weight_distribution_export(load_checkpoint(an.checkpoint));
    write_file(dir / "weights.csv", ex.csv());
    write_file(dir / "weights_summary.txt", ex.summary_text());
    std::cout << "wrote " << (dir / "weights.csv").string() << "\n" << ex.summary_text();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-play Expert Iteration with cross-entropy and TSPG policy objectives"};
  app.require_subcommand(1);

  CommonOptions common;
  std::optional<int> train_games, train_iterations;
  auto* train_cmd = app.add_subcommand("train", "run self-play training and write checkpoints");
  add_common(train_cmd, common);
  train_cmd->add_option("--games", train_games, "number of self-play games");
  train_cmd->add_option("--iterations", train_iterations, "MCTS iterations per move");

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "play matches between two agents");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--checkpoint", eval.checkpoints, "checkpoint per repetition (repeatable)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--a", eval.agent_a, "first agent, e.g. policy:tspg, mcts:ce/ce_double, uct");
  eval_cmd->add_option("--b", eval.agent_b, "second agent");
  eval_cmd->add_option("--games", eval.games, "games per repetition");
  eval_cmd->add_option("--iterations", eval.iterations, "MCTS iterations per move");
  eval_cmd->add_option("--threads", eval.threads, "worker threads");
  eval_cmd->add_flag("--sample", eval.sample, "raw policies sample instead of acting greedily");
  eval_cmd->add_option("--observe", eval.observe, "record distributions of ce/tspg/ce_double");

  AnalyzeOptions an;
  auto* analyze_cmd = app.add_subcommand("analyze", "entropy profiles and weight distributions");
  add_common(analyze_cmd, common);
  analyze_cmd->add_option("--matches", an.matches, "directory written by evaluate");
  analyze_cmd->add_option("--checkpoint", an.checkpoint, "checkpoint to export weights from");
  analyze_cmd->add_option("--bins", an.bins, "entropy bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(common, train_games, train_iterations);
    if (eval_cmd->parsed()) return cmd_evaluate(common, eval);
    return cmd_analyze(common, an);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// Acceptance suite: one PASS/FAIL line per criterion, then a summary line.
//
//   tspg_acceptance [--quick] [--expect-fail 3,4]
//
// --quick shrinks every protocol so the whole run takes seconds; verdicts from
// a quick run are not meaningful. Criteria listed in --expect-fail still print
// FAIL but are not counted in the exit status, which is the number of
// unexpected failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tspg/checkpoint.hpp"
#include "tspg/evaluation.hpp"
#include "tspg/minimax.hpp"
#include "tspg/policy.hpp"
#include "tspg/search.hpp"
#include "tspg/training.hpp"

namespace {

using namespace tspg;

// Pinned tolerances and protocol sizes.
constexpr int kGradientInstances = 1000;
constexpr double kLossGradientTol = 1e-5;
constexpr double kSoftmaxGradientTol = 1e-6;
constexpr double kFiniteDifferenceStep = 1e-5;

constexpr int kUctIterations = 5000;
constexpr double kUctOptimalFraction = 0.95;
constexpr int kRootIterations = 20000;
constexpr double kRootValueTol = 0.15;

constexpr int kDeskGames = 50;
constexpr int kDeskIterations = 400;
constexpr int kRepetitions = 3;
constexpr int kPolicyEvalGames = 100;
constexpr double kFinalTspgWinPct = 55.0;
constexpr double kLaterTspgWinPct = 50.0;
constexpr int kLaterCheckpoint = 25;

constexpr int kMctsEvalGames = 40;
constexpr double kConnect4MctsWinPct = 60.0;
constexpr double kYavalathMctsWinPct = 85.0;

constexpr int kEntropyBins = 20;
constexpr double kEntropyFrom = 1.0 / 3.0;

constexpr double kPathologyTspgMax = 1e-3;
constexpr double kPathologyCeMin = 1e-1;

struct Protocol {
  int gradient_instances = kGradientInstances;
  int uct_iterations = kUctIterations;
  std::size_t uct_state_limit = 0;  // 0 = all states
  int root_iterations = kRootIterations;
  int desk_games = kDeskGames;
  int desk_iterations = kDeskIterations;
  int repetitions = kRepetitions;
  int policy_eval_games = kPolicyEvalGames;
  int mcts_eval_games = kMctsEvalGames;
  std::vector<int> checkpoints = {1, 25, 50};
};

Protocol quick_protocol() {
  Protocol p;
  p.gradient_instances = 50;
  p.uct_iterations = 300;
  p.uct_state_limit = 200;
  p.root_iterations = 2000;
  p.desk_games = 4;
  p.desk_iterations = 40;
  p.repetitions = 2;
  p.policy_eval_games = 10;
  p.mcts_eval_games = 4;
  p.checkpoints = {1, 2, 4};
  return p;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------

Verdict loss_gradients(const Protocol& p) {
  Rng rng(1001);
  double worst_ce = 0.0, worst_tspg = 0.0;
  for (int n = 0; n < p.gradient_instances; ++n) {
    const auto x = oracle::random_instance(rng);
    const ExperienceEntry e = oracle::to_entry(x);
    const PolicySpec pol = oracle::to_policy(x);
    const std::vector<ExperienceEntry> batch = {e};
    const auto ce = ce_gradient(pol, e);
    const auto tg = tspg_gradient(pol, batch);
    for (std::size_t i = 0; i < x.theta.size(); ++i) {
      const double fd_ce = oracle::central_difference(
          [&](const std::vector<double>& th) { return oracle::cross_entropy(x, th); }, x.theta, i,
          kFiniteDifferenceStep);
      const double fd_v = oracle::central_difference(
          [&](const std::vector<double>& th) { return oracle::expected_value(x, th); }, x.theta, i,
          kFiniteDifferenceStep);
      worst_ce = std::max(worst_ce, oracle::relative_error(ce[i], fd_ce));
      worst_tspg = std::max(worst_tspg, oracle::relative_error(tg[i], fd_v));
    }
  }
  return {worst_ce < kLossGradientTol && worst_tspg < kLossGradientTol,
          std::to_string(p.gradient_instances) + " instances, worst relative error ce " +
              fmt("%.2e", worst_ce) + ", tspg " + fmt("%.2e", worst_tspg)};
}

// 2 -------------------------------------------------------------------------

Verdict softmax_gradient(const Protocol& p) {
  Rng rng(1002);
  double worst = 0.0;
  for (int n = 0; n < p.gradient_instances; ++n) {
    const auto x = oracle::random_instance(rng);
    const auto f = oracle::sparse(x);
    for (std::size_t a = 0; a < x.phi.size(); ++a) {
      const auto g = probability_gradient(oracle::to_policy(x), f, a);
      for (std::size_t i = 0; i < x.theta.size(); ++i) {
        const double fd = oracle::central_difference(
            [&](const std::vector<double>& th) { return oracle::dense_softmax(x.phi, th)[a]; },
            x.theta, i, kFiniteDifferenceStep);
        worst = std::max(worst, oracle::relative_error(g[i], fd));
      }
    }
  }
  return {worst < kSoftmaxGradientTol, std::to_string(p.gradient_instances) +
                                           " instances, every action, worst relative error " +
                                           fmt("%.2e", worst)};
}

// 3 -------------------------------------------------------------------------

std::vector<GameState> reachable_states(const Game& g) {
  std::vector<GameState> out;
  std::set<std::string> seen;
  std::vector<GameState> stack{g.initial_state()};
  while (!stack.empty()) {
    const GameState s = stack.back();
    stack.pop_back();
    if (s.is_terminal() || !seen.insert(g.to_text(s)).second) continue;
    out.push_back(s);
    for (Action a : g.legal_actions(s)) stack.push_back(g.apply(s, a));
  }
  return out;
}

Verdict uct_oracle(const Protocol& p) {
  auto g = make_game("tictactoe");
  MinimaxSolver solver(*g);
  auto states = reachable_states(*g);
  const std::size_t total = states.size();
  if (p.uct_state_limit && states.size() > p.uct_state_limit) states.resize(p.uct_state_limit);

  SearchConfig c;
  c.iterations = p.uct_iterations;
  c.selection = SelectionRule::kUcb1;
  c.exploration = std::sqrt(2.0);
  Rng rng(1003);
  int optimal = 0, win_states = 0, win_optimal = 0;
  for (const GameState& s : states) {
    const auto r = run_search(*g, s, FeatureSet{}, nullptr, c, {}, rng);
    const auto best = static_cast<std::size_t>(
        std::max_element(r.visit_counts.begin(), r.visit_counts.end()) - r.visit_counts.begin());
    const auto opt = solver.optimal_actions(s);
    const bool ok = std::find(opt.begin(), opt.end(), best) != opt.end();
    optimal += ok;
    bool win_in_one = false;
    for (Action a : r.actions) {
      const GameState next = g->apply(s, a);
      if (next.is_terminal() && next.outcome()->utility(s.mover()) == 1) win_in_one = true;
    }
    if (win_in_one) {
      ++win_states;
      win_optimal += ok;
    }
  }
  const double frac = static_cast<double>(optimal) / states.size();

  SearchConfig root_cfg = c;
  root_cfg.iterations = p.root_iterations;
  Rng root_rng(1004);
  const double root =
      run_search(*g, g->initial_state(), FeatureSet{}, nullptr, root_cfg, {}, root_rng).root_value;

  const bool moves_ok = frac >= kUctOptimalFraction && win_optimal == win_states;
  const bool root_ok = std::abs(root) <= kRootValueTol;
  return {moves_ok && root_ok,
          std::to_string(states.size()) + "/" + std::to_string(total) + " states, optimal " +
              fmt("%.4f", frac) + ", win-in-1 " + std::to_string(win_optimal) + "/" +
              std::to_string(win_states) + (moves_ok ? " ok" : " LOW") + "; root value at " +
              std::to_string(p.root_iterations) + " iterations " + fmt("%+.4f", root) +
              (root_ok ? " ok" : " OUTSIDE +-0.15")};
}

// Desk-scale training shared by 4-7 and 9 ------------------------------------

struct DeskRuns {
  // game -> repetition -> checkpoints in order
  std::map<std::string, std::vector<std::vector<Checkpoint>>> runs;
};

TrainConfig desk_config(const Protocol& p, const std::string& game, int rep) {
  TrainConfig cfg;
  cfg.game = game;
  cfg.games = p.desk_games;
  cfg.mcts_iterations = p.desk_iterations;
  cfg.checkpoints = p.checkpoints;
  cfg.seed = static_cast<std::uint64_t>(rep + 1);
  return cfg;
}

DeskRuns desk_training(const Protocol& p) {
  DeskRuns d;
  for (const char* game : {"connect4", "yavalath"}) {
    for (int rep = 0; rep < p.repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      d.runs[game].push_back(train(desk_config(p, game, rep)));
      std::printf("  trained %s repetition %d (%.1fs)\n", game, rep, seconds_since(t0));
      std::fflush(stdout);
    }
  }
  return d;
}

RawPolicyAgent raw(const PolicySpec& policy, const Checkpoint& ck, bool greedy) {
  return RawPolicyAgent{policy, ck.features, greedy};
}

// 4 -------------------------------------------------------------------------

struct CurvePoint {
  int games_played = 0;
  double win_pct = 0.0;
};

std::vector<CurvePoint> tspg_curve(const Protocol& p, const std::vector<std::vector<Checkpoint>>& reps,
                                   const Game& g, bool greedy) {
  std::vector<CurvePoint> curve;
  const std::size_t n_ck = reps.front().size();
  for (std::size_t k = 0; k < n_ck; ++k) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const Checkpoint& ck = reps[r][k];
      MatchOptions o;
      o.record_moves = false;
      sum += play_match(raw(ck.params.tspg_policy(), ck, greedy), raw(ck.params.ce_policy(), ck, greedy),
                        g, p.policy_eval_games, 4000 + 100 * r + k, o)
                 .win_percentage_a();
    }
    curve.push_back({reps.front()[k].games_played, sum / reps.size()});
  }
  return curve;
}

std::string curve_text(const std::vector<CurvePoint>& c) {
  std::string out;
  for (const auto& pt : c) out += (out.empty() ? "" : " ") + std::to_string(pt.games_played) + ":" + fmt("%.1f", pt.win_pct);
  return out;
}

bool curve_ok(const std::vector<CurvePoint>& c, int later_from) {
  if (c.back().win_pct <= kFinalTspgWinPct) return false;
  for (const auto& pt : c)
    if (pt.games_played >= later_from && pt.win_pct < kLaterTspgWinPct) return false;
  return true;
}

Verdict tspg_beats_ce(const Protocol& p, const DeskRuns& d) {
  const int later_from = std::min(kLaterCheckpoint, p.checkpoints[1]);
  bool pass = true;
  std::string detail;
  for (const auto& [game, reps] : d.runs) {
    auto g = make_game(game);
    const auto greedy = tspg_curve(p, reps, *g, true);
    const auto sampled = tspg_curve(p, reps, *g, false);
    const bool ok = curve_ok(greedy, later_from);
    pass = pass && ok;
    detail += game + " greedy [" + curve_text(greedy) + "]" + (ok ? "" : " MISS") +
              " (sampled, not scored: [" + curve_text(sampled) + "]); ";
  }
  return {pass, detail};
}

// 5 and 6 -------------------------------------------------------------------

struct MctsVsUct {
  double win_pct = 0.0;
  std::vector<MatchResult> matches;
};

MctsVsUct biased_vs_uct(const Protocol& p, const std::vector<std::vector<Checkpoint>>& reps,
                        const Game& g) {
  MctsVsUct out;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Checkpoint& ck = reps[r].back();
    MatchOptions o;
    o.observers = {{"policy:ce", ck.params.ce_policy(), ck.features},
                   {"policy:tspg", ck.params.tspg_policy(), ck.features}};
    const auto biased = biased_mcts_agent(ck.params.ce_policy(), ck.params.ce_double_policy(),
                                          ck.features, p.desk_iterations);
    const auto t0 = std::chrono::steady_clock::now();
    out.matches.push_back(play_match(biased, uct_agent(p.desk_iterations), g, p.mcts_eval_games,
                                     5000 + r, o));
    std::printf("  %s biased mcts vs uct repetition %zu: %.1f%% (%.1fs)\n", std::string(g.id()).c_str(), r,
                out.matches.back().win_percentage_a(), seconds_since(t0));
    std::fflush(stdout);
    out.win_pct += out.matches.back().win_percentage_a();
  }
  out.win_pct /= reps.size();
  return out;
}

Verdict mcts_beats_uct(const std::map<std::string, MctsVsUct>& results) {
  const double c4 = results.at("connect4").win_pct;
  const double yv = results.at("yavalath").win_pct;
  const bool c4_ok = c4 >= kConnect4MctsWinPct;
  const bool yv_ok = yv >= kYavalathMctsWinPct;
  return {c4_ok && yv_ok, "connect4 " + fmt("%.1f", c4) + "% (need 60)" + (c4_ok ? "" : " MISS") +
                              ", yavalath " + fmt("%.1f", yv) + "% (need 85)" + (yv_ok ? "" : " MISS")};
}

double late_mean(const std::vector<EntropySample>& samples) {
  const auto profile = entropy_profile(samples, kEntropyBins);
  double sum = 0.0;
  int n = 0;
  for (const auto& b : profile.bins) {
    if (b.center < kEntropyFrom) continue;
    sum += b.mean;
    ++n;
  }
  return n ? sum / n : std::nan("");
}

Verdict entropy_ordering(const MctsVsUct& c4) {
  std::vector<EntropySample> uct, ce, biased, tspg;
  for (const auto& m : c4.matches) {
    auto append = [](std::vector<EntropySample>& to, std::vector<EntropySample> from) {
      to.insert(to.end(), from.begin(), from.end());
    };
    append(biased, actor_entropy_samples(m, 0));
    append(uct, actor_entropy_samples(m, 1));
    append(ce, observer_entropy_samples(m, 0));
    append(tspg, observer_entropy_samples(m, 1));
  }
  const double u = late_mean(uct), c = late_mean(ce), b = late_mean(biased), t = late_mean(tspg);
  const bool pass = u > c && c > b && b > t;
  return {pass, "connect4 mean entropy over bins from game time 1/3: uct " + fmt("%.4f", u) +
                    ", policy:ce " + fmt("%.4f", c) + ", biased mcts " + fmt("%.4f", b) +
                    ", policy:tspg " + fmt("%.4f", t)};
}

// 7 -------------------------------------------------------------------------

Verdict weight_spread(const DeskRuns& d) {
  bool pass = true;
  std::string detail;
  for (const auto& [game, reps] : d.runs) {
    std::vector<double> ce, combined;
    for (const auto& rep : reps) {
      const auto ex = weight_distribution_export(rep.back());
      ce.insert(ce.end(), ex.series[0].second.begin(), ex.series[0].second.end());
      combined.insert(combined.end(), ex.series[1].second.begin(), ex.series[1].second.end());
    }
    const auto a = summarize_weights("ce", ce);
    const auto b = summarize_weights("ce+tspg", combined);
    const bool ok = b.stddev > a.stddev && b.near_zero_fraction < a.near_zero_fraction;
    pass = pass && ok;
    detail += game + " std " + fmt("%.3f", a.stddev) + " -> " + fmt("%.3f", b.stddev) +
              ", near-zero " + fmt("%.3f", a.near_zero_fraction) + " -> " +
              fmt("%.3f", b.near_zero_fraction) + (ok ? "" : " MISS") + "; ";
  }
  return {pass, detail};
}

// 8 -------------------------------------------------------------------------

Verdict saturation_pathology() {
  // Action 0 wins; it carries a heavily penalised general feature and a new,
  // still-zero specific feature. The other actions are neutral.
  ExperienceEntry e;
  e.features = {{{0, 1}, 2}, {{}, 2}, {{}, 2}, {{}, 2}};
  e.actions.resize(4);
  e.visit_distribution.probabilities = {0.9, 0.1 / 3, 0.1 / 3, 0.1 / 3};
  e.q_values = {1.0, 0.0, 0.0, 0.0};
  const PolicySpec pol{ParameterVector(std::vector<double>{-10.0, 0.0}), std::nullopt};
  const std::vector<ExperienceEntry> batch = {e};
  const double t = std::abs(tspg_gradient(pol, batch)[1]);
  const double c = std::abs(ce_gradient(pol, e)[1]);

  // Same instance through the dense oracle.
  oracle::Instance x;
  x.phi = {{1, 1}, {0, 0}, {0, 0}, {0, 0}};
  x.theta = {-10.0, 0.0};
  x.target = e.visit_distribution.probabilities;
  x.q = e.q_values;
  const double t_fd = std::abs(oracle::central_difference(
      [&](const std::vector<double>& th) { return oracle::expected_value(x, th); }, x.theta, 1,
      kFiniteDifferenceStep));
  const double c_fd = std::abs(oracle::central_difference(
      [&](const std::vector<double>& th) { return oracle::cross_entropy(x, th); }, x.theta, 1,
      kFiniteDifferenceStep));
  const bool agree = oracle::relative_error(t, t_fd) < kLossGradientTol &&
                     oracle::relative_error(c, c_fd) < kLossGradientTol;
  return {t < kPathologyTspgMax && c > kPathologyCeMin && agree,
          "new-feature gradient magnitude tspg " + fmt("%.3e", t) + ", ce " + fmt("%.3e", c) +
              (agree ? ", oracle agrees" : ", ORACLE DISAGREES")};
}

// 9 -------------------------------------------------------------------------

Verdict determinism(const Protocol& p, const DeskRuns& d) {
  int compared = 0, identical = 0;
  for (const auto& [game, reps] : d.runs) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto again = train(desk_config(p, game, static_cast<int>(r)));
      for (std::size_t k = 0; k < again.size() && k < reps[r].size(); ++k) {
        ++compared;
        identical += serialize_checkpoint(again[k]) == serialize_checkpoint(reps[r][k]);
      }
      compared += static_cast<int>(std::max(again.size(), reps[r].size()) -
                                   std::min(again.size(), reps[r].size()));
    }
  }
  return {compared > 0 && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " checkpoints byte-identical on rerun"};
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  std::set<int> expected_failures;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string id; std::getline(list, id, ',');) expected_failures.insert(std::stoi(id));
    } else {
      std::fprintf(stderr, "usage: %s [--quick] [--expect-fail 3,4]\n", argv[0]);
      return 64;
    }
  }
  const Protocol p = quick ? quick_protocol() : Protocol{};
  if (quick) std::printf("quick protocol: verdicts are not meaningful\n");

  int passed = 0, reported = 0, unexpected = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = run();
    ++reported;
    passed += v.pass;
    const bool expected = expected_failures.count(id) > 0;
    if (!v.pass && !expected) ++unexpected;
    std::printf("criterion %d %s: %s%s  %s (%.1fs)\n", id, name, v.pass ? "PASS" : "FAIL",
                v.pass || !expected ? "" : " (known)", v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "loss-gradients", [&] { return loss_gradients(p); });
  report(2, "softmax-gradient", [&] { return softmax_gradient(p); });
  report(3, "uct-oracle", [&] { return uct_oracle(p); });

  std::printf("  desk-scale training: %d games, %d iterations, %d repetitions\n", p.desk_games,
              p.desk_iterations, p.repetitions);
  const DeskRuns desk = desk_training(p);
  report(4, "tspg-vs-ce-curve", [&] { return tspg_beats_ce(p, desk); });

  std::map<std::string, MctsVsUct> mcts;
  for (const auto& [game, reps] : desk.runs) mcts[game] = biased_vs_uct(p, reps, *make_game(game));
  report(5, "biased-mcts-vs-uct", [&] { return mcts_beats_uct(mcts); });
  report(6, "entropy-ordering", [&] { return entropy_ordering(mcts.at("connect4")); });
  report(7, "weight-spread", [&] { return weight_spread(desk); });
  report(8, "saturation-pathology", [&] { return saturation_pathology(); });
  report(9, "determinism", [&] { return determinism(p, desk); });

  std::printf("acceptance complete: %d/%d criteria passed, %d known failures, %d unexpected\n",
              passed, reported, reported - passed - unexpected, unexpected);
  return unexpected;
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "tspg/checkpoint.hpp"
#include "tspg/config.hpp"
#include "tspg/evaluation.hpp"
#include "tspg/policy.hpp"
#include "tspg/search.hpp"
#include "tspg/training.hpp"

namespace py = pybind11;
using namespace tspg;

namespace {

std::vector<double> to_vector(const ParameterVector& p) {
  const auto v = p.values();
  return {v.begin(), v.end()};
}

std::shared_ptr<Game> game_for(const std::string& id, int hex_size) {
  GameOptions o;
  o.hex_size = hex_size;
  return std::shared_ptr<Game>(make_game(id, o));
}

py::dict search(const Game& game, const GameState& state, int iterations, double exploration,
                const std::string& selection, std::uint64_t seed) {
  SearchConfig c;
  c.iterations = iterations;
  c.exploration = exploration;
  if (selection == "ucb1") {
    c.selection = SelectionRule::kUcb1;
  } else if (selection != "puct") {
    throw py::value_error("selection must be 'puct' or 'ucb1'");
  }
  Rng rng(seed);
  const auto r = run_search(game, state, FeatureSet{}, nullptr, c, {}, rng);
  py::dict out;
  out["actions"] = r.actions;
  out["visit_counts"] = r.visit_counts;
  out["visit_distribution"] = r.visit_distribution.probabilities;
  out["q_estimates"] = r.q_estimates;
  out["root_value"] = r.root_value;
  return out;
}

// One experience entry built from dense 0/1 rows, for gradient checks.
ExperienceEntry dense_entry(const std::vector<std::vector<int>>& phi,
                            const std::vector<double>& target, const std::vector<double>& q) {
  if (phi.empty()) throw py::value_error("no actions");
  ExperienceEntry e;
  const int d = static_cast<int>(phi.front().size());
  for (const auto& row : phi) {
    if (static_cast<int>(row.size()) != d) throw py::value_error("ragged feature rows");
    SparseFeatureVector v;
    v.dimension = d;
    for (int i = 0; i < d; ++i)
      if (row[static_cast<std::size_t>(i)]) v.active.push_back(i);
    e.features.push_back(std::move(v));
  }
  e.actions.resize(phi.size());
  e.visit_distribution.probabilities = target;
  e.q_values = q;
  return e;
}

py::dict match(const std::string& agent_a, const std::string& agent_b, const std::string& game_id,
               int games, std::uint64_t seed, const std::optional<Checkpoint>& checkpoint,
               int iterations, int hex_size) {
  RunConfig cfg;
  cfg.train.game = game_id;
  cfg.train.game_options.hex_size = hex_size;
  cfg.eval_iterations = iterations;
  const Checkpoint* ck = checkpoint ? &*checkpoint : nullptr;
  const auto game = make_game(game_id, cfg.train.game_options);
  MatchOptions o;
  o.record_moves = false;
  MatchResult r;
  {
    py::gil_scoped_release release;
    r = play_match(make_agent(agent_a, ck, cfg), make_agent(agent_b, ck, cfg), *game, games, seed, o);
  }
  py::dict out;
  out["games"] = r.games;
  out["wins_a"] = r.wins_a;
  out["wins_b"] = r.wins_b;
  out["draws"] = r.draws;
  out["win_percentage_a"] = r.win_percentage_a();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-play policy training with tree-search value targets";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("known_games", &known_games);

  py::class_<Action>(m, "Action")
      .def_readonly("source", &Action::from)
      .def_readonly("target", &Action::to)
      .def("__eq__", [](const Action& a, const Action& b) { return a == b; })
      .def("__hash__", [](const Action& a) { return (a.from + 1) * 65536 + a.to; })
      .def("__repr__", [](const Action& a) {
        return "Action(" + std::to_string(a.from) + ", " + std::to_string(a.to) + ")";
      });

  py::class_<GameState>(m, "GameState")
      .def_property_readonly("mover", [](const GameState& s) { return index_of(s.mover()); })
      .def_property_readonly("move_count", &GameState::move_count)
      .def_property_readonly("is_terminal", &GameState::is_terminal)
      .def_property_readonly("utilities", [](const GameState& s) -> std::optional<std::pair<int, int>> {
        if (!s.outcome()) return std::nullopt;
        return std::pair{s.outcome()->utility_p1, s.outcome()->utility_p2};
      })
      .def("__eq__", [](const GameState& a, const GameState& b) { return a == b; });

  py::class_<Game, std::shared_ptr<Game>>(m, "Game")
      .def(py::init(&game_for), py::arg("id"), py::arg("hex_size") = 7)
      .def_property_readonly("id", [](const Game& g) { return std::string(g.id()); })
      .def_property_readonly("num_cells", [](const Game& g) { return g.geometry().num_cells(); })
      .def("initial_state", &Game::initial_state)
      .def("legal_actions", &Game::legal_actions)
      .def("apply", &Game::apply)
      .def("to_text", &Game::to_text)
      .def("from_text", [](const Game& g, const std::string& t) { return g.from_text(t); })
      .def("action_to_string", &Game::action_to_string);

  py::class_<FeatureSet>(m, "FeatureSet")
      .def_property_readonly("size", &FeatureSet::size)
      .def_property_readonly("version", &FeatureSet::version)
      .def("extract", [](const FeatureSet& fs, const Game& g, const GameState& s, Action a) {
        return fs.extract(g, s, a).active;
      })
      .def("serialize", &FeatureSet::serialize)
      .def("__len__", &FeatureSet::size);
  m.def("atomic_features", [](const Game& g) { return atomic_features(g); });

  m.def("search", &search, py::arg("game"), py::arg("state"), py::arg("iterations"),
        py::arg("exploration") = 1.4142135623730951, py::arg("selection") = "ucb1",
        py::arg("seed") = 0, "Plain search without a feature prior.");

  m.def("ce_gradient", [](const std::vector<std::vector<int>>& phi, const std::vector<double>& theta,
                          const std::vector<double>& target) {
    return ce_gradient(PolicySpec{ParameterVector(theta), std::nullopt},
                       dense_entry(phi, target, std::vector<double>(phi.size(), 0.0)));
  });
  m.def("tspg_gradient", [](const std::vector<std::vector<int>>& phi, const std::vector<double>& theta,
                            const std::vector<double>& q) {
    std::vector<double> target(phi.size(), 1.0 / static_cast<double>(phi.size()));
    const std::vector<ExperienceEntry> batch = {dense_entry(phi, target, q)};
    return tspg_gradient(PolicySpec{ParameterVector(theta), std::nullopt}, batch);
  });
  m.def("softmax", [](const std::vector<double>& z) { return softmax(z).probabilities; });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("game", &TrainConfig::game)
      .def_property("hex_size", [](const TrainConfig& c) { return c.game_options.hex_size; },
                    [](TrainConfig& c, int v) { c.game_options.hex_size = v; })
      .def_readwrite("games", &TrainConfig::games)
      .def_readwrite("mcts_iterations", &TrainConfig::mcts_iterations)
      .def_readwrite("exploration", &TrainConfig::exploration)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("buffer_capacity", &TrainConfig::buffer_capacity)
      .def_readwrite("move_cap", &TrainConfig::move_cap)
      .def_readwrite("playout_cap", &TrainConfig::playout_cap)
      .def_readwrite("checkpoints", &TrainConfig::checkpoints)
      .def_readwrite("train_tspg", &TrainConfig::train_tspg)
      .def_readwrite("train_ce_double", &TrainConfig::train_ce_double)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_property("playout_policy",
                    [](const TrainConfig& c) { return std::string(playout_source_name(c.playout)); },
                    [](TrainConfig& c, const std::string& v) { c.playout = parse_playout_source(v); });

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_readonly("game_id", &Checkpoint::game_id)
      .def_readonly("games_played", &Checkpoint::games_played)
      .def_readonly("update_steps", &Checkpoint::update_steps)
      .def_readonly("features", &Checkpoint::features)
      .def_property_readonly("ce", [](const Checkpoint& c) { return to_vector(c.params.ce); })
      .def_property_readonly("tspg", [](const Checkpoint& c) -> std::optional<std::vector<double>> {
        if (!c.params.tspg) return std::nullopt;
        return to_vector(*c.params.tspg);
      })
      .def_property_readonly("ce_double", [](const Checkpoint& c) -> std::optional<std::vector<double>> {
        if (!c.params.ce_double) return std::nullopt;
        return to_vector(*c.params.ce_double);
      })
      .def("serialize", &serialize_checkpoint)
      .def("save", [](const Checkpoint& c, const std::string& path) { save_checkpoint(path, c); });
  m.def("deserialize_checkpoint", [](const std::string& t) { return deserialize_checkpoint(t); });
  m.def("load_checkpoint", &load_checkpoint);

  m.def("train", [](const TrainConfig& cfg) {
    py::gil_scoped_release release;
    return train(cfg);
  }, "Self-play training; returns the checkpoints in order.");

  m.def("play_match", &match, py::arg("agent_a"), py::arg("agent_b"), py::arg("game"),
        py::arg("games"), py::arg("seed") = 0, py::arg("checkpoint") = std::nullopt,
        py::arg("iterations") = 400, py::arg("hex_size") = 7,
        "Agents are described as in the command-line tool: policy:<name>, "
        "mcts:<prior>[/<playout>], uct or minimax.");

  m.def("bootstrap_ci", [](const std::vector<double>& v, double confidence, int resamples,
                           std::uint64_t seed) {
    Rng rng(seed);
    return bootstrap_ci(v, confidence, resamples, rng);
  }, py::arg("values"), py::arg("confidence") = 0.95, py::arg("resamples") = 10000,
     py::arg("seed") = 0);
  m.def("normalized_entropy", [](const std::vector<double>& p) { return normalized_entropy(p); });
  m.def("weight_summary", [](const Checkpoint& ck) { return weight_distribution_export(ck).summary_text(); });
}

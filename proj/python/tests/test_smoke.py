import math

import numpy as np
import pytest

import tspg


def test_games_and_rules():
    assert set(tspg.known_games()) >= {"tictactoe", "connect4", "breakthrough", "hex", "yavalath"}
    g = tspg.Game("tictactoe")
    s = g.initial_state()
    assert len(g.legal_actions(s)) == 9
    for x in (0, 3, 1, 4, 2):  # X takes the bottom row
        s = g.apply(s, g.legal_actions(s)[[a.target for a in g.legal_actions(s)].index(x)])
    assert s.is_terminal
    assert s.utilities == (1, -1)
    assert g.from_text(g.to_text(s)) == s
    with pytest.raises(ValueError):
        tspg.Game("chess")


def test_search_finds_a_reasonable_root_value():
    g = tspg.Game("tictactoe")
    r = tspg.search(g, g.initial_state(), 2000, seed=3)
    assert abs(sum(r["visit_distribution"]) - 1.0) < 1e-12
    assert -1.0 <= r["root_value"] <= 1.0
    assert len(r["q_estimates"]) == 9


def _softmax(phi, theta):
    z = phi @ theta
    z = np.exp(z - z.max())
    return z / z.sum()


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n, d = rng.integers(2, 8), rng.integers(1, 10)
        phi = (rng.random((n, d)) < 0.4).astype(int)
        theta = rng.uniform(-2, 2, d)
        target = rng.random(n)
        target /= target.sum()
        q = rng.uniform(-1, 1, n)
        ce = np.array(tspg.ce_gradient(phi.tolist(), theta.tolist(), target.tolist()))
        tg = np.array(tspg.tspg_gradient(phi.tolist(), theta.tolist(), q.tolist()))
        h = 1e-6
        for i in range(d):
            e = np.zeros(d)
            e[i] = h
            loss = lambda t: -(target * np.log(_softmax(phi, t))).sum()
            value = lambda t: (_softmax(phi, t) * q).sum()
            assert ce[i] == pytest.approx((loss(theta + e) - loss(theta - e)) / (2 * h), abs=1e-7)
            assert tg[i] == pytest.approx((value(theta + e) - value(theta - e)) / (2 * h), abs=1e-7)


def test_train_checkpoint_round_trip(tmp_path):
    cfg = tspg.TrainConfig()
    cfg.game = "connect4"
    cfg.games = 2
    cfg.mcts_iterations = 30
    cfg.seed = 4
    cks = tspg.train(cfg)
    assert [c.games_played for c in cks] == [1, 2]
    last = cks[-1]
    assert len(last.ce) == last.features.size == len(last.tspg)
    path = tmp_path / "2.ckpt"
    last.save(str(path))
    back = tspg.load_checkpoint(str(path))
    assert back.serialize() == last.serialize()
    assert tspg.train(cfg)[-1].serialize() == last.serialize()
    assert "ce+tspg" in tspg.weight_summary(last)


def test_match_and_statistics():
    r = tspg.play_match("minimax", "policy:uniform", "tictactoe", 20, seed=1)
    assert r["wins_b"] == 0
    assert r["wins_a"] + r["draws"] == 20
    lo, hi = tspg.bootstrap_ci([70.0, 72.0, 74.0, 76.0, 78.0], 0.95, 2000, seed=2)
    assert lo < 74.0 < hi
    assert tspg.normalized_entropy([0.5, 0.5, 0.0]) == pytest.approx(math.log(2) / math.log(3))
    with pytest.raises(ValueError):
        tspg.play_match("policy:ce", "uct", "tictactoe", 2)

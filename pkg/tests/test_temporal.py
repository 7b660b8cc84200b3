import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pastfair.temporal import (FairnessState, FairnessStateError, ParadigmConfig, add_agent,
                               commit, init, preview, remove_agent)

DA = lambda g: ParadigmConfig("discounted_additive", g)  # noqa: E731
DV = lambda g: ParadigmConfig("discounted_averaged", g)  # noqa: E731


def with_z(config, z, d=None, t=0):
    s = init(config, list(range(len(z))))
    n = len(z)
    dd = (0.0,) * n if d is None else (float(d),) * n
    return FairnessState(config, s.agent_ids, tuple(map(float, z)), dd, t, 0.0 if d is None else float(d))


@pytest.mark.parametrize("config,agents", [(DA(0.9), ["A", "B"]), (ParadigmConfig("perfect_averaged"), ["A"]),
                                           (ParadigmConfig("instantaneous"), [])])
def test_init_is_zero(config, agents):
    s = init(config, agents)
    assert s.z == (0.0,) * len(agents) and s.denominator == 0.0 and s.t == 0


def test_init_rejects_duplicates():
    with pytest.raises(FairnessStateError):
        init(ParadigmConfig("instantaneous"), ["A", "A"])


def test_config_validation():
    with pytest.raises(FairnessStateError):
        ParadigmConfig("discounted_additive")
    with pytest.raises(FairnessStateError):
        ParadigmConfig("discounted_additive", 1.5)
    with pytest.raises(FairnessStateError):
        ParadigmConfig("hindsight")
    assert ParadigmConfig("perfect_additive", 0.3).gamma_p is None


def test_preview_examples():
    assert preview(with_z(DA(0.5), [2.0]), [1.0]).values == (2.0,)
    assert preview(with_z(DV(0.5), [2.0], d=1.0), [1.0]).values[0] == pytest.approx(4 / 3, abs=1e-15)
    s = with_z(ParadigmConfig("perfect_averaged"), [2.0], d=2.0, t=2)
    assert preview(s, [5.0]).values == (3.0,)


def test_preview_does_not_mutate():
    s = with_z(DA(0.5), [2.0])
    preview(s, [1.0])
    assert s.z == (2.0,)


def test_preview_errors():
    s = with_z(DA(0.5), [2.0, 1.0])
    with pytest.raises(FairnessStateError):
        preview(s, [1.0])
    with pytest.raises(FairnessStateError):
        preview(s, [1.0, -1.0])


def test_commit_denominator_sequence():
    s = init(DV(0.5), ["A"])
    ds = []
    for _ in range(3):
        s = commit(s, [1.0])
        ds.append(s.denominator)
    assert ds == [1.0, 1.5, 1.75]


def test_commit_gamma_zero_is_instantaneous():
    assert commit(with_z(DA(0.0), [7.0]), [0.4]).z == (0.4,)


def test_commit_perfect_additive_ex1():
    s = init(ParadigmConfig("perfect_additive"), ["Alice", "Bob"])
    s = commit(commit(s, [0.5, 0.3]), [0.2, 0.5])
    assert s.z == pytest.approx((0.7, 0.8))
    assert s.t == 2


def test_add_and_remove_agents():
    s = with_z(ParadigmConfig("perfect_additive"), [5.0])
    s = add_agent(s, "B")
    assert s.z == (5.0, 0.0)
    assert add_agent(init(DA(0.5)), "A").z == (0.0,)
    with pytest.raises(FairnessStateError):
        add_agent(s, "B")
    s = remove_agent(s, "B")
    assert s.z == (5.0,)
    with pytest.raises(FairnessStateError):
        remove_agent(s, "B")
    assert remove_agent(s, 0).z == ()


def test_rejoin_starts_fresh():
    s = commit(init(ParadigmConfig("perfect_additive"), ["A", "B"]), [1.0, 2.0])
    s = add_agent(remove_agent(s, "B"), "B")
    assert s.z == (1.0, 0.0)


def test_ex2_state_at_arrival():
    s = init(ParadigmConfig("perfect_additive"), ["Alice"])
    for _ in range(10):
        s = commit(s, [0.5])
    s = add_agent(s, "Bob")
    assert s.z == (5.0, 0.0)


def test_averaged_arrival_denominator_options():
    g = init(DV(0.5), ["A"])
    p = init(DV(0.5), ["A"], arrival="personal")
    for _ in range(3):
        g, p = commit(g, [1.0]), commit(p, [1.0])
    assert add_agent(g, "B").d == (1.75, 1.75)
    assert add_agent(p, "B").d == (1.75, 0.0)


def test_json_roundtrip():
    s = commit(init(DV(0.9), ["A", "B"]), [0.3, 0.1])
    assert FairnessState.from_json(s.to_json()) == s
    assert json.loads(s.to_json())["mode"] == "discounted_averaged"


traj = st.lists(st.lists(st.floats(0, 1), min_size=2, max_size=2), min_size=1, max_size=40)
gam = st.floats(0, 1)


@given(traj, gam)
def test_preview_matches_commit(us, g):
    for cfg in (DA(g), DV(g), ParadigmConfig("perfect_averaged")):
        s = init(cfg, ["A", "B"])
        for u in us:
            p = preview(s, u).values
            s = commit(s, u)
            assert s.z == p


@given(traj, st.floats(0, 0.999), st.integers(0, 39))
def test_markov_replay(us, g, cut):
    cut = min(cut, len(us))
    s = init(DV(g), ["A", "B"])
    states = [s]
    for u in us:
        s = commit(s, u)
        states.append(s)
    mid = FairnessState.from_json(states[cut].to_json())
    for u in us[cut:]:
        mid = commit(mid, u)
    assert mid == states[-1]


@given(traj, st.floats(0, 1))
def test_averaged_is_convex_combination(us, g):
    s = init(DV(g), ["A", "B"])
    arr = np.array(us)
    for k, u in enumerate(us):
        s = commit(s, u)
        lo, hi = arr[: k + 1].min(axis=0), arr[: k + 1].max(axis=0)
        assert np.all(np.array(s.z) >= lo - 1e-12) and np.all(np.array(s.z) <= hi + 1e-12)


@given(st.floats(0, 0.999), st.integers(1, 300))
def test_denominator_closed_form(g, steps):
    s = init(DV(g), ["A"])
    for _ in range(steps):
        s = commit(s, [0.0])
    assert s.denominator == pytest.approx((1 - g**steps) / (1 - g), abs=1e-12, rel=1e-12)

"""Welfare-argmax allocation of a round's indivisible items.

Every item goes to exactly one active agent (optionally to a discard
pseudo-agent). The search space is all ``n ** m`` assignments, enumerated
with the first item most significant; ties resolve to the earliest one.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _backend
from .temporal import FairnessState, coefficients, preview
from .welfare import UtilityVector, WelfareSpec

log = logging.getLogger(__name__)

DEFAULT_CAP_BITS = 20
DISCARD = None
_KIND_CODE = {"utilitarian": 0, "egalitarian": 1, "nash": 2, "generalized_gini": 3}


class AllocationError(ValueError):
    pass


class AllocationSpaceTooLarge(AllocationError):
    pass


@dataclass(frozen=True)
class Item:
    id: str
    utilities: Mapping = field(default_factory=dict)

    def utility(self, agent_id) -> float:
        return float(self.utilities.get(agent_id, 0.0))


@dataclass(frozen=True)
class Allocation:
    """Item id -> agent id; ``None`` marks a discarded item."""

    assignment: tuple  # of (item_id, agent_id) pairs in item order

    def __getitem__(self, item_id):
        for i, a in self.assignment:
            if i == item_id:
                return a
        raise KeyError(item_id)

    def as_dict(self) -> dict:
        return dict(self.assignment)

    def bundle(self, agent_id) -> list:
        return [i for i, a in self.assignment if a == agent_id]

    def __str__(self):
        return ";".join(f"{i}→{'-' if a is None else a}" for i, a in self.assignment)


def _choices(agents: Sequence, allow_discard: bool) -> list:
    return list(agents) + ([DISCARD] if allow_discard else [])


def check_space(m: int, n: int, cap_bits: float = DEFAULT_CAP_BITS) -> int:
    if n < 1:
        raise AllocationError("no active agents")
    if m and m * math.log2(n) > cap_bits + 1e-12:
        raise AllocationSpaceTooLarge(
            f"allocation space too large: {n}^{m} assignments of m={m} items to n={n} agents "
            f"exceeds the cap of 2^{cap_bits:g}"
        )
    return n**m


def enumerate_allocations(items: Sequence[Item], active_agents: Sequence,
                          allow_discard: bool = False,
                          cap_bits: float = DEFAULT_CAP_BITS) -> list[Allocation]:
    choices = _choices(active_agents, allow_discard)
    check_space(len(items), len(choices), cap_bits)
    out = []
    for combo in np.ndindex(*([len(choices)] * len(items))):
        out.append(Allocation(tuple((it.id, choices[c]) for it, c in zip(items, combo))))
    return out


def allocation_at(index: int, items: Sequence[Item], choices: Sequence) -> Allocation:
    """Decode an enumeration index into an allocation."""
    c = len(choices)
    picks = []
    for _ in items:
        index, r = divmod(index, c)
        picks.append(r)
    picks.reverse()
    return Allocation(tuple((it.id, choices[p]) for it, p in zip(items, picks)))


def step_utilities(allocation: Allocation, items: Sequence[Item], agents: Sequence) -> UtilityVector:
    by_id = {it.id: it for it in items}
    if len(by_id) != len(items):
        raise AllocationError("duplicate item ids")
    pos = {a: k for k, a in enumerate(agents)}
    u = [0.0] * len(agents)
    seen = set()
    for item_id, agent in allocation.assignment:
        if item_id not in by_id:
            raise AllocationError(f"allocation references unknown item {item_id!r}")
        seen.add(item_id)
        if agent is DISCARD:
            continue
        if agent not in pos:
            raise AllocationError(f"allocation references unknown agent {agent!r}")
        u[pos[agent]] += by_id[item_id].utility(agent)
    if seen != set(by_id):
        raise AllocationError(f"allocation leaves items unassigned: {sorted(set(by_id) - seen)}")
    return UtilityVector(tuple(u), tuple(agents))


def utility_matrix(items: Sequence[Item], agents: Sequence) -> np.ndarray:
    util = np.zeros((len(items), len(agents)), dtype=np.float64)
    for k, it in enumerate(items):
        for j, a in enumerate(agents):
            util[k, j] = it.utility(a)
    return util


@dataclass(frozen=True)
class SearchProblem:
    """Arrays handed to the search kernel for one (state, round) pair."""

    util: np.ndarray
    offset: np.ndarray
    denom: np.ndarray
    active: np.ndarray
    choices: list
    kind: int
    weights: np.ndarray
    eps: float

    def args(self):
        return (self.util, self.offset, self.denom, self.active, len(self.choices),
                self.kind, self.weights, self.eps)


def build_problem(state: FairnessState, items: Sequence[Item], welfare: WelfareSpec,
                  active_agents: Sequence | None = None, allow_discard: bool = False,
                  cap_bits: float = DEFAULT_CAP_BITS) -> SearchProblem:
    tracked = list(state.agent_ids)
    active = tracked if active_agents is None else list(active_agents)
    for a in active:
        if a not in tracked:
            raise AllocationError(f"active agent {a!r} has no fairness state")
    check_space(len(items), len(active) + allow_discard, cap_bits)
    # columns follow the tracked order; items only go to active agents
    targets = active + ([DISCARD] if allow_discard else [])
    cols = [tracked.index(a) for a in active]
    offsets, denoms = coefficients(state)
    offset = np.array([offsets[c] for c in cols], dtype=np.float64)
    denom = np.array([denoms[c] for c in cols], dtype=np.float64)
    weights = (np.array(welfare.weights_for(len(active)), dtype=np.float64)
               if welfare.kind == "generalized_gini" else np.zeros(0))
    return SearchProblem(
        utility_matrix(items, active), offset, denom,
        np.arange(len(active), dtype=np.intp), targets, _KIND_CODE[welfare.kind],
        weights, float(welfare.nash_eps),
    )


@dataclass(frozen=True)
class Choice:
    allocation: Allocation
    preview: UtilityVector
    welfare: float
    index: int


def optimize(state: FairnessState, items: Sequence[Item], welfare: WelfareSpec,
             active_agents: Sequence | None = None, *, allow_discard: bool = False,
             tiebreak: str = "lex", rng: random.Random | None = None,
             cap_bits: float = DEFAULT_CAP_BITS, backend: str | None = None) -> Choice:
    """Pick the allocation maximizing welfare of the previewed fairness state.

    The welfare is taken over ``active_agents`` (default: every tracked
    agent); tracked agents outside that set receive nothing this round.
    """
    active = list(state.agent_ids) if active_agents is None else list(active_agents)
    if not active:
        raise AllocationError("no active agents")
    problem = build_problem(state, items, welfare, active, allow_discard, cap_bits)
    kern = _backend.get(backend)
    if tiebreak == "lex":
        idx, _ = kern.best_allocation(*problem.args())
    elif tiebreak == "random":
        scores = kern.score_allocations(*problem.args())
        ties = np.flatnonzero(scores == scores.max())
        idx = int(ties[(rng or random.Random(0)).randrange(len(ties))])
    else:
        raise AllocationError(f"unknown tiebreak {tiebreak!r}")
    alloc = allocation_at(int(idx), items, problem.choices)
    u = step_utilities(alloc, items, state.agent_ids)
    z = preview(state, u)
    w = welfare_of(welfare, z, active)
    return Choice(alloc, z, w, int(idx))


def welfare_of(spec: WelfareSpec, z: UtilityVector, active: Sequence) -> float:
    from .welfare import evaluate

    return evaluate(spec, [z[a] for a in active])


def greedy(items: Sequence[Item], active_agents: Sequence, state: FairnessState | None = None,
           welfare: WelfareSpec | None = None) -> Allocation:
    """Give each item to the agent valuing it most (first agent on ties).

    Exact only for utilitarian welfare under instantaneous fairness, where
    the objective splits per item; approximate everywhere else.
    """
    exact = (welfare is None or welfare.kind == "utilitarian") and (
        state is None or state.config.mode == "instantaneous")
    if not exact:
        log.warning("greedy allocation is approximate for %s / %s",
                    welfare.kind if welfare else "?", state.config.mode if state else "?")
    pairs = []
    for it in items:
        best = max(range(len(active_agents)), key=lambda j: (it.utility(active_agents[j]), -j))
        pairs.append((it.id, active_agents[best]))
    return Allocation(tuple(pairs))

"""Boundedness of past-discounted fairness states and exact planning over them.

With utilities in ``[0, u_max]`` and decay ``gamma_p < 1`` the discounted
sum never exceeds ``u_max / (1 - gamma_p)``, so uniform bins of width
``delta`` give a per-agent state count independent of time.  Perfect recall
needs ``(t + 1) * u_max / delta`` bins at horizon ``t``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .allocator import Item, allocation_at, build_problem, optimize
from .temporal import FairnessState, ParadigmConfig, coefficients
from .welfare import WelfareSpec

DEFAULT_STATE_CAP = 1_000_000
# slack for floor() of ratios like 0.3 / 0.1 = 2.9999999999999996
_FLOOR_SLACK = 1e-9


class StateSpaceError(ValueError):
    pass


class StateSpaceTooLarge(StateSpaceError):
    def __init__(self, estimate: float, cap: int):
        super().__init__(f"augmented state space too large: ~{estimate:.4g} states exceeds cap {cap}")
        self.estimate = estimate
        self.cap = cap


@dataclass(frozen=True)
class DiscretizationSpec:
    delta: float
    u_max: float
    gamma_p: float

    def __post_init__(self):
        if not self.delta > 0:
            raise StateSpaceError(f"delta must be > 0, got {self.delta!r}")
        if not self.u_max > 0:
            raise StateSpaceError(f"u_max must be > 0, got {self.u_max!r}")
        if not 0.0 <= self.gamma_p < 1.0:
            raise StateSpaceError(f"gamma_p must be in [0, 1), got {self.gamma_p!r}")
        if self.delta > self.u_max:
            raise StateSpaceError(f"delta={self.delta!r} exceeds u_max={self.u_max!r}")

    @property
    def bound(self) -> float:
        return discounted_bound(self.gamma_p, self.u_max)

    @property
    def bins(self) -> int:
        return state_count_discounted(self)


def _floor(x: float) -> int:
    return math.floor(x + _FLOOR_SLACK)


def discounted_bound(gamma_p: float, u_max: float) -> float:
    if gamma_p >= 1.0:
        raise StateSpaceError("unbounded (perfect recall): gamma_p must be < 1")
    if gamma_p < 0.0:
        raise StateSpaceError(f"gamma_p must be >= 0, got {gamma_p!r}")
    if not u_max > 0:
        raise StateSpaceError(f"u_max must be > 0, got {u_max!r}")
    return u_max / (1.0 - gamma_p)


def state_count_discounted(spec: DiscretizationSpec) -> int:
    return _floor(spec.bound / spec.delta) + 1


def state_count_perfect(t: int, u_max: float, delta: float) -> int:
    if t < 0 or not u_max > 0 or not delta > 0:
        raise StateSpaceError("need t >= 0, u_max > 0, delta > 0")
    return _floor((t + 1) * u_max / delta) + 1


def discretize(z, spec: DiscretizationSpec) -> tuple[int, ...]:
    """Bin index ``floor(z / delta)`` per agent, clamped to the top bin."""
    top = spec.bins - 1
    limit = spec.bound + spec.delta / 2
    out = []
    for v in z:
        v = float(v)
        if v > limit:
            raise StateSpaceError(f"value {v!r} exceeds the discounted bound {spec.bound!r} (+delta/2)")
        out.append(min(max(_floor(v / spec.delta), 0), top))
    return tuple(out)


def representative(bins: Sequence[int], spec: DiscretizationSpec) -> tuple[float, ...]:
    return tuple(b * spec.delta for b in bins)


@dataclass
class AugmentedMDP:
    """Deterministic MDP over (cycle phase, binned fairness vector) states.

    ``next_state[s][a]`` and ``reward[s][a]`` exist for states found before
    the horizon; the reward is the welfare of the fairness vector committed
    from the state's representative values.
    """

    agents: tuple
    cycle: tuple
    paradigm: ParadigmConfig
    welfare: WelfareSpec
    spec: DiscretizationSpec
    horizon: int
    states: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    next_state: dict = field(default_factory=dict)
    reward: dict = field(default_factory=dict)
    quantization_error: float = 0.0

    def __len__(self):
        return len(self.states)

    def fairness_state(self, s: int) -> FairnessState:
        _, bins = self.states[s]
        return FairnessState(self.paradigm, self.agents, representative(bins, self.spec))

    def reachable_bins(self) -> list[set]:
        per = [set() for _ in self.agents]
        for _, bins in self.states:
            for k, b in enumerate(bins):
                per[k].add(b)
        return per


def _assignments(m: int, n: int) -> np.ndarray:
    if m == 0:
        return np.zeros((1, 0), dtype=np.intp)
    grids = np.indices((n,) * m).reshape(m, -1).T
    return np.ascontiguousarray(grids)


def build_augmented_mdp(cycle: Sequence[Sequence[Item]], agents: Sequence,
                        paradigm: ParadigmConfig, welfare: WelfareSpec,
                        spec: DiscretizationSpec, horizon: int,
                        cap: int = DEFAULT_STATE_CAP, backend: str | None = None) -> AugmentedMDP:
    if paradigm.mode != "discounted_additive":
        raise StateSpaceError(f"planning needs discounted_additive fairness, got {paradigm.mode}")
    if paradigm.gamma_p >= 1.0:
        raise StateSpaceError("unbounded (perfect recall): gamma_p must be < 1")
    if paradigm.gamma_p != spec.gamma_p:
        raise StateSpaceError("paradigm and discretization disagree on gamma_p")
    if horizon < 0:
        raise StateSpaceError("horizon must be >= 0")
    cycle = tuple(tuple(r) for r in cycle)
    if not cycle:
        raise StateSpaceError("round cycle is empty")
    agents = tuple(agents)
    estimate = float(len(cycle)) * float(spec.bins) ** len(agents)
    if estimate > cap:
        raise StateSpaceTooLarge(estimate, cap)

    kern = _backend.get(backend)
    mdp = AugmentedMDP(agents, cycle, paradigm, welfare, spec, horizon)
    steps = []
    for items in cycle:
        assign = _assignments(len(items), len(agents))
        util = np.zeros((len(items), len(agents)))
        for k, it in enumerate(items):
            util[k] = [it.utility(a) for a in agents]
        u = np.zeros((len(assign), len(agents)))
        for k in range(len(items)):
            np.add.at(u, (np.arange(len(assign)), assign[:, k]), util[k, assign[:, k]])
        steps.append(u)

    start = (0, (0,) * len(agents))
    index = {start: 0}
    mdp.states.append(start)
    mdp.depth.append(0)
    queue = deque([0])
    qerr = 0.0
    while queue:
        s = queue.popleft()
        if mdp.depth[s] >= horizon:
            continue
        phase, _ = mdp.states[s]
        fs = mdp.fairness_state(s)
        problem = build_problem(fs, cycle[phase], welfare)
        mdp.reward[s] = kern.score_allocations(*problem.args())
        offset, denom = (np.array(c) for c in coefficients(fs))
        exact = (offset + steps[phase]) / denom
        succ = np.empty(len(exact), dtype=np.intp)
        nxt_phase = (phase + 1) % len(cycle)
        for a, z in enumerate(exact):
            bins = discretize(z, spec)
            qerr = max(qerr, float(np.max(np.abs(z - np.array(representative(bins, spec))))))
            key = (nxt_phase, bins)
            j = index.get(key)
            if j is None:
                j = index[key] = len(mdp.states)
                if j >= cap:
                    raise StateSpaceTooLarge(j + 1, cap)
                mdp.states.append(key)
                mdp.depth.append(mdp.depth[s] + 1)
                queue.append(j)
            succ[a] = j
        mdp.next_state[s] = succ
    mdp.quantization_error = qerr
    return mdp


@dataclass
class Plan:
    """``values[h][s]``: best welfare total with ``h`` steps to go (NaN where
    the successors were not enumerated); ``policy[h][s]`` the first action
    attaining it (-1 where undefined)."""

    values: list
    policy: list


def value_iteration(mdp: AugmentedMDP) -> Plan:
    """Finite-horizon backward induction; ties go to the lowest action index."""
    size = len(mdp.states)
    depth = np.array(mdp.depth, dtype=np.intp)
    values = [np.zeros(size)]
    policy = [np.full(size, -1, dtype=np.intp)]
    for h in range(1, mdp.horizon + 1):
        prev = values[-1]
        v = np.full(size, np.nan)
        pi = np.full(size, -1, dtype=np.intp)
        for s in np.flatnonzero(depth <= mdp.horizon - h):
            q = mdp.reward[s] + prev[mdp.next_state[s]]
            a = int(np.argmax(q))
            v[s], pi[s] = q[a], a
        values.append(v)
        policy.append(pi)
    return Plan(values, policy)


def rollout(mdp: AugmentedMDP, choose) -> tuple[float, list]:
    """Follow ``choose(stage, state) -> action`` from the zero state."""
    s, total, path = 0, 0.0, []
    for k in range(mdp.horizon):
        a = choose(k, s)
        total += float(mdp.reward[s][a])
        path.append((s, a))
        s = int(mdp.next_state[s][a])
    return total, path


def myopic_action(mdp: AugmentedMDP, s: int, backend: str | None = None) -> int:
    phase, _ = mdp.states[s]
    return optimize(mdp.fairness_state(s), mdp.cycle[phase], mdp.welfare, backend=backend).index


def compare_rollouts(mdp: AugmentedMDP, plan: Plan | None = None) -> dict:
    plan = plan or value_iteration(mdp)
    H = mdp.horizon
    dp, _ = rollout(mdp, lambda k, s: int(plan.policy[H - k][s]))
    myo, _ = rollout(mdp, lambda k, s: myopic_action(mdp, s))
    bins = mdp.reachable_bins()
    return {
        "horizon": H,
        "reachable_states": len(mdp.states),
        "reachable_bins_per_agent": max((len(b) for b in bins), default=0),
        "max_bin_index": max((max(b) for b in bins if b), default=0),
        "analytic_bins_per_agent": mdp.spec.bins,
        "analytic_joint_states": mdp.spec.bins ** len(mdp.agents),
        "optimal_value": float(plan.values[H][0]) if H else 0.0,
        "dp_rollout_welfare": dp,
        "myopic_rollout_welfare": myo,
        "quantization_error": mdp.quantization_error,
    }


def bounds_table(gammas: Sequence[float], u_max: float, delta: float,
                 horizons: Sequence[int]) -> list[dict]:
    rows = []
    for g in gammas:
        spec = DiscretizationSpec(delta, u_max, g)
        row = {"gamma": g, "u_max": u_max, "delta": delta, "bound": spec.bound,
               "states_discounted": spec.bins}
        for t in horizons:
            row[f"states_perfect@{t}"] = state_count_perfect(t, u_max, delta)
        rows.append(row)
    return rows

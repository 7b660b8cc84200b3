"""Fairness-state bookkeeping for the five temporal update rules.

The perceived utility of agent ``i`` after an allocation is always computed
as ``(offset_i + u_i) / denom_i``.  Keeping that one shape means the search
kernel and the reference code perform identical float operations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence

from .welfare import UtilityVector

MODES = (
    "instantaneous",
    "perfect_additive",
    "perfect_averaged",
    "discounted_additive",
    "discounted_averaged",
)
AVERAGED = ("perfect_averaged", "discounted_averaged")


class FairnessStateError(ValueError):
    pass


@dataclass(frozen=True)
class ParadigmConfig:
    mode: str
    gamma_p: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise FairnessStateError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.mode.startswith("discounted"):
            if self.gamma_p is None:
                raise FairnessStateError(f"{self.mode} requires gamma_p")
            g = float(self.gamma_p)
            if not 0.0 <= g <= 1.0:
                raise FairnessStateError(f"gamma_p must be in [0, 1], got {g!r}")
            object.__setattr__(self, "gamma_p", g)
        else:
            object.__setattr__(self, "gamma_p", None)

    @property
    def decay(self) -> float:
        """Factor applied to the stored denominator (1 for perfect recall)."""
        return 1.0 if self.gamma_p is None else self.gamma_p

    @property
    def averaged(self) -> bool:
        return self.mode in AVERAGED

    @property
    def label(self) -> str:
        if self.gamma_p is None:
            return self.mode
        return f"{self.mode}({self.gamma_p!r})"


@dataclass(frozen=True)
class FairnessState:
    """Immutable fairness state.

    ``d`` holds one discounted denominator per agent. With the default
    ``arrival="global"`` every entry is equal and :attr:`denominator`
    returns it; ``arrival="personal"`` starts late agents from 0 instead.
    """

    config: ParadigmConfig
    agent_ids: tuple = ()
    z: tuple[float, ...] = ()
    d: tuple[float, ...] = ()
    t: int = 0
    shared_d: float = 0.0
    arrival: str = "global"

    @property
    def Z(self) -> UtilityVector:
        return UtilityVector(self.z, self.agent_ids)

    @property
    def denominator(self) -> float:
        return self.shared_d

    def index(self, agent_id) -> int:
        try:
            return self.agent_ids.index(agent_id)
        except ValueError:
            raise FairnessStateError(f"unknown agent {agent_id!r}") from None

    # serialization ---------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "mode": self.config.mode,
            "gamma_p": self.config.gamma_p,
            "agents": list(self.agent_ids),
            "Z": list(self.z),
            "d": list(self.d),
            "t": self.t,
            "shared_d": self.shared_d,
            "arrival": self.arrival,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "FairnessState":
        return cls(
            ParadigmConfig(doc["mode"], doc.get("gamma_p")),
            tuple(doc["agents"]),
            tuple(float(x) for x in doc["Z"]),
            tuple(float(x) for x in doc["d"]),
            int(doc["t"]),
            float(doc["shared_d"]),
            doc.get("arrival", "global"),
        )

    @classmethod
    def from_json(cls, text: str) -> "FairnessState":
        return cls.from_dict(json.loads(text))


def init(config: ParadigmConfig, agent_ids: Sequence = (), arrival: str = "global") -> FairnessState:
    ids = tuple(agent_ids)
    if len(set(ids)) != len(ids):
        raise FairnessStateError("agent ids must be unique")
    if arrival not in ("global", "personal"):
        raise FairnessStateError(f"arrival must be 'global' or 'personal', got {arrival!r}")
    n = len(ids)
    return FairnessState(config, ids, (0.0,) * n, (0.0,) * n, 0, 0.0, arrival)


def coefficients(state: FairnessState) -> tuple[list[float], list[float]]:
    """Per-agent ``(offset, denom)`` so that preview = (offset + u) / denom."""
    mode = state.config.mode
    n = len(state.z)
    if mode == "instantaneous":
        return [0.0] * n, [1.0] * n
    if mode == "perfect_additive":
        return list(state.z), [1.0] * n
    if mode == "discounted_additive":
        g = state.config.gamma_p
        return [g * z for z in state.z], [1.0] * n
    g = state.config.decay
    offsets = [g * z * d for z, d in zip(state.z, state.d)]
    denoms = [g * d + 1 for d in state.d]
    return offsets, denoms


def _aligned(state: FairnessState, step_utilities) -> tuple[float, ...]:
    if isinstance(step_utilities, UtilityVector):
        if step_utilities.agent_ids != state.agent_ids:
            raise FairnessStateError(
                f"step utilities for {list(step_utilities.agent_ids)} do not match tracked agents {list(state.agent_ids)}"
            )
        return step_utilities.values
    u = tuple(float(x) for x in step_utilities)
    if len(u) != len(state.z):
        raise FairnessStateError(f"{len(u)} step utilities for {len(state.z)} tracked agents")
    for a, x in zip(state.agent_ids, u):
        if not x >= 0.0:
            raise FairnessStateError(f"negative step utility {x!r} for agent {a!r}")
    return u


def preview(state: FairnessState, step_utilities) -> UtilityVector:
    """Perceived utilities after an allocation, without touching ``state``."""
    u = _aligned(state, step_utilities)
    offsets, denoms = coefficients(state)
    return UtilityVector(tuple((o + x) / q for o, x, q in zip(offsets, u, denoms)), state.agent_ids)


def commit(state: FairnessState, step_utilities) -> FairnessState:
    z = preview(state, step_utilities).values
    d = state.d
    shared = state.shared_d
    if state.config.averaged:
        g = state.config.decay
        d = tuple(g * x + 1 for x in d)
        shared = g * shared + 1
    return replace(state, z=z, d=d, t=state.t + 1, shared_d=shared)


def add_agent(state: FairnessState, agent_id) -> FairnessState:
    if agent_id in state.agent_ids:
        raise FairnessStateError(f"agent {agent_id!r} already tracked")
    d0 = state.shared_d if state.arrival == "global" else 0.0
    return replace(
        state,
        agent_ids=state.agent_ids + (agent_id,),
        z=state.z + (0.0,),
        d=state.d + (d0,),
    )


def remove_agent(state: FairnessState, agent_id) -> FairnessState:
    i = state.index(agent_id)
    return replace(
        state,
        agent_ids=state.agent_ids[:i] + state.agent_ids[i + 1:],
        z=state.z[:i] + state.z[i + 1:],
        d=state.d[:i] + state.d[i + 1:],
    )

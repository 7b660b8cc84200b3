"""Social welfare functions over per-agent utility vectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

KINDS = ("utilitarian", "egalitarian", "nash", "generalized_gini")
_ALIASES = {"mmf": "egalitarian", "maximin": "egalitarian", "sum": "utilitarian", "gini": "generalized_gini"}


class WelfareError(ValueError):
    pass


@dataclass(frozen=True)
class UtilityVector:
    values: tuple[float, ...]
    agent_ids: tuple = ()

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        ids = tuple(self.agent_ids) if self.agent_ids else tuple(range(len(values)))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "agent_ids", ids)
        if len(ids) != len(values):
            raise WelfareError(f"{len(values)} values for {len(ids)} agent ids")
        if len(set(ids)) != len(ids):
            raise WelfareError("agent ids must be unique")
        for a, v in zip(ids, values):
            if not v >= 0.0:
                raise WelfareError(f"negative utility {v!r} for agent {a!r}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, agent_id):
        return self.values[self.agent_ids.index(agent_id)]

    def as_dict(self) -> dict:
        return dict(zip(self.agent_ids, self.values))


def _values(z) -> tuple[float, ...]:
    vals = tuple(z.values) if isinstance(z, UtilityVector) else tuple(float(v) for v in z)
    if not vals:
        raise WelfareError("empty utility vector")
    return vals


# Plain left-to-right accumulation, never sum()/fsum(): the compiled search
# kernel must reproduce these values bit for bit so that ties agree.
def utilitarian(z) -> float:
    total = 0.0
    for v in _values(z):
        total += v
    return total


def egalitarian(z) -> float:
    return min(_values(z))


def nash(z, eps: float = 0.0) -> float:
    prod = 1.0
    for v in _values(z):
        prod *= v + eps
    return prod


def check_gini_weights(weights: Sequence[float]) -> tuple[float, ...]:
    w = tuple(float(x) for x in weights)
    if not w:
        raise WelfareError("gini weights must be non-empty")
    if any(x < 0 for x in w):
        raise WelfareError("gini weights must be nonnegative")
    if any(b > a for a, b in zip(w, w[1:])):
        raise WelfareError(f"gini weights must be nonincreasing, got {list(w)}")
    if not any(x > 0 for x in w):
        raise WelfareError("at least one gini weight must be positive")
    return w


def generalized_gini(z, weights: Sequence[float]) -> float:
    """Ordered weighted sum: the largest weight goes to the worst-off agent.

    Weights need not sum to one; rescaling them rescales the welfare and
    leaves any argmax unchanged.
    """
    vals = _values(z)
    w = check_gini_weights(weights)
    if len(w) != len(vals):
        raise WelfareError(f"{len(w)} gini weights for {len(vals)} agents")
    total = 0.0
    for wi, v in zip(w, sorted(vals)):
        total += wi * v
    return total


@dataclass(frozen=True)
class WelfareSpec:
    kind: str
    gini_weights: tuple[float, ...] | None = None
    nash_eps: float = 0.0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise WelfareError(f"unknown welfare kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "generalized_gini":
            if self.gini_weights is None:
                raise WelfareError("generalized_gini needs gini_weights")
            object.__setattr__(self, "gini_weights", check_gini_weights(self.gini_weights))
        elif self.gini_weights is not None:
            raise WelfareError(f"gini_weights given for {kind}")
        if self.nash_eps < 0:
            raise WelfareError("nash_eps must be >= 0")

    @classmethod
    def parse(cls, text: str) -> "WelfareSpec":
        """Parse ``NAME`` or ``gini:w1,w2,...``."""
        name, _, rest = text.strip().partition(":")
        if rest:
            try:
                weights = tuple(float(x) for x in rest.split(","))
            except ValueError as exc:
                raise WelfareError(f"bad weight list in {text!r}") from exc
            return cls(name, weights)
        return cls(name)

    @property
    def label(self) -> str:
        if self.kind == "egalitarian":
            return "mmf"
        if self.kind == "generalized_gini":
            return "gini:" + ",".join(repr(w) for w in self.gini_weights)
        return self.kind

    def weights_for(self, n: int) -> tuple[float, ...]:
        if len(self.gini_weights) != n:
            raise WelfareError(f"{len(self.gini_weights)} gini weights for {n} agents")
        return self.gini_weights


def evaluate(spec: WelfareSpec, z: UtilityVector | Iterable[float]) -> float:
    if spec.kind == "utilitarian":
        return utilitarian(z)
    if spec.kind == "egalitarian":
        return egalitarian(z)
    if spec.kind == "nash":
        return nash(z, spec.nash_eps)
    return generalized_gini(z, spec.gini_weights)

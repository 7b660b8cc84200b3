"""Scenario-driven episodes and the comparison metrics built on them."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import temporal
from .allocator import Allocation, AllocationError, Item, optimize, step_utilities
from .temporal import ParadigmConfig
from .welfare import WelfareSpec

log = logging.getLogger(__name__)

CSV_HEADER = ("t", "config", "agent", "step_utility", "cumulative_utility",
              "perceived_Z", "welfare", "allocation")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class AgentSpec:
    id: str
    arrival: int = 0
    departure: int | None = None

    def active(self, t: int) -> bool:
        return self.arrival <= t and (self.departure is None or t < self.departure)


@dataclass(frozen=True)
class Round:
    index: int
    items: tuple[Item, ...]


@dataclass(frozen=True)
class Scenario:
    agents: tuple[AgentSpec, ...]
    u_max: float
    rounds: tuple[Round, ...]
    name: str = ""

    def active_agents(self, t: int) -> list:
        return [a.id for a in self.agents if a.active(t)]


def _items(raw, where: str, agent_ids: set, u_max: float) -> tuple[Item, ...]:
    if not isinstance(raw, list):
        raise ScenarioError(f"{where}: items must be a list")
    items = []
    seen = set()
    for k, it in enumerate(raw):
        if not isinstance(it, dict) or "id" not in it:
            raise ScenarioError(f"{where}: item {k} needs an 'id'")
        iid = str(it["id"])
        if iid in seen:
            raise ScenarioError(f"{where}: duplicate item id {iid!r}")
        seen.add(iid)
        utils = it.get("utilities", {})
        if not isinstance(utils, dict):
            raise ScenarioError(f"{where}, item {iid!r}: utilities must be an object")
        clean = {}
        for agent, v in utils.items():
            if agent not in agent_ids:
                raise ScenarioError(f"{where}, item {iid!r}: unknown agent {agent!r}")
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ScenarioError(f"{where}, item {iid!r}: utility for {agent!r} is not a number") from None
            if not 0.0 <= v <= u_max:
                raise ScenarioError(
                    f"{where}, item {iid!r}: utility {v!r} for {agent!r} outside [0, u_max={u_max!r}]")
            clean[agent] = v
        items.append(Item(iid, clean))
    return tuple(items)


def validate_scenario(raw: dict, name: str = "") -> Scenario:
    """Check and normalize a scenario document, expanding repeat blocks."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        u_max = float(raw["u_max"])
    except KeyError:
        raise ScenarioError("field 'u_max' is required") from None
    except (TypeError, ValueError):
        raise ScenarioError("field 'u_max' must be a number") from None
    if not u_max > 0:
        raise ScenarioError(f"field 'u_max' must be > 0, got {u_max!r}")

    agents = []
    for k, a in enumerate(raw.get("agents") or []):
        if not isinstance(a, dict) or "id" not in a:
            raise ScenarioError(f"agents[{k}]: needs an 'id'")
        arrival = a.get("arrival", 0)
        departure = a.get("departure")
        if not isinstance(arrival, int) or arrival < 0:
            raise ScenarioError(f"agents[{k}] ({a['id']!r}): arrival must be a nonnegative integer")
        if departure is not None and (not isinstance(departure, int) or departure <= arrival):
            raise ScenarioError(f"agents[{k}] ({a['id']!r}): departure must be an integer > arrival")
        agents.append(AgentSpec(str(a["id"]), arrival, departure))
    if not agents:
        raise ScenarioError("field 'agents' must list at least one agent")
    ids = [a.id for a in agents]
    if len(set(ids)) != len(ids):
        raise ScenarioError("field 'agents': duplicate agent ids")
    idset = set(ids)

    blocks = raw.get("rounds")
    if isinstance(blocks, dict):
        blocks = [blocks]
    if not isinstance(blocks, list):
        raise ScenarioError("field 'rounds' must be a list or a repeat block")
    rounds: list[Round] = []
    for k, block in enumerate(blocks):
        if not isinstance(block, dict):
            raise ScenarioError(f"rounds[{k}]: must be an object")
        if "repeat" in block:
            count = block["repeat"]
            if not isinstance(count, int) or count < 0:
                raise ScenarioError(f"rounds[{k}]: repeat must be a nonnegative integer")
            items = _items(block.get("items", []), f"rounds[{k}] (repeat block)", idset, u_max)
            base = len(rounds)
            rounds.extend(Round(base + r, items) for r in range(count))
        else:
            t = len(rounds)
            if block.get("index", t) != t:
                raise ScenarioError(f"rounds[{k}]: index {block.get('index')!r} breaks contiguity (expected {t})")
            rounds.append(Round(t, _items(block.get("items", []), f"round {t}", idset, u_max)))

    for r in rounds:
        active = [a.id for a in agents if a.active(r.index)]
        for it in r.items:
            missing = [a for a in active if a not in it.utilities]
            if missing:
                log.warning("round %d, item %r: no utility for %s; using 0", r.index, it.id, missing)
    return Scenario(tuple(agents), u_max, tuple(rounds), name)


def load_scenario(path) -> Scenario:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return validate_scenario(raw, path.stem)


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package (``ex1`` or ``ex2``)."""
    path = Path(__file__).parent / "scenarios" / (name if name.endswith(".json") else name + ".json")
    if not path.exists():
        raise ScenarioError(f"no bundled scenario {name!r}")
    return path


@dataclass(frozen=True)
class RoundRecord:
    t: int
    agents: tuple
    allocation: Allocation
    step: tuple[float, ...]
    Z: tuple[float, ...]
    welfare: float
    cumulative: dict


@dataclass
class EpisodeTrace:
    label: str
    records: list[RoundRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def agents(self) -> list:
        seen = []
        for r in self.records:
            seen.extend(a for a in r.agents if a not in seen)
        return seen


def config_label(paradigm: ParadigmConfig, welfare: WelfareSpec) -> str:
    return f"{paradigm.label}/{welfare.label}"


def run_episode(scenario: Scenario, paradigm: ParadigmConfig, welfare: WelfareSpec, *,
                tiebreak: str = "lex", seed: int | None = None, arrival: str = "global",
                allow_discard: bool = False, backend: str | None = None) -> EpisodeTrace:
    rng = random.Random(seed)
    state = temporal.init(paradigm, [], arrival=arrival)
    trace = EpisodeTrace(config_label(paradigm, welfare))
    cumulative: dict = {}
    for rnd in scenario.rounds:
        t = rnd.index
        for a in scenario.agents:
            if a.departure == t and a.id in state.agent_ids:
                state = temporal.remove_agent(state, a.id)
        for a in scenario.agents:
            if a.active(t) and a.id not in state.agent_ids:
                state = temporal.add_agent(state, a.id)
                cumulative.setdefault(a.id, 0.0)
        if not state.agent_ids:
            if rnd.items:
                raise AllocationError(f"round {t}: items but no active agents")
            trace.records.append(RoundRecord(t, (), Allocation(()), (), (), 0.0, dict(cumulative)))
            continue
        try:
            choice = optimize(state, rnd.items, welfare, tiebreak=tiebreak, rng=rng,
                              allow_discard=allow_discard, backend=backend)
        except AllocationError as exc:
            raise AllocationError(f"round {t}: {exc}") from exc
        u = step_utilities(choice.allocation, rnd.items, state.agent_ids)
        state = temporal.commit(state, u)
        for a, x in zip(state.agent_ids, u.values):
            cumulative[a] += x
        trace.records.append(RoundRecord(t, state.agent_ids, choice.allocation, u.values,
                                         state.z, choice.welfare, dict(cumulative)))
    return trace


@dataclass(frozen=True)
class Metrics:
    cumulative_difference: list[float]
    perceived_difference: list[float]
    welfare: list[float]


def metrics(trace: EpisodeTrace, agent_a, agent_b) -> Metrics:
    """Per-round ΣU_a−ΣU_b, Z_a−Z_b and welfare.

    An agent that is not active in a round contributes its running total
    (0 before arrival) and a perceived utility of 0.
    """
    known = set(trace.agents())
    for a in (agent_a, agent_b):
        if a not in known:
            raise ScenarioError(f"agent {a!r} does not appear in trace {trace.label!r}")
    cum, per, wel = [], [], []
    for r in trace.records:
        z = dict(zip(r.agents, r.Z))
        cum.append(r.cumulative.get(agent_a, 0.0) - r.cumulative.get(agent_b, 0.0))
        per.append(z.get(agent_a, 0.0) - z.get(agent_b, 0.0))
        wel.append(r.welfare)
    return Metrics(cum, per, wel)


def compare(scenario: Scenario, configs: Sequence[tuple[ParadigmConfig, WelfareSpec]],
            **kwargs) -> list[EpisodeTrace]:
    """Run every configuration on the same scenario, in the given order."""
    if not configs:
        raise ScenarioError("compare needs at least one configuration")
    labels = [config_label(p, w) for p, w in configs]
    dupes = sorted({x for x in labels if labels.count(x) > 1})
    if dupes:
        raise ScenarioError(f"duplicate configuration labels: {', '.join(dupes)}")
    return [run_episode(scenario, p, w, **kwargs) for p, w in configs]


def _fmt(x: float) -> str:
    return repr(float(x))


def trace_rows(traces: Iterable[EpisodeTrace]) -> Iterable[tuple]:
    for tr in traces:
        for r in tr.records:
            alloc = str(r.allocation)
            for a, u, z in zip(r.agents, r.step, r.Z):
                yield (r.t, tr.label, a, _fmt(u), _fmt(r.cumulative[a]), _fmt(z), _fmt(r.welfare), alloc)


def to_csv(traces: Iterable[EpisodeTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(trace_rows(traces))
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))

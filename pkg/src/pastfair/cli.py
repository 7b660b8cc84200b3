"""Command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import simulator
from .allocator import AllocationError, AllocationSpaceTooLarge
from .simulator import ScenarioError
from .state_space import (DEFAULT_STATE_CAP, DiscretizationSpec, StateSpaceError,
                          StateSpaceTooLarge, bounds_table, build_augmented_mdp,
                          compare_rollouts, value_iteration)
from .temporal import MODES, FairnessStateError, ParadigmConfig
from .welfare import WelfareError, WelfareSpec

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("values must be >= 0")
    return vals


def _gammas(args) -> list[float]:
    gammas = args.gamma or []
    for g in gammas:
        if not 0.0 <= g <= 1.0:
            raise UsageError(f"--gamma {g!r} is outside [0, 1]")
    return gammas


def _scenario(path_text: str) -> simulator.Scenario:
    path = Path(path_text)
    if not path.exists():
        try:
            path = simulator.bundled(path.name)
        except ScenarioError:
            raise UsageError(f"scenario not found: {path_text}") from None
    return simulator.load_scenario(path)


def _welfares(args) -> list[WelfareSpec]:
    return [WelfareSpec.parse(w) for w in (args.welfare or ["mmf"])]


def _paradigms(modes: list[str], gammas: list[float]) -> list[ParadigmConfig]:
    out = []
    for mode in modes:
        if mode.startswith("discounted"):
            if not gammas:
                raise UsageError(f"mode {mode} needs --gamma")
            out.extend(ParadigmConfig(mode, g) for g in gammas)
        else:
            out.append(ParadigmConfig(mode))
    return out


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        simulator.write_atomic(out, text)


def _episode_kwargs(args) -> dict:
    return dict(tiebreak=args.tiebreak, seed=args.seed, arrival=args.arrival,
                allow_discard=args.discard)


def cmd_simulate(args) -> int:
    scenario = _scenario(args.scenario)
    gammas = _gammas(args)
    if len(gammas) > 1:
        raise UsageError("simulate takes a single --gamma; use compare for sweeps")
    welfares = _welfares(args)
    if len(welfares) > 1:
        raise UsageError("simulate takes a single --welfare; use compare for sweeps")
    (paradigm,) = _paradigms([args.mode], gammas)
    trace = simulator.run_episode(scenario, paradigm, welfares[0], **_episode_kwargs(args))
    _emit(simulator.to_csv([trace]), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = _scenario(args.scenario)
    modes = [m.strip() for m in args.mode.split(",") if m.strip()]
    if len(set(modes)) != len(modes):
        raise UsageError("duplicate modes in --mode")
    gammas = _gammas(args)
    if len(set(gammas)) != len(gammas):
        raise UsageError("duplicate values in --gamma")
    configs = [(p, w) for p in _paradigms(modes, gammas) for w in _welfares(args)]
    traces = simulator.compare(scenario, configs, **_episode_kwargs(args))
    _emit(simulator.to_csv(traces), args.out)
    return EXIT_OK


def _format_table(rows: list[dict]) -> str:
    cols = list(rows[0])
    cells = [[repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def cmd_bounds(args) -> int:
    gammas = _gammas(args) or [0.9]
    if any(g >= 1.0 for g in gammas):
        raise UsageError("perfect recall is unbounded: --gamma must be < 1")
    rows = bounds_table(gammas, args.umax, args.delta, args.t or [100])
    sys.stdout.write(_format_table(rows))
    return EXIT_OK


def _cycle(scenario: simulator.Scenario) -> list:
    """Shortest period of the round sequence."""
    rounds = [r.items for r in scenario.rounds]
    for p in range(1, len(rounds) + 1):
        if all(rounds[i] == rounds[i % p] for i in range(len(rounds))):
            return rounds[:p]
    return rounds


def cmd_plan(args) -> int:
    scenario = _scenario(args.scenario)
    gammas = _gammas(args)
    if len(gammas) != 1:
        raise UsageError("plan needs exactly one --gamma")
    if gammas[0] >= 1.0:
        raise UsageError("perfect recall is unbounded: --gamma must be < 1")
    if any(a.arrival != 0 or a.departure is not None for a in scenario.agents):
        raise UsageError("plan needs every agent present for the whole scenario")
    welfares = _welfares(args)
    if len(welfares) > 1:
        raise UsageError("plan takes a single --welfare")
    u_max = args.umax if args.umax is not None else scenario.u_max
    spec = DiscretizationSpec(args.delta, u_max, gammas[0])
    mdp = build_augmented_mdp(_cycle(scenario), [a.id for a in scenario.agents],
                              ParadigmConfig("discounted_additive", gammas[0]), welfares[0],
                              spec, args.horizon, cap=args.cap)
    summary = compare_rollouts(mdp, value_iteration(mdp))
    text = "metric,value\n" + "".join(
        f"{k},{repr(v) if isinstance(v, float) else v}\n" for k, v in summary.items())
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pastfair", description=__doc__.splitlines()[0])
    parser.add_argument("--no-color", action="store_true", help="plain output (the default; kept for scripts)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, modes_help):
        p.add_argument("--scenario", required=True, help="scenario JSON (ex1.json / ex2.json are bundled)")
        p.add_argument("--mode", required=True, help=modes_help)
        p.add_argument("--gamma", type=_floats, help="past-discount factor(s), comma-separated")
        p.add_argument("--welfare", action="append",
                       help="utilitarian | mmf | nash | gini:w1,w2,... (repeatable for compare)")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tiebreak", choices=("lex", "random"), default="lex")
        p.add_argument("--arrival", choices=("global", "personal"), default="global",
                       help="denominator given to late agents in averaged modes")
        p.add_argument("--discard", action="store_true", help="allow items to go unassigned")

    p = sub.add_parser("simulate", help="run one configuration and write its trace CSV")
    common(p, " | ".join(MODES))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run several configurations into one long CSV")
    common(p, "comma-separated modes; discounted modes expand over --gamma")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bounds", help="print the bound and state-count table")
    p.add_argument("--gamma", type=_floats)
    p.add_argument("--umax", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--t", type=_ints, help="horizon(s) for the perfect-recall count")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("plan", help="finite-horizon planning on the binned augmented state")
    p.add_argument("--scenario", required=True)
    p.add_argument("--gamma", type=_floats, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--umax", type=float, default=None, help="defaults to the scenario's u_max")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--welfare", action="append")
    p.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (StateSpaceTooLarge, AllocationSpaceTooLarge) as exc:
        print(f"pastfair: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ScenarioError, WelfareError, FairnessStateError,
            AllocationError, StateSpaceError, OSError) as exc:
        print(f"pastfair: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

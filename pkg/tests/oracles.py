"""Independent brute-force references used to freeze golden values.

Nothing here imports the package; the rules are re-derived from scratch.
Accumulation is left-to-right so exact float ties line up with the engine.
"""
from itertools import product


def welfare(kind, zs, weights=None):
    if kind == "utilitarian":
        acc = 0.0
        for z in zs:
            acc += z
        return acc
    if kind == "egalitarian":
        return min(zs)
    if kind == "nash":
        acc = 1.0
        for z in zs:
            acc *= z
        return acc
    if kind == "generalized_gini":
        acc = 0.0
        for w, z in zip(weights, sorted(zs)):
            acc += w * z
        return acc
    raise ValueError(kind)


def update(mode, gamma, z, d, t, u):
    """Return (new z, new d) for one agent."""
    if mode == "instantaneous":
        return u, d
    if mode == "perfect_additive":
        return z + u, d
    if mode == "perfect_averaged":
        return (z * t + u) / (t + 1), d + 1
    if mode == "discounted_additive":
        return gamma * z + u, d
    if mode == "discounted_averaged":
        return (gamma * z * d + u) / (gamma * d + 1), gamma * d + 1
    raise ValueError(mode)


def best_assignment(mode, gamma, zs, ds, t, util, active, kind, weights=None):
    """util[item][agent]; returns (assignment tuple, preview list, welfare)."""
    n = len(zs)
    m = len(util)
    best = None
    for assign in product(range(n), repeat=m):
        u = [0.0] * n
        for item, agent in enumerate(assign):
            u[agent] += util[item][agent]
        prev = [update(mode, gamma, zs[i], ds[i], t, u[i])[0] for i in range(n)]
        w = welfare(kind, [prev[i] for i in active], weights)
        if best is None or w > best[2]:
            best = (assign, prev, w)
    return best


def episode(rounds, arrivals, mode, gamma, kind="egalitarian", details=None):
    """rounds: list of util matrices over the full agent list (None = absent).

    arrivals[i] is the round index agent i joins. Returns per-round
    (assignment over active agents, cumulative sums, Z).
    """
    n = len(arrivals)
    z = [0.0] * n
    d = [0.0] * n
    cum = [0.0] * n
    out = []
    details = [] if details is None else details
    for t, util in enumerate(rounds):
        act = [i for i in range(n) if arrivals[i] <= t]
        sub = [[row[i] for i in act] for row in util]
        zs = [z[i] for i in act]
        ds = [d[i] for i in act]
        assign, prev, w = best_assignment(mode, gamma, zs, ds, t, sub,
                                          list(range(len(act))), kind)
        u = [0.0] * len(act)
        for item, a in enumerate(assign):
            u[a] += sub[item][a]
        for k, i in enumerate(act):
            z[i], d[i] = update(mode, gamma, z[i], d[i], t, u[k])
            cum[i] += u[k]
        out.append(([act[a] for a in assign], list(cum), list(z)))
        details.append((act, u, w))
    return out


EX1 = [[0.2, 0.3], [0.5, 0.5]]  # rows: cake, donut; cols: Alice, Bob


def ex2_rounds(total):
    return [[[0.5, 0.0]] if t < 10 else [[0.5, 0.5]] for t in range(total)]


def catch_up_run(trace, arrival=10, bob=1):
    run = 0
    for assign, _, _ in trace[arrival:]:
        if assign == [bob]:
            run += 1
        else:
            break
    return run


def golden_csv(rounds, arrivals, names, item_ids, mode, gamma, label):
    """Long-format trace CSV rebuilt from the brute-force episode."""
    details = []
    trace = episode(rounds, arrivals, mode, gamma, details=details)
    lines = ["t,config,agent,step_utility,cumulative_utility,perceived_Z,welfare,allocation"]
    for t, ((assign, cum, z), (act, u, w)) in enumerate(zip(trace, details)):
        alloc = ";".join(f"{i}\u2192{names[a]}" for i, a in zip(item_ids, assign))
        for k, i in enumerate(act):
            lines.append(f"{t},{label},{names[i]},{u[k]!r},{cum[i]!r},{z[i]!r},{w!r},{alloc}")
    return "\n".join(lines) + "\n"

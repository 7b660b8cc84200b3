"""Pure-Python allocation search (fallback when the extension is absent).

Arguments, shared with the compiled kernel:

``util``      (m, n) item-by-agent utility matrix
``offset``    per-agent offsets, ``denom`` per-agent denominators
``active``    agent indices whose perceived utilities enter the welfare
``choices``   n, or n + 1 when the last choice means "discard"
``kind``      0 utilitarian, 1 egalitarian, 2 nash, 3 generalized gini

Allocations are enumerated with the first item most significant, so the
enumeration index is also the lexicographic rank.
"""
from itertools import product

import numpy as np


def _scores(util, offset, denom, active, choices, kind, weights, eps):
    util = [list(map(float, row)) for row in np.asarray(util)]
    offset = [float(x) for x in offset]
    denom = [float(x) for x in denom]
    active = [int(i) for i in active]
    weights = [float(x) for x in weights]
    n = len(offset)
    m = len(util)
    for assign in product(range(choices), repeat=m):
        u = [0.0] * n
        for k in range(m):
            a = assign[k]
            if a < n:
                u[a] += util[k][a]
        z = [(offset[i] + u[i]) / denom[i] for i in active]
        if kind == 0:
            acc = 0.0
            for v in z:
                acc += v
        elif kind == 1:
            acc = min(z)
        elif kind == 2:
            acc = 1.0
            for v in z:
                acc *= v + eps
        else:
            acc = 0.0
            for w, v in zip(weights, sorted(z)):
                acc += w * v
        yield acc


def best_allocation(util, offset, denom, active, choices, kind, weights, eps):
    best_idx, best = 0, 0.0
    for idx, w in enumerate(_scores(util, offset, denom, active, choices, kind, weights, eps)):
        if idx == 0 or w > best:
            best_idx, best = idx, w
    return best_idx, best


def score_allocations(util, offset, denom, active, choices, kind, weights, eps):
    return np.fromiter(_scores(util, offset, denom, active, choices, kind, weights, eps), dtype=np.float64)

"""Brute-force ground truth at small n: grid minimax/maximin and the
intertwining falsification test.

The grid oracle enumerates sorted node configurations over a uniform grid
of the simplex, evaluates F on an aligned t grid, and reduces exactly. It
is independent of the solver's golden-section machinery on purpose: the two
routes cross-check each other. Budgets keep the combinatorics honest; n
beyond 3 is out of scope by design.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import NEG_INF, NodeConfig, Problem
from .evaluation import maxima_vector, sup_over_interval
from .truncation import box_for_nodes, ensure_certificate

__all__ = [
    "GridSpec",
    "IntertwiningReport",
    "grid_minimax",
    "grid_maximin",
    "intertwining_test",
    "estimate_overline_lipschitz",
]


@dataclass(frozen=True)
class GridSpec:
    """Node/evaluation grids for the brute-force oracle.

    ``box`` bounds the node simplex ([-box, box]^n on the axis; ignored on a
    segment, where the endpoints take over). ``t_samples`` is a minimum for
    the evaluation grid, which is kept aligned with the node grid so every
    node is itself a sample.
    """

    box: float
    nodes_per_axis: int
    t_samples: int = 0
    seed: int = 0
    budget: int = 5_000_000

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ValueError("nodes_per_axis must be >= 2")
        if self.box <= 0:
            raise ValueError("box must be positive")


def _config_count(m: int, n: int) -> int:
    return math.comb(m + n - 1, n)


def _node_window(problem: Problem, spec: GridSpec) -> tuple:
    if problem.domain.kind == "segment":
        return problem.domain.endpoints
    return (-spec.box, spec.box)


def _grids(problem: Problem, spec: GridSpec, t_halfwidth: float):
    """Aligned node and evaluation grids; node grid is a slice of the t grid."""
    lo, hi = _node_window(problem, spec)
    m = spec.nodes_per_axis
    h = (hi - lo) / (m - 1)
    ext_lo = int(np.ceil(max(0.0, (lo - (-t_halfwidth))) / h - 1e-9)) if lo > -t_halfwidth else 0
    ext_hi = int(np.ceil(max(0.0, (t_halfwidth - hi)) / h - 1e-9)) if hi < t_halfwidth else 0
    ts = lo - h * ext_lo + h * np.arange(ext_lo + m + ext_hi)
    want = max(spec.t_samples, 0)
    if ts.size < want:
        # densify by an integer factor to honor the requested sample count
        k = int(np.ceil(want / ts.size))
        fine = np.linspace(ts[0], ts[-1], (ts.size - 1) * k + 1)
        node_idx = np.arange(ext_lo, ext_lo + m) * k
        return fine, node_idx
    node_idx = np.arange(ext_lo, ext_lo + m)
    return ts, node_idx


def _tables(problem: Problem, ts: np.ndarray, node_idx: np.ndarray):
    us = ts[node_idx]
    kmat = problem.kernel.evaluate(ts[:, None] - us[None, :])
    jvec = problem.field.evaluate(ts)
    return us, np.asarray(kmat, dtype=float), np.asarray(jvec, dtype=float)


def _check_budget(problem: Problem, spec: GridSpec):
    count = _config_count(spec.nodes_per_axis, problem.n)
    if count > spec.budget:
        raise ValueError(
            f"grid budget exceeded: {count} configurations > budget {spec.budget}"
        )


def grid_minimax(problem: Problem, spec: GridSpec):
    """Exhaustive minimum of the global maximum over the gridded simplex.

    The evaluation grid only needs to cover the certified truncation box,
    inside which every configuration attains its global supremum.
    Returns (value, argmin NodeConfig).
    """
    _check_budget(problem, spec)
    n = problem.n
    r = problem.multiplicities.as_array()
    if problem.domain.kind == "segment":
        t_half = max(abs(problem.domain.endpoints[0]), abs(problem.domain.endpoints[1]))
    else:
        t_half = 1.02 * max(ensure_certificate(problem).q, spec.box)
    ts, node_idx = _grids(problem, spec, t_half)
    us, kmat, jvec = _tables(problem, ts, node_idx)
    m = us.size

    best = math.inf
    best_cfg = None
    if n == 1:
        vals = jvec[:, None] + r[0] * kmat
        over = vals.max(axis=0)
        g = int(np.argmin(over))
        return float(over[g]), NodeConfig((float(us[g]),))
    for head in itertools.combinations_with_replacement(range(m), n - 1):
        partial = jvec.copy()
        for i, gi in enumerate(head):
            partial += r[i] * kmat[:, gi]
        tail = np.arange(head[-1], m)
        s = partial[:, None] + r[-1] * kmat[:, tail]
        over = s.max(axis=0)
        g = int(np.argmin(over))
        if over[g] < best:
            best = float(over[g])
            best_cfg = tuple(float(us[i]) for i in head) + (float(us[tail[g]]),)
    return best, NodeConfig(best_cfg)


def grid_maximin(problem: Problem, spec: GridSpec):
    """Exhaustive maximum of the smallest interval maximum over the simplex.

    End intervals are truncated to the per-box bound for the node window, so
    the reductions see honest interval suprema. Returns (value, argmax
    NodeConfig).
    """
    _check_budget(problem, spec)
    n = problem.n
    r = problem.multiplicities.as_array()
    if problem.domain.kind == "segment":
        a, b = problem.domain.endpoints
        t_half = max(abs(a), abs(b))
    else:
        lo, hi = box_for_nodes(problem, [-spec.box] * n)
        t_half = hi
    ts, node_idx = _grids(problem, spec, t_half)
    us, kmat, jvec = _tables(problem, ts, node_idx)
    m = us.size
    t_len = ts.size

    best = NEG_INF
    best_cfg = None
    if n == 1:
        s = jvec[:, None] + r[0] * kmat
        pm = np.maximum.accumulate(s, axis=0)
        sm = np.maximum.accumulate(s[::-1], axis=0)[::-1]
        cols = np.arange(m)
        under = np.minimum(pm[node_idx, cols], sm[node_idx, cols])
        g = int(np.argmax(under))
        return float(under[g]), NodeConfig((float(us[g]),))
    if n == 2:
        for g1 in range(m):
            partial = jvec + r[0] * kmat[:, g1]
            tail = np.arange(g1, m)
            s = partial[:, None] + r[1] * kmat[:, tail]
            i1 = node_idx[g1]
            i2 = node_idx[tail]
            cols = np.arange(tail.size)
            m0 = s[: i1 + 1].max(axis=0)
            rm = np.maximum.accumulate(s[i1:], axis=0)
            m_mid = rm[i2 - i1, cols]
            sm = np.maximum.accumulate(s[::-1], axis=0)
            m_last = sm[t_len - 1 - i2, cols]
            under = np.minimum(np.minimum(m0, m_mid), m_last)
            g = int(np.argmax(under))
            if under[g] > best:
                best = float(under[g])
                best_cfg = (float(us[g1]), float(us[tail[g]]))
        return best, NodeConfig(best_cfg)
    # n >= 3: exact per-configuration reduction (slow path, budget-guarded)
    for gs in itertools.combinations_with_replacement(range(m), n):
        col = jvec.copy()
        for ri, gi in zip(r, gs):
            col += ri * kmat[:, gi]
        idx = [int(node_idx[g]) for g in gs]
        edges = [0] + idx + [t_len - 1]
        under = min(
            float(col[a : b + 1].max()) for a, b in zip(edges[:-1], edges[1:])
        )
        if under > best:
            best = under
            best_cfg = tuple(float(us[g]) for g in gs)
    return best, NodeConfig(best_cfg)


@dataclass(frozen=True)
class IntertwiningReport:
    pairs_checked: int
    pairs_skipped: int
    strict_violations: tuple
    nonstrict_violations: tuple

    @property
    def ok(self) -> bool:
        return not self.strict_violations and not self.nonstrict_violations


def intertwining_test(
    problem: Problem,
    trials: int,
    box: float,
    *,
    seed: int = 0,
) -> IntertwiningReport:
    """Search random configuration pairs for maxima-vector domination.

    No pair with finite local maxima may dominate strictly in every
    coordinate; for singular strictly concave kernels even non-strict
    domination is impossible between distinct configurations. Pairs with a
    -inf coordinate are skipped (the property only speaks about finite
    maxima vectors); identical pairs are exempt from the non-strict check.
    """
    rng = np.random.default_rng(seed)
    n = problem.n
    strong = problem.kernel.singular and problem.kernel.strictly_concave
    strict = []
    nonstrict = []
    checked = 0
    skipped = 0
    for _ in range(trials):
        x = np.sort(rng.uniform(-box, box, n))
        y = np.sort(rng.uniform(-box, box, n))
        mx = maxima_vector(problem, x).m
        my = maxima_vector(problem, y).m
        if not (np.all(np.isfinite(mx)) and np.all(np.isfinite(my))):
            skipped += 1
            continue
        checked += 1
        for a, b, ma, mb in ((x, y, mx, my), (y, x, my, mx)):
            if np.all(ma > mb):
                strict.append({"x": a.tolist(), "y": b.tolist(),
                               "mx": ma.tolist(), "my": mb.tolist()})
            elif strong and not np.array_equal(a, b) and np.all(ma >= mb):
                nonstrict.append({"x": a.tolist(), "y": b.tolist(),
                                  "mx": ma.tolist(), "my": mb.tolist()})
    return IntertwiningReport(
        pairs_checked=checked,
        pairs_skipped=skipped,
        strict_violations=tuple(strict),
        nonstrict_violations=tuple(nonstrict),
    )


def estimate_overline_lipschitz(
    problem: Problem,
    box: float,
    *,
    samples: int = 48,
    step: float = 1e-3,
    seed: int = 0,
    safety: float = 1.5,
) -> float:
    """Empirical Lipschitz bound of the global maximum along simplex directions.

    Used to convert grid spacing into a value-error allowance for oracle
    comparisons; a sampled estimate, inflated by ``safety``.
    """
    rng = np.random.default_rng(seed)
    n = problem.n
    if problem.domain.kind == "segment":
        a, b = problem.domain.endpoints
        lo_w, hi_w = a, b
        sup_lo, sup_hi = a, b
    else:
        cert = ensure_certificate(problem)
        lo_w, hi_w = -box, box
        sup_lo, sup_hi = -1.02 * max(cert.q, box), 1.02 * max(cert.q, box)
    worst = 0.0
    for _ in range(samples):
        y = np.sort(rng.uniform(lo_w, hi_w, n))
        d = rng.normal(size=n)
        d /= max(np.linalg.norm(d), 1e-12)
        y2 = np.sort(np.clip(y + step * d, lo_w, hi_w))
        v1, _ = sup_over_interval(problem, y, sup_lo, sup_hi)
        v2, _ = sup_over_interval(problem, y2, sup_lo, sup_hi)
        if math.isfinite(v1) and math.isfinite(v2):
            worst = max(worst, abs(v2 - v1) / step)
    return safety * worst

"""Evaluation of the sum of translates and its interval local maxima.

The central object is F(y, t) = J(t) + sum_j r_j K(t - y_j). The n nodes
split the line into n+1 intervals; the suprema of F over those intervals
(m_0 .. m_n) drive everything else: their maximum is the global supremum,
their minimum is the quantity the maximin problem optimizes, and their
spread measures distance from equioscillation.

Between consecutive nodes F is concave whenever the field is, so interval
maxima are computed by golden-section search with endpoint checks. For
non-concave fields a coarse grid scan with local refinement is used instead;
that path is heuristic by nature. Unbounded end intervals are truncated to
certified boxes supplied by the truncation module.

Everything here is pure; maxima of distinct intervals are evaluated
independently (and could run in parallel), with a fixed reduction order so
results are deterministic for a given configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    NEG_INF,
    EvalOptions,
    Field,
    Kernel,
    Multiplicities,
    Problem,
    as_node_array,
)

__all__ = [
    "MaximaVector",
    "sum_of_translates",
    "translate_sum_function",
    "golden_section_max",
    "grid_refine_max",
    "interval_maximum",
    "maxima_vector",
    "sup_over_interval",
    "oscillation_spread",
    "weighted_node_average",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MaximaVector:
    """The n+1 interval suprema of F(y, .) with attaining locations.

    ``truncation_used`` records the finite search box that replaced the two
    unbounded end intervals (equal to the domain endpoints on a segment).
    """

    m: np.ndarray
    argmax: np.ndarray
    truncation_used: tuple

    @property
    def overline(self) -> float:
        """Global supremum of F: max of the interval maxima."""
        return float(np.max(self.m))

    @property
    def underline(self) -> float:
        """Smallest interval maximum."""
        return float(np.min(self.m))

    @property
    def spread(self) -> float:
        return oscillation_spread(self)


def sum_of_translates(kernel: Kernel, field: Field, r: Multiplicities, y, t):
    """Evaluate F(y, t) = J(t) + sum_j r_j K(t - y_j).

    ``t`` may be a scalar or an array; -inf appears exactly when J(t) = -inf
    or the kernel is singular and t hits a node.
    """
    f = translate_sum_function(kernel, field, r, y)
    return f(t)


def translate_sum_function(kernel: Kernel, field: Field, r: Multiplicities, y):
    """Build a vectorized t -> F(y, t) closure with y frozen."""
    y_arr = as_node_array(y)
    r_arr = r.as_array() if isinstance(r, Multiplicities) else np.asarray(r, dtype=float)
    if r_arr.shape != y_arr.shape:
        raise ValueError(f"{r_arr.size} multiplicities for {y_arr.size} nodes")

    def f(t):
        t_arr = np.asarray(t, dtype=float)
        shifts = t_arr[..., None] - y_arr
        vals = field.evaluate(t_arr) + kernel.evaluate(shifts) @ r_arr
        if t_arr.ndim == 0:
            return float(vals)
        return vals

    return f


def _problem_function(problem: Problem, y):
    return translate_sum_function(problem.kernel, problem.field, problem.multiplicities, y)


def golden_section_max(f, lo: float, hi: float, *, tol_t: float = 1e-10, max_iter: int = 200):
    """Maximize f over [lo, hi] by golden-section search.

    Exact for concave (more generally unimodal) f. Endpoints are evaluated
    explicitly so boundary maxima are not lost; -inf values are legal and
    push the bracket away. Returns (value, argmax).
    """
    if hi < lo:
        raise ValueError(f"inverted bounds ({lo}, {hi})")
    best_v = NEG_INF
    best_t = lo
    def consider(t, v):
        nonlocal best_v, best_t
        if v > best_v:
            best_v, best_t = v, t
    consider(lo, f(lo))
    if hi == lo:
        return best_v, best_t
    consider(hi, f(hi))
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    consider(c, fc)
    consider(d, fd)
    it = 0
    while (b - a) > tol_t and it < max_iter:
        if fc < fd:
            a = c
            c, fc = d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            consider(d, fd)
        else:
            b = d
            d, fd = c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            consider(c, fc)
        it += 1
    mid = 0.5 * (a + b)
    consider(mid, f(mid))
    return best_v, best_t


def grid_refine_max(
    f,
    lo: float,
    hi: float,
    *,
    cells: int = 512,
    tol_t: float = 1e-10,
    max_iter: int = 200,
    refine_top: int = 3,
):
    """Coarse grid scan plus golden-section refinement around the best cells.

    Fallback for fields without a concavity flag; global optimality is
    heuristic. Returns (value, argmax).
    """
    if hi < lo:
        raise ValueError(f"inverted bounds ({lo}, {hi})")
    if hi == lo:
        return f(lo), lo
    ts = np.linspace(lo, hi, cells + 1)
    vs = np.asarray(f(ts), dtype=float)
    order = np.argsort(vs)[::-1][:refine_top]
    best_v = float(vs[order[0]])
    best_t = float(ts[order[0]])
    for i in order:
        a = ts[max(i - 1, 0)]
        b = ts[min(i + 1, cells)]
        v, t = golden_section_max(f, float(a), float(b), tol_t=tol_t, max_iter=max_iter)
        if v > best_v:
            best_v, best_t = v, t
    return best_v, best_t


def _max_on_interval(problem: Problem, f, lo: float, hi: float):
    """Supremum of F over [lo, hi] intersected with the field's finite support."""
    if hi < lo:
        raise ValueError(f"inverted bounds ({lo}, {hi})")
    opts: EvalOptions = problem.eval_opts
    s_lo, s_hi = problem.field.finite_support
    a = max(lo, s_lo)
    b = min(hi, s_hi)
    if a > b:
        return NEG_INF, 0.5 * (lo + hi)
    if a == b:
        return f(a), a
    if problem.field.concave:
        return golden_section_max(f, a, b, tol_t=opts.tol_t, max_iter=opts.golden_max_iter)
    return grid_refine_max(
        f, a, b, cells=opts.grid_cells, tol_t=opts.tol_t, max_iter=opts.golden_max_iter
    )


def interval_maximum(problem: Problem, y, j: int, bounds):
    """Supremum of F(y, .) over the j-th inter-node interval.

    ``bounds`` must be the interval endpoints: (y_j, y_{j+1}) for interior j,
    with the certified truncation replacing -inf/+inf for j = 0 and j = n.
    Returns (value, argmax).
    """
    y_arr = as_node_array(y)
    n = y_arr.size
    if not 0 <= j <= n:
        raise ValueError(f"interval index {j} out of range 0..{n}")
    lo, hi = (float(v) for v in bounds)
    f = _problem_function(problem, y_arr)
    return _max_on_interval(problem, f, lo, hi)


def _end_bounds(problem: Problem, y_arr: np.ndarray, box) -> tuple:
    if problem.domain.kind == "segment":
        return problem.domain.endpoints
    if box is not None:
        lo, hi = (float(v) for v in box)
        return lo, hi
    # certificate-backed box for unbounded end intervals (lazy import: the
    # truncation module builds on this one)
    from .truncation import box_for_nodes

    return box_for_nodes(problem, y_arr)


def maxima_vector(problem: Problem, y, *, box=None) -> MaximaVector:
    """All n+1 interval maxima of F(y, .) for sorted nodes y.

    On a segment the end intervals run to the endpoints; on the axis (or
    semiaxis, via the -inf field extension) they are truncated to a
    certified box, which is recorded in the result.
    """
    y_arr = as_node_array(y)
    if problem.domain.kind == "segment":
        a, b = problem.domain.endpoints
        if y_arr[0] < a or y_arr[-1] > b:
            raise ValueError("nodes outside the segment domain")
    lo0, hin = _end_bounds(problem, y_arr, box)
    if lo0 > y_arr[0] or hin < y_arr[-1]:
        raise ValueError("truncation box does not contain the nodes")
    f = _problem_function(problem, y_arr)
    edges = np.concatenate(([lo0], y_arr, [hin]))
    n1 = y_arr.size + 1
    m = np.empty(n1)
    arg = np.empty(n1)
    for j in range(n1):
        m[j], arg[j] = _max_on_interval(problem, f, float(edges[j]), float(edges[j + 1]))
    return MaximaVector(m=m, argmax=arg, truncation_used=(float(lo0), float(hin)))


def sup_over_interval(problem: Problem, y, lo: float, hi: float):
    """Supremum of F(y, .) over [lo, hi], partitioned at the nodes.

    Splitting at the nodes keeps each piece concave (for concave fields), so
    the per-piece golden-section searches are exact. Returns (value, argmax).
    """
    y_arr = as_node_array(y)
    f = _problem_function(problem, y_arr)
    inside = y_arr[(y_arr > lo) & (y_arr < hi)]
    edges = np.concatenate(([lo], inside, [hi]))
    best_v, best_t = NEG_INF, lo
    for a, b in zip(edges[:-1], edges[1:]):
        v, t = _max_on_interval(problem, f, float(a), float(b))
        if v > best_v:
            best_v, best_t = v, t
    return best_v, best_t


def oscillation_spread(m) -> float:
    """max_j m_j - min_j m_j; +inf when the vector mixes -inf with finite
    values (or is identically -inf, a degenerate configuration)."""
    if isinstance(m, MaximaVector):
        m = m.m
    arr = np.asarray(m, dtype=float)
    if np.all(np.isfinite(arr)):
        return float(np.max(arr) - np.min(arr))
    return math.inf


def weighted_node_average(r: Multiplicities, y) -> float:
    """Multiplicity-weighted node mean, the Jensen comparison center."""
    y_arr = as_node_array(y)
    r_arr = r.as_array()
    return float(np.dot(r_arr, y_arr) / np.sum(r_arr))

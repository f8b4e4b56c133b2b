"""Equioscillation solver: minimax = maximin node configurations.

The solver always works on a bounded segment. Axis problems are first
truncated to [-ell, ell] with ell strictly above both the certified
truncation radius q and the maximin radius L (so optimizing on the segment
is equivalent to optimizing on the line, and a segment equioscillation
point lifts to the axis), then mapped affinely to [0, 1]. Semiaxis problems
ride the axis path through their -inf field extension, with a final clamp
of negative nodes to 0. Segment problems are solved directly, or through
the unit reduction when requested.

On the segment the iteration is a damped Gauss-Seidel balance: each node in
turn is moved to the position equalizing the maxima of its two adjacent
intervals (a 1-d root of a monotone function, solved by Brent bracketing),
scaled by the damping factor. Equalizing adjacent maxima is the
bisection-style exchange step; the intertwining property of the maxima
vector is what rules out cycling. Convergence means the spread of the n+1
interval maxima fell below the requested tolerance; the iteration itself
carries no convergence proof, so non-convergence is reported, not raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import (
    AdmissibilityError,
    Field,
    Kernel,
    NodeConfig,
    Problem,
    ProblemDomain,
    check_admissibility,
    segment_domain,
)
from .evaluation import (
    MaximaVector,
    _max_on_interval,
    maxima_vector,
    translate_sum_function,
)
from .truncation import TruncationCertificate, ensure_certificate, maximin_box_L

__all__ = [
    "SolveOptions",
    "SolveReport",
    "AffineMap",
    "reduce_to_unit",
    "solve_equioscillation",
    "solve_multistart",
    "solve_semiaxis",
]


@dataclass(frozen=True)
class SolveOptions:
    """Solver knobs; defaults favor robustness over speed."""

    spread_tol: float = 1e-9
    max_iters: int = 10_000
    damping: float = 0.5
    multistart: int = 1
    seed: int = 0
    via_unit: bool = False  # route segment solves through the [0, 1] reduction

    def __post_init__(self):
        if not self.spread_tol > 0:
            raise ValueError("spread_tol must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.multistart < 1:
            raise ValueError("multistart must be >= 1")


@dataclass(eq=False)
class SolveReport:
    """Outcome of one solve: extremal nodes, level, and diagnostics."""

    nodes: NodeConfig
    level: float
    spread: float
    maxima: MaximaVector
    truncation: TruncationCertificate | None
    iterations: int
    converged: bool
    domain: ProblemDomain
    trace: tuple = ()
    seed: int = 0
    start_index: int = 0

    def to_json_dict(self) -> dict:
        return {
            "nodes": list(self.nodes.y),
            "level": self.level,
            "spread": self.spread,
            "maxima": {
                "m": self.maxima.m.tolist(),
                "argmax": self.maxima.argmax.tolist(),
                "truncation_used": list(self.maxima.truncation_used),
            },
            "truncation": self.truncation.to_json_dict() if self.truncation else None,
            "iterations": self.iterations,
            "converged": self.converged,
            "domain": {
                "kind": self.domain.kind,
                "endpoints": list(self.domain.endpoints) if self.domain.endpoints else None,
            },
            "seed": self.seed,
            "start_index": self.start_index,
        }


@dataclass(frozen=True)
class AffineMap:
    """x = (t - center) / (2 halfwidth) + 1/2, mapping a segment onto [0, 1]."""

    center: float
    halfwidth: float

    def to_unit(self, t):
        out = (np.asarray(t, dtype=float) - self.center) / (2.0 * self.halfwidth) + 0.5
        return float(out) if out.ndim == 0 else out

    def from_unit(self, x):
        out = self.center + 2.0 * self.halfwidth * (np.asarray(x, dtype=float) - 0.5)
        return float(out) if out.ndim == 0 else out


def reduce_to_unit(problem: Problem, ell: float, center: float = 0.0):
    """Transplant the problem from [center-ell, center+ell] onto [0, 1].

    Returns (unit problem, affine map). The transformed kernel and field keep
    every structural property, and F is carried over exactly:
    F(y, t) = F_unit(map(y), map(t)) for t in the segment.
    """
    ell = float(ell)
    center = float(center)
    if not (math.isfinite(ell) and ell > 0):
        raise ValueError("ell must be positive and finite")
    amap = AffineMap(center=center, halfwidth=ell)
    kernel, field = problem.kernel, problem.field

    new_halfwidth = kernel.domain_halfwidth / (2.0 * ell)
    if new_halfwidth < 1.0:
        raise ValueError("kernel domain too small for this reduction")

    w = np.asarray(field.finiteness_witnesses, dtype=float)
    inside = np.sum((w > center - ell) & (w < center + ell))
    boundary = np.sum((w == center - ell) | (w == center + ell))
    if inside + 0.5 * boundary <= problem.n:
        raise ValueError(
            "insufficient finiteness points inside the reduction segment; enlarge ell"
        )

    def k_eval(x, _k=kernel.evaluate, _ell=ell):
        return _k(2.0 * _ell * np.asarray(x, dtype=float))

    unit_kernel = Kernel(
        evaluate=k_eval,
        value_at_zero=kernel.value_at_zero,
        monotone=kernel.monotone,
        singular=kernel.singular,
        strictly_concave=kernel.strictly_concave,
        domain_halfwidth=new_halfwidth,
        name=f"{kernel.name}@unit",
        params=dict(kernel.params),
    )

    def j_eval(x, _j=field.evaluate, _ell=ell, _c=center):
        return _j(2.0 * _ell * (np.asarray(x, dtype=float) - 0.5) + _c)

    keep = (w >= center - ell) & (w <= center + ell)
    s_lo, s_hi = field.finite_support
    unit_field = Field(
        evaluate=j_eval,
        upper_bound=field.upper_bound,
        finiteness_witnesses=tuple(np.sort(amap.to_unit(w[keep])).tolist()),
        admissibility_budget=field.admissibility_budget,
        concave=field.concave,
        finite_support=(
            amap.to_unit(s_lo) if math.isfinite(s_lo) else -math.inf,
            amap.to_unit(s_hi) if math.isfinite(s_hi) else math.inf,
        ),
        name=f"{field.name}@unit",
        params=dict(field.params),
    )
    unit_problem = Problem(
        kernel=unit_kernel,
        field=unit_field,
        multiplicities=problem.multiplicities,
        domain=segment_domain(0.0, 1.0),
        eval_opts=problem.eval_opts,
        admissibility_asserted=True,  # decay is irrelevant on a segment
    )
    return unit_problem, amap


# ---------------------------------------------------------------------------
# the balancing iteration


def _enforce_separation(y: np.ndarray, lo: float, hi: float, minsep: float) -> np.ndarray:
    y = np.clip(np.sort(y), lo, hi)
    for i in range(1, y.size):
        if y[i] < y[i - 1] + minsep:
            y[i] = y[i - 1] + minsep
    overflow = y[-1] - hi
    if overflow > 0:
        y -= overflow
        for i in range(y.size - 2, -1, -1):
            if y[i] > y[i + 1] - minsep:
                y[i] = y[i + 1] - minsep
    return np.clip(y, lo, hi)


def _initial_nodes(problem: Problem, a: float, b: float, run: int, seed: int) -> np.ndarray:
    """Weighted witness quantiles for the first start, random afterwards."""
    n = problem.n
    s_lo, s_hi = problem.field.finite_support
    lo = max(a, s_lo)
    hi = min(b, s_hi)
    pad = 1e-3 * (hi - lo)
    lo, hi = lo + pad, hi - pad
    if run == 0:
        r = problem.multiplicities.as_array()
        p = (np.cumsum(r) - 0.5 * r) / np.sum(r)
        w = np.asarray(problem.field.finiteness_witnesses, dtype=float)
        w = w[(w >= lo) & (w <= hi)]
        if w.size >= 2:
            y0 = np.quantile(w, p)
        else:
            y0 = lo + (hi - lo) * p
    else:
        rng = np.random.default_rng(seed + run)
        y0 = np.sort(rng.uniform(lo, hi, n))
    minsep = max(1e-6 * (b - a), 1e-12)
    return _enforce_separation(y0, lo, hi, minsep)


def _balance_on_segment(problem: Problem, opts: SolveOptions, y0: np.ndarray):
    """Damped Gauss-Seidel equalization of adjacent interval maxima.

    Returns (nodes, sweeps, trace, iteration_converged).
    """
    a, b = problem.domain.endpoints
    width = b - a
    n = y0.size
    kernel = problem.kernel
    sep = 1e-12 * width if kernel.singular else 0.0
    margin = max(sep, 1e-15 * width)
    s_lo, s_hi = problem.field.finite_support
    lo_support = max(a, s_lo)
    hi_support = min(b, s_hi)
    y = y0.copy()
    trace = []
    target = 0.5 * opts.spread_tol
    best_spread = math.inf
    stall = 0
    converged = False
    sweeps = 0
    rtol = 4.0 * np.finfo(float).eps

    def g_factory(i, lo_b, hi_b):
        def g(u):
            yy = y.copy()
            yy[i] = u
            f = translate_sum_function(kernel, problem.field, problem.multiplicities, yy)
            ml, _ = _max_on_interval(problem, f, lo_b, u)
            mr, _ = _max_on_interval(problem, f, u, hi_b)
            return ml - mr

        return g

    for sweep in range(opts.max_iters):
        sweeps = sweep + 1
        mv = maxima_vector(problem, y)
        spread = mv.spread
        trace.append(spread)
        if np.all(np.isneginf(mv.m)):
            raise ValueError("degenerate field: every interval maximum is -inf")
        if spread <= target:
            converged = True
            break
        if spread < best_spread * (1.0 - 1e-3):
            best_spread = spread
            stall = 0
        else:
            stall += 1
            if stall >= 25:
                break  # numerical floor above the requested tolerance
        for i in range(n):
            lo_b = y[i - 1] if i > 0 else a
            hi_b = y[i + 1] if i < n - 1 else b
            a_br = max(lo_b, lo_support) + margin
            b_br = min(hi_b, hi_support) - margin
            if not a_br < b_br:
                continue
            g = g_factory(i, lo_b, hi_b)
            ga = g(a_br)
            gb = g(b_br)
            if ga >= 0.0:
                u_star = a_br
            elif gb <= 0.0:
                u_star = b_br
            elif math.isfinite(ga) and math.isfinite(gb):
                u_star = brentq(g, a_br, b_br, xtol=max(width * 1e-15, 1e-300), rtol=rtol)
            else:
                # support holes can leave an infinite endpoint; plain bisection
                lo_x, hi_x = a_br, b_br
                for _ in range(80):
                    mid = 0.5 * (lo_x + hi_x)
                    gm = g(mid)
                    if gm < 0.0:
                        lo_x = mid
                    else:
                        hi_x = mid
                u_star = 0.5 * (lo_x + hi_x)
            u_new = y[i] + opts.damping * (u_star - y[i])
            y[i] = min(max(u_new, a_br), b_br)
    return y, sweeps, tuple(trace), converged


# ---------------------------------------------------------------------------
# driver


_DEFAULT_PROBE = (10.0, 100.0, 1000.0, 10000.0, -10.0, -100.0, -1000.0, -10000.0)


def _check_admissible(problem: Problem) -> None:
    if problem.admissibility_asserted:
        return
    report = check_admissibility(
        problem.field, problem.kernel, problem.total_mass, _DEFAULT_PROBE
    )
    if not report.plausible:
        raise AdmissibilityError(
            "field does not look admissible for this kernel and total mass "
            f"(tail value {report.worst_value:g}); assert admissibility to override"
        )


def _prepare_axis(problem: Problem, opts: SolveOptions):
    _check_admissible(problem)
    cert = ensure_certificate(problem, seed=opts.seed)
    L = problem._cache.get("maximin_L")
    if L is None:
        L = maximin_box_L(problem)
        problem._cache["maximin_L"] = L
    w = np.asarray(problem.field.finiteness_witnesses, dtype=float)
    wspan = float(np.max(np.abs(w)))
    ell = 1.05 * max(cert.q, L, wspan)
    unit_problem, amap = reduce_to_unit(problem, ell)
    return unit_problem, amap, cert


def _solve_single(problem: Problem, opts: SolveOptions, run: int) -> SolveReport:
    kind = problem.domain.kind
    if kind == "segment":
        if opts.via_unit:
            a, b = problem.domain.endpoints
            work, amap = reduce_to_unit(problem, 0.5 * (b - a), center=0.5 * (a + b))
        else:
            work, amap = problem, None
        cert = None
    else:
        work, amap, cert = _prepare_axis(problem, opts)

    wa, wb = work.domain.endpoints
    y0 = _initial_nodes(work, wa, wb, run, opts.seed)
    y_work, sweeps, trace, it_converged = _balance_on_segment(work, opts, y0)

    y_final = amap.from_unit(y_work) if amap is not None else y_work
    y_final = np.atleast_1d(np.asarray(y_final, dtype=float))
    if kind == "semiaxis":
        clamped = np.maximum(y_final, 0.0)
        if not np.array_equal(clamped, y_final):
            before = maxima_vector(problem, np.sort(y_final)).overline
            after = maxima_vector(problem, np.sort(clamped)).overline
            if after > before + 1e-6 * (1.0 + abs(before)):
                raise ValueError("clamping raised the global maximum; kernel looks non-monotone")
        y_final = np.sort(clamped)

    mv = maxima_vector(problem, y_final)
    spread = mv.spread
    converged = bool(it_converged and spread <= opts.spread_tol)
    return SolveReport(
        nodes=NodeConfig(tuple(y_final.tolist())),
        level=mv.overline,
        spread=spread,
        maxima=mv,
        truncation=cert,
        iterations=sweeps,
        converged=converged,
        domain=problem.domain,
        trace=trace,
        seed=opts.seed,
        start_index=run,
    )


def solve_multistart(problem: Problem, opts: SolveOptions | None = None) -> list:
    """Run every multistart instance and return all reports (index 0 starts
    from witness quantiles, the rest from seeded random configurations)."""
    opts = opts or SolveOptions()
    return [_solve_single(problem, opts, run) for run in range(opts.multistart)]


def solve_equioscillation(problem: Problem, opts: SolveOptions | None = None) -> SolveReport:
    """Solve the minimax = maximin = equioscillation problem.

    Returns the best multistart report: smallest spread, ties broken by the
    lexicographically smallest node vector. ``converged`` is False when the
    spread tolerance was not reached; with a non-singular kernel and a field
    that is not upper semicontinuous an equioscillation point may simply not
    exist, so this outcome is reported rather than raised.
    """
    opts = opts or SolveOptions()
    reports = solve_multistart(problem, opts)
    return min(reports, key=lambda rep: (rep.spread, rep.nodes.y))


def solve_semiaxis(problem: Problem, opts: SolveOptions | None = None) -> SolveReport:
    """Solve on [0, inf): the axis problem of the -inf field extension,
    followed by clamping of negative nodes to 0."""
    if problem.domain.kind != "semiaxis":
        raise ValueError("solve_semiaxis expects a semiaxis problem")
    return solve_equioscillation(problem, opts)

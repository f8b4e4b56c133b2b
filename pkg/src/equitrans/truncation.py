"""Truncation certificates: reduce unbounded suprema to finite boxes.

For a monotone kernel and an admissible field there is a radius q such that
the global supremum of F(y, .) is already attained (as a supremum) on
[-q, q], for every node configuration and any multiplicity budget up to R.
This module constructs such a q from n+1 anchor points where the field is
finite, certifies it by scanning a tail inequality, and provides the larger
boxes needed when individual end-interval maxima (hence the minimum of the
local maxima) must be computed: the maximin radius L and the per-box bound
M_L. All certificates are numerical, produced by doubling scans plus
bisection over finite probe grids; verify_q rechecks them on random
configurations. Scan parameters ride along in the certificate so failures
are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .model import NEG_INF, AdmissibilityError, Field, Kernel, NodeConfig, Problem, as_node_array
from .evaluation import sup_over_interval, maxima_vector, translate_sum_function

__all__ = [
    "TruncationCertificate",
    "VerifyQReport",
    "select_anchors",
    "mrs_q",
    "verify_q",
    "clamp_to_box",
    "maximin_box_L",
    "box_M_L",
    "ensure_certificate",
    "box_for_nodes",
]

_SCAN_DEFAULTS = dict(probe_span=64.0, probe_points=96, rel_tol=1e-3, horizon=2.0**40)


def _scan_decay(g, start: float, *, floor: float, probe_span: float,
                probe_points: int, rel_tol: float, horizon: float) -> float:
    """Smallest T >= floor (within rel_tol) whose probed tail satisfies g <= 0.

    ok(T) samples g on a geometric grid over (T, T*probe_span] and demands
    every value <= 0 plus a decreasing (or already -inf) tail, the numeric
    stand-in for "holds for all t > T". Doubles outward from ``start`` until
    ok, shrinks toward ``floor`` while still ok, then bisects the boundary.
    """
    floor = max(floor, 1e-3)

    def ok(T: float) -> bool:
        ts = T * np.geomspace(1.0 + 1e-9, probe_span, probe_points)
        vals = np.asarray(g(ts), dtype=float)
        if not np.all(vals <= 0.0):
            return False
        if np.isneginf(vals[-1]):
            return True
        return bool(vals[-1] < vals[-3])

    T = max(start, floor)
    if ok(T):
        good, bad = T, None
        while good / 2.0 >= floor:
            half = good / 2.0
            if ok(half):
                good = half
            else:
                bad = half
                break
        if bad is None:
            return max(good, floor)
    else:
        bad = T
        while True:
            T *= 2.0
            if T > horizon:
                raise AdmissibilityError(
                    "tail inequality never certified; field is likely not admissible "
                    f"for this kernel within horizon {horizon:g}"
                )
            if ok(T):
                good = T
                break
            bad = T
    while (good - bad) > rel_tol * good:
        mid = 0.5 * (bad + good)
        if ok(mid):
            good = mid
        else:
            bad = mid
    return max(good, floor)


@dataclass(eq=False)
class TruncationCertificate:
    """A certified truncation radius q with its anchor construction.

    ``per_anchor_bounds`` are the certified per-anchor radii; q is their
    maximum and satisfies q >= |z| for every anchor z. ``scan`` records the
    sampling parameters and seed that produced the certificate.
    """

    q: float
    anchors: np.ndarray
    per_anchor_bounds: np.ndarray
    side: str = "both"
    scan: dict = dc_field(default_factory=dict)
    _m_boxes: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.anchors = np.asarray(self.anchors, dtype=float)
        self.per_anchor_bounds = np.asarray(self.per_anchor_bounds, dtype=float)
        if self.side not in ("both", "positive", "negative"):
            raise ValueError(f"bad side {self.side!r}")
        if self.q < np.max(np.abs(self.anchors)) - 1e-12:
            raise ValueError("q must dominate every anchor magnitude")

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "anchors": self.anchors.tolist(),
            "per_anchor_bounds": self.per_anchor_bounds.tolist(),
            "side": self.side,
            "scan": dict(self.scan),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TruncationCertificate":
        return cls(
            q=float(d["q"]),
            anchors=np.asarray(d["anchors"], dtype=float),
            per_anchor_bounds=np.asarray(d["per_anchor_bounds"], dtype=float),
            side=d.get("side", "both"),
            scan=dict(d.get("scan", {})),
        )


def select_anchors(field: Field, n: int, search_window) -> np.ndarray:
    """Pick n+1 finiteness points with pairwise gaps > 2, preferring small |z|.

    Witnesses are tried first, then a grid scan of the window. The gap
    constraint comes from the 1-neighborhood argument behind the truncation
    construction and is taken literally.
    """
    lo, hi = (float(v) for v in search_window)
    if not lo < hi:
        raise ValueError("empty search window")
    w = np.asarray(field.finiteness_witnesses, dtype=float)
    candidates = w[(w >= lo) & (w <= hi)]

    def greedy(points: np.ndarray):
        chosen: list[float] = []
        for z in sorted(points.tolist(), key=lambda v: (abs(v), v)):
            if all(abs(z - c) > 2.0 for c in chosen):
                chosen.append(z)
            if len(chosen) == n + 1:
                return np.sort(np.asarray(chosen))
        return None

    anchors = greedy(candidates)
    if anchors is None:
        grid = np.linspace(lo, hi, max(257, 4 * (n + 2)))
        finite = grid[np.isfinite(field(grid))]
        anchors = greedy(np.concatenate([candidates, finite]))
    if anchors is None:
        raise ValueError(
            f"cannot find {n + 1} points with gaps > 2 where the field is finite "
            f"in window ({lo}, {hi}); the field is too sparse for this construction"
        )
    return anchors


def mrs_q(
    kernel: Kernel,
    field: Field,
    R: float,
    anchors,
    *,
    inflate: float = 1.1,
    seed: int = 0,
    **scan_overrides,
) -> TruncationCertificate:
    """Certify a truncation radius q from the given anchors.

    For each anchor z the scan finds the smallest grid-certified T >= |z|
    such that J(t) + R*(K(t-z+1) - min{K(-1), K(1)}) - J(z) <= 0 for all
    probed t > T, with the mirrored form K(t-z-1) handling t < -T. The
    certified radius is inflated by ``inflate`` for safety; q is the maximum
    over anchors.
    """
    if not kernel.monotone:
        raise ValueError("truncation requires a monotone kernel")
    R = float(R)
    if R <= 0:
        raise ValueError("R must be positive")
    anchors = np.asarray(anchors, dtype=float)
    if anchors.ndim != 1 or anchors.size < 1:
        raise ValueError("need at least one anchor")
    if np.any(np.diff(anchors) <= 2.0):
        raise ValueError("anchor gaps must exceed 2")
    j_anchor = field(anchors)
    if not np.all(np.isfinite(j_anchor)):
        raise ValueError("field must be finite at every anchor")

    params = dict(_SCAN_DEFAULTS)
    params.update(scan_overrides)
    c = min(kernel(-1.0), kernel(1.0))
    bounds = np.empty(anchors.size)
    for i, (z, jz) in enumerate(zip(anchors, j_anchor)):
        def g_pos(s, z=z, jz=jz):
            return field(s) + R * (kernel(s - z + 1.0) - c) - jz

        def g_neg(s, z=z, jz=jz):
            return field(-s) + R * (kernel(-s - z - 1.0) - c) - jz

        t_pos = _scan_decay(g_pos, start=max(abs(z), 1.0), floor=abs(z), **params)
        t_neg = _scan_decay(g_neg, start=max(abs(z), 1.0), floor=abs(z), **params)
        bounds[i] = max(abs(z), inflate * max(t_pos, t_neg))
    return TruncationCertificate(
        q=float(np.max(bounds)),
        anchors=anchors,
        per_anchor_bounds=bounds,
        side="both",
        scan={**params, "inflate": inflate, "seed": seed, "R": R},
    )


@dataclass(frozen=True)
class VerifyQReport:
    trials: int
    violation_count: int
    max_violation: float
    tol: float
    examples: tuple
    sup_locations: tuple

    @property
    def ok(self) -> bool:
        return self.violation_count == 0


def verify_q(
    certificate: TruncationCertificate,
    problem: Problem,
    trials: int = 200,
    *,
    seed: int = 0,
    tol: float = 1e-9,
    node_span_factor: float = 5.0,
    box_factor: float = 3.0,
) -> VerifyQReport:
    """Check the certificate on random configurations, nodes far outside [-q, q].

    For each trial the supremum of F over [-box_factor*q, box_factor*q] is
    compared with the supremum over [-q, q]; both are computed exactly (per
    node-interval golden section), so any positive excess beyond ``tol`` is a
    genuine violation. Violations are reported, never raised.
    """
    q = certificate.q
    rng = np.random.default_rng(seed)
    n = problem.n
    configs = [np.zeros(n)]
    for _ in range(max(trials - 1, 0)):
        configs.append(np.sort(rng.uniform(-node_span_factor * q, node_span_factor * q, n)))
    worst = NEG_INF
    examples = []
    locations = []
    for y in configs:
        v_in, t_in = sup_over_interval(problem, y, -q, q)
        v_out, t_out = sup_over_interval(problem, y, -box_factor * q, box_factor * q)
        violation = v_out - v_in
        worst = max(worst, violation)
        locations.append(t_out)
        if violation > tol:
            examples.append({"y": y.tolist(), "inside": v_in, "outside": v_out,
                             "excess": float(violation), "argmax": float(t_out)})
    return VerifyQReport(
        trials=len(configs),
        violation_count=len(examples),
        max_violation=float(worst),
        tol=tol,
        examples=tuple(examples[:10]),
        sup_locations=tuple(float(t) for t in locations),
    )


def clamp_to_box(y, ell: float) -> NodeConfig:
    """Clamp every node into [-ell, ell]; sortedness is preserved."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    y_arr = as_node_array(y)
    return NodeConfig(tuple(np.clip(y_arr, -ell, ell).tolist()))


def _reference_config(problem: Problem) -> np.ndarray:
    """Nodes placed strictly between n+1 witnesses, so every local maximum is finite."""
    w = np.asarray(problem.field.finiteness_witnesses, dtype=float)
    n = problem.n
    if w.size < n + 1:
        raise ValueError("not enough witnesses for a reference configuration")
    return 0.5 * (w[:n] + w[1 : n + 1])


def maximin_box_L(problem: Problem, x_ref=None, **scan_overrides) -> float:
    """Certified radius L with sup-of-min behavior confined to the box [-L, L].

    Uses a reference configuration x with finite smallest local maximum mu,
    then certifies, by doubling scan plus bisection on both tail conditions,
    an L1 >= max(|x_1|, |x_n|) with F(0, t) <= mu for |t| > L1 and an
    L >= L1 with J(t) + sum_j r_j max{K(t-L1), K(t+L1)} <= mu for |t| > L.
    The smallest local maximum of any configuration leaving [-L, L]^n then
    cannot exceed mu.
    """
    cert = ensure_certificate(problem)
    x_arr = _reference_config(problem) if x_ref is None else as_node_array(x_ref)
    w = np.asarray(problem.field.finiteness_witnesses, dtype=float)
    box0 = max(cert.q, float(np.max(np.abs(x_arr))), float(np.max(np.abs(w)))) + 1.0
    mv = maxima_vector(problem, x_arr, box=(-box0, box0))
    mu = mv.underline
    if np.isneginf(mu):
        raise ValueError(
            "reference configuration has a -inf local maximum; place nodes "
            "strictly between finiteness witnesses"
        )
    params = dict(_SCAN_DEFAULTS)
    params.update(scan_overrides)
    kernel, field = problem.kernel, problem.field
    R = problem.total_mass
    r_arr = problem.multiplicities.as_array()
    edge = max(float(np.max(np.abs(x_arr))), 1e-3)

    def g0_pos(s):
        return field(s) + R * kernel(s) - mu

    def g0_neg(s):
        return field(-s) + R * kernel(-s) - mu

    l1 = max(
        _scan_decay(g0_pos, start=max(edge, 1.0), floor=edge, **params),
        _scan_decay(g0_neg, start=max(edge, 1.0), floor=edge, **params),
    )

    def g1_pos(s):
        piled = np.maximum(kernel(s - l1), kernel(s + l1))
        return field(s) + np.sum(r_arr) * piled - mu

    def g1_neg(s):
        piled = np.maximum(kernel(-s - l1), kernel(-s + l1))
        return field(-s) + np.sum(r_arr) * piled - mu

    L = max(
        _scan_decay(g1_pos, start=max(l1, 1.0), floor=l1, **params),
        _scan_decay(g1_neg, start=max(l1, 1.0), floor=l1, **params),
    )
    return float(L)


def box_M_L(
    problem: Problem,
    L: float,
    *,
    samples: int = 24,
    seed: int = 0,
    probe_span: float = 8.0,
    probe_points: int = 64,
    grid_cells: int = 1024,
    horizon: float = 2.0**40,
) -> float:
    """Radius M_L >= L such that end-interval maxima of configurations inside
    [-L, L]^n are attained within [-M_L, M_L].

    Certified on sampled configurations (corners, zeros, random interior):
    beyond M_L the function F(y, .) must not exceed its supremum over the
    ring L <= |t| <= M_L on either side, and must be decaying at the probe
    tail. A doubling scan finds the first radius passing all samples.
    """
    L = float(L)
    if not L > 0:
        raise ValueError("L must be positive")
    rng = np.random.default_rng(seed)
    n = problem.n
    configs = [np.zeros(n), np.full(n, -L), np.full(n, L)]
    if n > 1:
        half = np.concatenate([np.full(n // 2, -L), np.full(n - n // 2, L)])
        configs.append(np.sort(half))
    for _ in range(samples):
        configs.append(np.sort(rng.uniform(-L, L, n)))
    fs = [translate_sum_function(problem.kernel, problem.field, problem.multiplicities, y)
          for y in configs]

    def side_ok(f, M: float, sign: int) -> bool:
        ring = sign * np.linspace(L, M, grid_cells + 1)
        sup_ring = float(np.max(f(ring)))
        probes = sign * M * np.geomspace(1.0 + 1e-9, probe_span, probe_points)
        vals = np.asarray(f(probes), dtype=float)
        if np.isneginf(sup_ring):
            return bool(np.all(np.isneginf(vals)))
        if not np.all(vals <= sup_ring + 1e-12 * (1.0 + abs(sup_ring))):
            return False
        return bool(np.isneginf(vals[-1]) or vals[-1] < vals[-3])

    M = max(2.0 * L, L + 1.0)
    while True:
        if all(side_ok(f, M, +1) and side_ok(f, M, -1) for f in fs):
            return float(M)
        M *= 2.0
        if M > horizon:
            raise AdmissibilityError(
                f"no per-box bound found below horizon {horizon:g}; "
                "field decay looks insufficient"
            )


def ensure_certificate(problem: Problem, *, seed: int = 0) -> TruncationCertificate:
    """Build (once) and cache the truncation certificate for an axis problem."""
    cert = problem._cache.get("certificate")
    if cert is None:
        w = np.asarray(problem.field.finiteness_witnesses, dtype=float)
        span = float(np.max(np.abs(w)))
        window = (-(span + 2.5 * (problem.n + 2)), span + 2.5 * (problem.n + 2))
        anchors = select_anchors(problem.field, problem.n, window)
        cert = mrs_q(problem.kernel, problem.field, problem.total_mass, anchors, seed=seed)
        problem._cache["certificate"] = cert
    return cert


def box_for_nodes(problem: Problem, y) -> tuple:
    """Symmetric box guaranteeing honest end-interval maxima for these nodes.

    Takes L = max(q, |y_1|, |y_n|), quantized upward to limit the number of
    distinct per-box scans, and returns (-M_L, M_L) with M_L cached on the
    certificate.
    """
    cert = ensure_certificate(problem)
    y_arr = as_node_array(y)
    L = max(cert.q, float(np.max(np.abs(y_arr))))
    # quantize L to q * 2^k so repeated evaluations share cached scans
    k = max(0, math.ceil(math.log2(max(L / cert.q, 1.0)) - 1e-12))
    L_q = cert.q * (2.0**k)
    key = round(L_q, 9)
    M = cert._m_boxes.get(key)
    if M is None:
        M = box_M_L(problem, L_q)
        cert._m_boxes[key] = M
    return (-M, M)

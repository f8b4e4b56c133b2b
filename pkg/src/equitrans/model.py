"""Kernels, fields, node configurations, and problem assembly.

Value objects for the extremal-configuration solver. A kernel is concave on
(-inf, 0) and (0, inf) with matching one-sided limits at the origin; a field
is an upper-bounded external function that is finite at enough points;
multiplicities weight the kernel translates. Structural properties
(monotone, singular, strictly concave, admissible decay) are declared by
constructors and spot-checked by sampling, never proved symbolically.

All evaluators accept floats or numpy arrays. -inf is an ordinary value:
sums propagate it and comparisons order it below every float. +inf never
arises for valid inputs because fields are bounded above and kernels are
real-valued away from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

NEG_INF = float("-inf")

__all__ = [
    "NEG_INF",
    "AdmissibilityError",
    "Kernel",
    "Field",
    "Multiplicities",
    "NodeConfig",
    "ProblemDomain",
    "EvalOptions",
    "Problem",
    "AdmissibilityReport",
    "KernelValidationReport",
    "FieldValidationReport",
    "make_log_kernel",
    "make_inverse_power_kernel",
    "make_table_kernel",
    "make_gaussian_field",
    "make_freud_field",
    "make_segment_field",
    "make_linear_decay_field",
    "make_constant_field",
    "make_table_field",
    "check_admissibility",
    "validate_kernel",
    "validate_field",
    "axis_domain",
    "semiaxis_domain",
    "segment_domain",
]


class AdmissibilityError(RuntimeError):
    """A decay scan exhausted its horizon without certifying J + R*K -> -inf."""


def _scalar_or_array(fn: Callable[[np.ndarray], np.ndarray], t):
    arr = np.asarray(t, dtype=float)
    out = fn(arr)
    if arr.ndim == 0:
        return float(out)
    return np.asarray(out, dtype=float)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Concave kernel on the punctured line, with declared structural flags.

    Parameters
    ----------
    evaluate : callable
        Vectorized map t -> K(t), defined for all t (the value at 0 must be
        the common one-sided limit, possibly -inf).
    value_at_zero : float
        lim_{t->0} K(t); -inf exactly when the kernel is singular.
    monotone : bool
        Nonincreasing on (-inf, 0), nondecreasing on (0, inf).
    singular : bool
        K(0) = -inf.
    strictly_concave : bool
        Strict concavity on each half-line.
    domain_halfwidth : float
        K is defined on (-p, p); infinity for whole-line kernels.
    """

    evaluate: Callable
    value_at_zero: float
    monotone: bool
    singular: bool
    strictly_concave: bool
    domain_halfwidth: float = math.inf
    name: str = "custom"
    params: dict = dc_field(default_factory=dict)
    scalar_evaluate: Callable | None = None  # optional pure-float fast path

    def __call__(self, t):
        return _scalar_or_array(self.evaluate, t)


@dataclass(frozen=True, eq=False)
class Field:
    """Upper-bounded external function J with finiteness witnesses.

    ``finite_support`` is the closed interval outside which J is identically
    -inf ((-inf, inf) when J is finite-valued on the whole line). ``concave``
    enables golden-section interval maximization; non-concave fields fall
    back to grid scanning.
    """

    evaluate: Callable
    upper_bound: float
    finiteness_witnesses: tuple
    admissibility_budget: float = math.inf
    concave: bool = False
    finite_support: tuple = (-math.inf, math.inf)
    name: str = "custom"
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.finiteness_witnesses, dtype=float)
        if w.size == 0:
            raise ValueError("field needs at least one finiteness witness")
        if not np.all(np.diff(w) > 0):
            raise ValueError("finiteness witnesses must be strictly increasing")
        vals = self(w)
        if not np.all(np.isfinite(vals)):
            bad = w[~np.isfinite(np.atleast_1d(vals))]
            raise ValueError(f"field is not finite at declared witnesses {bad.tolist()}")

    def __call__(self, t):
        return _scalar_or_array(self.evaluate, t)


@dataclass(frozen=True)
class Multiplicities:
    """Positive weights r_1..r_n attached to the kernel translates."""

    r: tuple

    def __post_init__(self):
        r = tuple(float(v) for v in self.r)
        if len(r) == 0:
            raise ValueError("need at least one multiplicity")
        if not all(math.isfinite(v) and v > 0 for v in r):
            raise ValueError("multiplicities must be finite and positive")
        object.__setattr__(self, "r", r)

    def __len__(self):
        return len(self.r)

    @property
    def total(self) -> float:
        """R = r_1 + ... + r_n."""
        return float(np.sum(self.r))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)


@dataclass(frozen=True)
class NodeConfig:
    """A nondecreasing vector of node positions (a point of the node simplex)."""

    y: tuple

    def __post_init__(self):
        y = tuple(float(v) for v in self.y)
        if len(y) == 0:
            raise ValueError("need at least one node")
        if not all(math.isfinite(v) for v in y):
            raise ValueError("nodes must be finite")
        if any(b < a for a, b in zip(y, y[1:])):
            raise ValueError(f"nodes must be nondecreasing, got {y}")
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.y)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)


def as_node_array(y) -> np.ndarray:
    """Coerce a NodeConfig or sequence to a validated sorted float array."""
    if isinstance(y, NodeConfig):
        return y.as_array()
    return NodeConfig(tuple(np.atleast_1d(np.asarray(y, dtype=float)).tolist())).as_array()


@dataclass(frozen=True)
class ProblemDomain:
    """Where the optimization lives: whole axis, right semiaxis, or a segment."""

    kind: str
    endpoints: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("axis", "semiaxis", "segment"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "segment":
            if self.endpoints is None:
                raise ValueError("segment domain requires endpoints")
            a, b = (float(v) for v in self.endpoints)
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"segment endpoints must satisfy a < b, got {self.endpoints}")
            object.__setattr__(self, "endpoints", (a, b))
        elif self.endpoints is not None:
            raise ValueError(f"{self.kind} domain takes no endpoints")


def axis_domain() -> ProblemDomain:
    return ProblemDomain("axis")


def semiaxis_domain() -> ProblemDomain:
    return ProblemDomain("semiaxis")


def segment_domain(a: float, b: float) -> ProblemDomain:
    return ProblemDomain("segment", (a, b))


@dataclass(frozen=True)
class EvalOptions:
    """Tolerances for interval maximization (argument, value, iteration caps)."""

    tol_t: float = 1e-10
    tol_v: float = 1e-12
    golden_max_iter: int = 200
    grid_cells: int = 512


@dataclass(eq=False)
class Problem:
    """A full minimax/maximin instance: kernel, field, multiplicities, domain."""

    kernel: Kernel
    field: Field
    multiplicities: Multiplicities
    domain: ProblemDomain
    eval_opts: EvalOptions = dc_field(default_factory=EvalOptions)
    admissibility_asserted: bool = False
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = self.n
        w = np.asarray(self.field.finiteness_witnesses, dtype=float)
        if self.domain.kind == "segment":
            a, b = self.domain.endpoints
            if self.kernel.domain_halfwidth < (b - a):
                raise ValueError("kernel domain too small for this segment")
            # boundary witnesses count with weight 1/2
            inside = np.sum((w > a) & (w < b))
            boundary = np.sum((w == a) | (w == b))
            if inside + 0.5 * boundary <= n:
                raise ValueError(
                    f"field must be finite at more than n={n} points of the segment "
                    f"(boundary points count 1/2); witnesses give {inside + 0.5 * boundary}"
                )
        else:
            if w.size < n + 1:
                raise ValueError(f"need at least n+1={n + 1} finiteness witnesses, got {w.size}")
            if not math.isinf(self.kernel.domain_halfwidth):
                raise ValueError("axis and semiaxis problems need a whole-line kernel")
        if self.domain.kind == "semiaxis":
            probes = self.field(np.asarray([-1e-3, -1.0, -10.0]))
            if not np.all(np.isneginf(probes)):
                raise ValueError("semiaxis problems require the field to be -inf on t < 0")

    @property
    def n(self) -> int:
        return len(self.multiplicities)

    @property
    def total_mass(self) -> float:
        return self.multiplicities.total


# ---------------------------------------------------------------------------
# kernel constructors


def make_log_kernel() -> Kernel:
    """The logarithmic kernel t -> log|t|, the polynomial-root model case."""

    def evaluate(t):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(t))

    return Kernel(
        evaluate=evaluate,
        value_at_zero=NEG_INF,
        monotone=True,
        singular=True,
        strictly_concave=True,
        name="log",
    )


def make_inverse_power_kernel(s: float) -> Kernel:
    """Kernel t -> -|t|^(-s) for s > 0 (monotone, singular, strictly concave)."""
    s = float(s)
    if not (math.isfinite(s) and s > 0):
        raise ValueError(f"inverse power exponent must be positive, got {s}")

    def evaluate(t):
        with np.errstate(divide="ignore"):
            return -np.abs(t) ** (-s)

    return Kernel(
        evaluate=evaluate,
        value_at_zero=NEG_INF,
        monotone=True,
        singular=True,
        strictly_concave=True,
        name="inverse_power",
        params={"s": s},
    )


def make_table_kernel(
    t_samples: Sequence[float],
    values: Sequence[float],
    *,
    value_at_zero: float | None = None,
) -> Kernel:
    """Kernel interpolated linearly on each half-line from sample tables.

    Samples must avoid 0 and cover both half-lines. Outside the sampled
    range the edge value is extended as a constant, which preserves
    concavity and monotonicity. Structural flags are inferred from a
    validation run on the interpolant, not trusted from the caller.
    """
    t_arr = np.asarray(t_samples, dtype=float)
    v_arr = np.asarray(values, dtype=float)
    if t_arr.ndim != 1 or t_arr.shape != v_arr.shape or t_arr.size < 4:
        raise ValueError("kernel table needs matching 1-d t/value arrays with >= 4 samples")
    if np.any(t_arr == 0):
        raise ValueError("kernel table samples must avoid t = 0")
    order = np.argsort(t_arr)
    t_arr, v_arr = t_arr[order], v_arr[order]
    neg = t_arr < 0
    pos = t_arr > 0
    if neg.sum() < 2 or pos.sum() < 2:
        raise ValueError("kernel table needs >= 2 samples on each half-line")
    tn, vn = t_arr[neg], v_arr[neg]
    tp, vp = t_arr[pos], v_arr[pos]

    if value_at_zero is None:
        # extrapolate the innermost segment of each side to 0 and demand agreement
        left = vn[-1] + (0.0 - tn[-1]) * (vn[-1] - vn[-2]) / (tn[-1] - tn[-2])
        right = vp[0] + (0.0 - tp[0]) * (vp[1] - vp[0]) / (tp[1] - tp[0])
        if abs(left - right) > 1e-6 * (1.0 + abs(left) + abs(right)):
            raise ValueError(
                "one-sided limits at 0 disagree; pass value_at_zero explicitly"
            )
        value_at_zero = 0.5 * (left + right)
    value_at_zero = float(value_at_zero)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, dtype=float)
        mn = t < 0
        mp = t > 0
        out[mn] = np.interp(t[mn], tn, vn)
        out[mp] = np.interp(t[mp], tp, vp)
        out[t == 0] = value_at_zero
        return out

    kernel = Kernel(
        evaluate=evaluate,
        value_at_zero=value_at_zero,
        monotone=True,
        singular=bool(np.isneginf(value_at_zero)),
        strictly_concave=False,  # piecewise linear is never strictly concave
        domain_halfwidth=math.inf,
        name="table",
        params={"samples": int(t_arr.size)},
    )
    report = validate_kernel(kernel)
    return Kernel(
        evaluate=evaluate,
        value_at_zero=value_at_zero,
        monotone=report.monotone_ok,
        singular=kernel.singular,
        strictly_concave=False,
        domain_halfwidth=math.inf,
        name="table",
        params={"samples": int(t_arr.size)},
    )


# ---------------------------------------------------------------------------
# field constructors


def _symmetric_witnesses(span: float, count: int) -> tuple:
    return tuple(np.linspace(-span, span, count).tolist())


def make_gaussian_field(
    scale: float = 1.0,
    *,
    witness_span: float | None = None,
    witness_count: int = 25,
) -> Field:
    """Field t -> -scale * t^2 (log of a squared-exponential weight)."""
    scale = float(scale)
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError(f"scale must be positive, got {scale}")
    if witness_span is None:
        witness_span = 1.0 + 3.0 / math.sqrt(scale)

    def evaluate(t):
        return -scale * t * t

    return Field(
        evaluate=evaluate,
        upper_bound=0.0,
        finiteness_witnesses=_symmetric_witnesses(witness_span, witness_count),
        concave=True,
        name="gaussian",
        params={"scale": scale},
    )


def make_freud_field(
    power: float = 3.0,
    scale: float = 1.0,
    *,
    witness_span: float | None = None,
    witness_count: int = 25,
) -> Field:
    """Field t -> -scale * |t|^power; concave for power >= 1."""
    power, scale = float(power), float(scale)
    if not (math.isfinite(power) and power > 0):
        raise ValueError(f"power must be positive, got {power}")
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError(f"scale must be positive, got {scale}")
    if witness_span is None:
        witness_span = 1.0 + (4.0 / scale) ** (1.0 / power)

    def evaluate(t):
        return -scale * np.abs(t) ** power

    return Field(
        evaluate=evaluate,
        upper_bound=0.0,
        finiteness_witnesses=_symmetric_witnesses(witness_span, witness_count),
        concave=power >= 1.0,
        name="freud",
        params={"power": power, "scale": scale},
    )


def make_segment_field(
    a: float,
    b: float,
    *,
    inside_value: float = 0.0,
    witness_count: int = 33,
) -> Field:
    """Field equal to a constant on [a, b] and -inf outside."""
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"need a < b, got {(a, b)}")
    inside_value = float(inside_value)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= a) & (t <= b), inside_value, NEG_INF)

    return Field(
        evaluate=evaluate,
        upper_bound=inside_value,
        finiteness_witnesses=tuple(np.linspace(a, b, witness_count).tolist()),
        concave=True,
        finite_support=(a, b),
        name="segment",
        params={"a": a, "b": b, "inside_value": inside_value},
    )


def make_linear_decay_field(slope: float = 1.0, *, witness_count: int = 8) -> Field:
    """Semiaxis field t -> -slope*t on t >= 0, -inf on t < 0."""
    slope = float(slope)
    if not (math.isfinite(slope) and slope > 0):
        raise ValueError(f"slope must be positive, got {slope}")

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, -slope * t, NEG_INF)

    # witness gaps exceed 2 so the truncation anchors can reuse them
    witnesses = tuple((0.5 + 2.5 * np.arange(witness_count)).tolist())
    return Field(
        evaluate=evaluate,
        upper_bound=0.0,
        finiteness_witnesses=witnesses,
        concave=True,
        finite_support=(0.0, math.inf),
        name="linear_decay",
        params={"slope": slope},
    )


def make_constant_field(
    value: float = 0.0,
    *,
    witness_span: float = 10.0,
    witness_count: int = 25,
) -> Field:
    """Field identically equal to a constant; not admissible for growing kernels."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("constant field value must be finite")

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, value)

    return Field(
        evaluate=evaluate,
        upper_bound=value,
        finiteness_witnesses=_symmetric_witnesses(witness_span, witness_count),
        concave=True,
        name="const",
        params={"value": value},
    )


def make_table_field(t_samples: Sequence[float], values: Sequence[float]) -> Field:
    """Field interpolated linearly from a sample table, -inf outside its range.

    -inf sample values are allowed and carve holes in the finite support.
    Concavity is inferred from second differences of the finite samples.
    """
    t_arr = np.asarray(t_samples, dtype=float)
    v_arr = np.asarray(values, dtype=float)
    if t_arr.ndim != 1 or t_arr.shape != v_arr.shape or t_arr.size < 2:
        raise ValueError("field table needs matching 1-d t/value arrays with >= 2 samples")
    order = np.argsort(t_arr)
    t_arr, v_arr = t_arr[order], v_arr[order]
    if np.any(np.diff(t_arr) == 0):
        raise ValueError("field table t samples must be distinct")
    finite = np.isfinite(v_arr)
    if finite.sum() < 2:
        raise ValueError("field table needs at least two finite values")

    lo, hi = float(t_arr[0]), float(t_arr[-1])

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, t_arr, v_arr)
        return np.where((t < lo) | (t > hi), NEG_INF, out)

    witnesses = tuple(t_arr[finite].tolist())
    fin_t = t_arr[finite]
    fin_v = v_arr[finite]
    concave = bool(np.all(np.diff(fin_v, 2) <= 1e-12 * (1.0 + np.abs(fin_v[1:-1])))) if fin_v.size >= 3 else True
    return Field(
        evaluate=evaluate,
        upper_bound=float(np.max(fin_v)),
        finiteness_witnesses=witnesses,
        concave=concave and bool(np.all(finite)),
        finite_support=(float(fin_t[0]), float(fin_t[-1])),
        name="table",
        params={"samples": int(t_arr.size)},
    )


# ---------------------------------------------------------------------------
# sampled structural checks


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the numeric decay probe for J(t) + R*K(t)."""

    plausible: bool
    worst_value: float
    note: str = "sampled plausibility check, not a proof of admissibility"


def check_admissibility(
    field: Field,
    kernel: Kernel,
    R: float,
    probe_grid: Sequence[float],
    *,
    floor: float = -10.0,
) -> AdmissibilityReport:
    """Probe whether J(t) + R*K(t) decreases to -inf in both directions.

    The grid must contain at least three probes on each side of 0; probes are
    ordered by increasing |t|. A side passes when the tail is strictly
    decreasing with final value below ``floor``, or when the tail is exactly
    -inf (field support exhausted).
    """
    grid = np.asarray(probe_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty probe grid")
    R = float(R)
    if R <= 0:
        raise ValueError("R must be positive")
    pos = np.sort(grid[grid > 0])
    neg = -np.sort(-grid[grid < 0])  # increasing magnitude
    if pos.size < 3 or neg.size < 3:
        raise ValueError("probe grid must cover both directions with >= 3 points each")

    def side_ok(ts):
        h = field(ts) + R * kernel(ts)
        tail = h[-3:]
        if np.isneginf(tail[-1]):
            return True, tail[-1]
        decreasing = tail[2] < tail[1] < tail[0]
        return bool(decreasing and tail[2] <= floor), tail[-1]

    ok_pos, last_pos = side_ok(pos)
    ok_neg, last_neg = side_ok(np.abs(neg) * -1.0)
    worst = max(last_pos, last_neg)
    return AdmissibilityReport(plausible=bool(ok_pos and ok_neg), worst_value=float(worst))


@dataclass(frozen=True)
class KernelValidationReport:
    concave_ok: bool
    limits_ok: bool
    monotone_ok: bool
    singular_ok: bool
    strictly_concave_ok: bool
    max_concavity_violation: float

    @property
    def ok(self) -> bool:
        return (
            self.concave_ok
            and self.limits_ok
            and self.monotone_ok
            and self.singular_ok
            and self.strictly_concave_ok
        )


def validate_kernel(
    kernel: Kernel,
    *,
    triples: int = 1000,
    seed: int = 0,
    span: float = 8.0,
    rel_tol: float = 1e-10,
) -> KernelValidationReport:
    """Spot-check the declared kernel structure by sampling.

    Concavity is tested through the shifted-difference inequality
    K(x+k+h) - K(x+h) <= K(x+k) - K(x) on random triples per half-line.
    """
    rng = np.random.default_rng(seed)
    span = min(span, 0.9 * kernel.domain_halfwidth) if math.isfinite(kernel.domain_halfwidth) else span

    def concavity_violation(sign):
        x = rng.uniform(1e-6, span / 2, triples)
        k = rng.uniform(1e-9, span / 4, triples)
        h = rng.uniform(1e-9, span / 4, triples)
        if sign < 0:
            x = -(x + k + h)  # keep x and x+k+h on the negative side
        lhs = kernel(x + k + h) - kernel(x + h)
        rhs = kernel(x + k) - kernel(x)
        scale = 1.0 + np.maximum.reduce(
            [np.abs(kernel(x)), np.abs(kernel(x + k)), np.abs(kernel(x + h))]
        )
        viol = (lhs - rhs) / scale
        return float(np.max(viol))

    v_pos = concavity_violation(+1)
    v_neg = concavity_violation(-1)
    max_viol = max(v_pos, v_neg)
    concave_ok = max_viol <= rel_tol

    v0 = kernel.value_at_zero
    left, right = kernel(-1e-9), kernel(1e-9)
    if np.isneginf(v0):
        limits_ok = left < -10.0 and right < -10.0
    else:
        limits_ok = (
            abs(left - v0) <= 1e-3 * (1.0 + abs(v0))
            and abs(right - v0) <= 1e-3 * (1.0 + abs(v0))
        )

    if kernel.monotone:
        tp = np.geomspace(1e-6, span, 256)
        vp = kernel(tp)
        vn = kernel(-tp)
        tol = rel_tol * (1.0 + np.abs(vp[:-1]))
        monotone_ok = bool(np.all(np.diff(vp) >= -tol) and np.all(np.diff(vn) >= -tol))
    else:
        monotone_ok = True

    if kernel.singular:
        singular_ok = np.isneginf(v0) and kernel(1e-12) < -5.0
    else:
        singular_ok = not np.isneginf(v0)

    if kernel.strictly_concave:
        x = np.linspace(0.05, span * 0.9, 128)
        hh = 0.05
        second = kernel(x - hh) + kernel(x + hh) - 2.0 * kernel(x)
        strictly_ok = bool(np.all(second < 0.0))
        xn = -x
        second_n = kernel(xn - hh) + kernel(xn + hh) - 2.0 * kernel(xn)
        strictly_ok = strictly_ok and bool(np.all(second_n < 0.0))
    else:
        strictly_ok = True

    return KernelValidationReport(
        concave_ok=bool(concave_ok),
        limits_ok=bool(limits_ok),
        monotone_ok=bool(monotone_ok),
        singular_ok=bool(singular_ok),
        strictly_concave_ok=bool(strictly_ok),
        max_concavity_violation=max_viol,
    )


@dataclass(frozen=True)
class FieldValidationReport:
    bounded_ok: bool
    witnesses_ok: bool
    max_excess: float

    @property
    def ok(self) -> bool:
        return self.bounded_ok and self.witnesses_ok


def validate_field(
    field: Field,
    *,
    samples: int = 10_000,
    seed: int = 0,
    span: float | None = None,
) -> FieldValidationReport:
    """Check J <= upper_bound on random samples and witness sanity."""
    rng = np.random.default_rng(seed)
    w = np.asarray(field.finiteness_witnesses, dtype=float)
    if span is None:
        span = 2.0 * max(1.0, float(np.max(np.abs(w)))) + 1.0
    ts = rng.uniform(-span, span, samples)
    vals = field(ts)
    excess = np.max(vals - field.upper_bound)
    witnesses_ok = bool(np.all(np.diff(w) > 0) and np.all(np.isfinite(field(w))))
    return FieldValidationReport(
        bounded_ok=bool(excess <= 1e-12 * (1.0 + abs(field.upper_bound))),
        witnesses_ok=witnesses_ok,
        max_excess=float(excess),
    )

"""Slope-parametric solver for the rate-vs-average-distortion trade-off.

Each operating point at slope s (nats per distortion unit, s <= 0) is the
fixed point of alternating updates on the output marginal q:

    channel_ij = q_j exp(s d_ij) / Q_i,   Q_i = sum_j q_j exp(s d_ij)
    q_j        = sum_i p_i channel_ij

which collapse to one multiplicative step per iteration.  The minimized
objective is the Lagrangian -sum_i p_i log2 Q_i; at the fixed point the
distortion is D(s) = sum_ij p_i channel_ij d_ij and the rate in bits is
R(s) = s D(s) / ln 2 - sum_i p_i log2 Q_i.

The convention exp(s * inf) = 0 applies for every s <= 0, so an infinite
distortion entry marks a pair the channel may never use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoFeasibleOutputError, NonConvergenceError
from .measures import (
    LN2,
    Alphabet,
    Channel,
    Distribution,
    SimilarityCover,
    _snap_nonnegative,
)

SUPPORT_CLAMP = 1e-12  # marginal entries below this are zeroed and renormalized
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000


@dataclass(frozen=True, eq=False)
class DistortionMatrix:
    """Per-pair distortion costs; +inf marks an inadmissible pair."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("distortion matrix must be nonempty")
        if np.any(np.isnan(m)) or np.any(m < 0):
            raise ValueError("distortion entries must be >= 0 (inf allowed)")
        if not np.all(np.isfinite(m).any(axis=1)):
            raise ValueError("every source row needs at least one finite distortion")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class RDPoint:
    """One solved operating point at slope s (nats per distortion unit)."""

    s: float
    q: Distribution
    channel: Channel
    distortion: float
    rate_bits: float

    def __post_init__(self):
        if self.s > 0:
            raise ValueError("slope must be <= 0")
        if self.distortion < 0 or self.rate_bits < 0:
            raise ValueError("distortion and rate must be >= 0")


def squared_distortion(a: Alphabet, b: Alphabet) -> DistortionMatrix:
    """Squared coordinate difference for every source/destination pair."""
    diff = a.coords[:, None] - b.coords[None, :]
    return DistortionMatrix(diff * diff)


def neglog_distortion(cover: SimilarityCover) -> DistortionMatrix:
    """Distortion -ln(similarity): 0 at full similarity, +inf at none."""
    with np.errstate(divide="ignore"):
        return DistortionMatrix(-np.log(cover.matrix) + 0.0)


def average_distortion(p: Distribution, ch: Channel, d: DistortionMatrix) -> float:
    """Expected distortion, with 0 * inf = 0 for unused inadmissible pairs."""
    if ch.matrix.shape != d.shape or len(p) != ch.n_inputs:
        raise ValueError("shapes of source, channel and distortion must agree")
    joint = p.probs[:, None] * ch.matrix
    used = joint > 0
    return float((joint[used] * d.matrix[used]).sum())


def _tilted_weights(d: np.ndarray, s: float) -> np.ndarray:
    w = np.zeros_like(d)
    finite = np.isfinite(d)
    w[finite] = np.exp(s * d[finite])
    return w


def _minimize_log_loss(p, weights, q0, tol, max_iter):
    """Minimize -sum_i p_i log2(sum_j q_j w_ij) over the output simplex.

    Multiplicative update q_j <- q_j * sum_i p_i w_ij / Q_i; entries that
    fall below SUPPORT_CLAMP are zeroed and the marginal renormalized, which
    keeps boundary solutions from crawling.  Stops once the objective moves
    less than tol and the marginal step is below 5 * tol in L1, so one
    further update would move q by less than 10 * tol.

    Returns (q, objective_bits, trace_of_objectives).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    q = np.array(q0, dtype=float)
    src = p > 0

    coverage = weights @ q
    if np.any(coverage == 0.0):
        raise NoFeasibleOutputError(
            "a source row has no admissible output under the initial marginal"
        )
    obj = float(-(p[src] * np.log2(coverage[src])).sum())
    trace = [obj]
    for _ in range(max_iter):
        gain = weights.T @ (p / coverage)
        q_new = q * gain
        q_new[q_new < SUPPORT_CLAMP] = 0.0
        total = q_new.sum()
        if total <= 0.0:
            raise NoFeasibleOutputError("the output marginal collapsed to zero")
        q_new /= total
        coverage = weights @ q_new
        if np.any(src & (coverage == 0.0)):
            raise NoFeasibleOutputError(
                "support clamping left a source row without admissible outputs"
            )
        obj_new = float(-(p[src] * np.log2(coverage[src])).sum())
        step = float(np.abs(q_new - q).sum())
        delta = abs(obj_new - obj)
        q, obj = q_new, obj_new
        trace.append(obj)
        if delta < tol and step < 5.0 * tol:
            return q, obj, np.array(trace)
    raise NonConvergenceError(f"no fixed point within {max_iter} iterations")


def _parametric_point(p, d, s, weights, q, obj_bits) -> RDPoint:
    coverage = weights @ q
    ch = q[None, :] * weights
    rows = coverage > 0
    ch[rows] /= coverage[rows, None]
    for i in np.flatnonzero(~rows):
        # only reachable for zero-mass sources; spread over finite-cost pairs
        finite = np.isfinite(d[i])
        ch[i] = finite / finite.sum()
    joint = p[:, None] * ch
    used = joint > 0
    distortion = float((joint[used] * d[used]).sum())
    rate = _snap_nonnegative(s * distortion / LN2 + obj_bits)
    return RDPoint(
        s=s,
        q=Distribution(q),
        channel=Channel(ch),
        distortion=distortion,
        rate_bits=rate,
    )


def ba_fixed_point(
    p: Distribution,
    d: DistortionMatrix,
    s: float,
    q0: Distribution | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    return_trace: bool = False,
):
    """Solve the slope-s operating point for the source p and costs d.

    q0 fixes the starting marginal (uniform by default); its zero entries
    stay zero, so a restricted q0 pins the support.  With return_trace the
    per-iteration objective values come back alongside the point; they are
    nonincreasing up to clamping noise.
    """
    if s > 0:
        raise ValueError("slope s must be <= 0")
    n_in, n_out = d.shape
    if len(p) != n_in:
        raise ValueError("source length must match the distortion rows")
    if q0 is not None and len(q0) != n_out:
        raise ValueError("initial marginal length must match the distortion columns")
    weights = _tilted_weights(d.matrix, s)
    start = np.full(n_out, 1.0 / n_out) if q0 is None else q0.probs
    try:
        q, obj, trace = _minimize_log_loss(p.probs, weights, start, tol, max_iter)
    except NonConvergenceError as exc:
        raise NonConvergenceError(f"slope s={s}: {exc}") from None
    point = _parametric_point(p.probs, d.matrix, s, weights, q, obj)
    return (point, trace) if return_trace else point


def rd_curve(
    p: Distribution,
    d: DistortionMatrix,
    s_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> list[RDPoint]:
    """Solve a sorted slope grid, warm-starting each point from the last.

    Warm starts are blended with a pinch of uniform mass so support clamped
    away at an earlier point can be rediscovered; the solved values match
    cold starts within tolerance either way.
    """
    grid = [float(s) for s in s_grid]
    if not grid:
        raise ValueError("slope grid is empty")
    if any(s > 0 for s in grid):
        raise ValueError("all slopes must be <= 0")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("slope grid must be sorted ascending")
    n_out = d.shape[1]
    uniform = np.full(n_out, 1.0 / n_out)
    warm = uniform
    points = []
    for s in grid:
        blended = 0.999 * warm + 0.001 * uniform
        point = ba_fixed_point(p, d, s, q0=Distribution(blended / blended.sum()), tol=tol)
        points.append(point)
        warm = point.q.probs
    return points


def rate_via_generalized_form(
    p: Distribution, q: Distribution, d: DistortionMatrix, s: float
) -> float:
    """Rate recomputed through membership ratios, as a cross-check.

    Treats exp(s d_ij) as the membership grade of destination j in the ball
    of source i, sum_j q_j exp(s d_ij) as the ball's logical probability and
    q_j exp(s d_ij) / Q_i as the in-ball output law; the weighted log-ratio
    sum equals the parametric rate at the same (q, s) pair.
    """
    if s > 0:
        raise ValueError("slope s must be <= 0")
    if d.shape != (len(p), len(q)):
        raise ValueError("shapes of source, marginal and distortion must agree")
    weights = _tilted_weights(d.matrix, s)
    coverage = weights @ q.probs
    src = p.probs > 0
    if np.any(src & (coverage == 0.0)):
        raise NoFeasibleOutputError("a source row has no admissible output under q")
    total = 0.0
    for i in np.flatnonzero(src):
        row = q.probs * weights[i]
        pos = row > 0
        conditional = row[pos] / coverage[i]
        total += p.probs[i] * float(
            (conditional * np.log2(weights[i, pos] / coverage[i])).sum()
        )
    return _snap_nonnegative(total)


def _zero_rate_floor(p: Distribution, d: DistortionMatrix) -> float:
    # best single-output average distortion; rate 0 is enough at or above it
    src = p.probs > 0
    column_costs = []
    for j in range(d.shape[1]):
        col = d.matrix[src, j]
        column_costs.append(float((p.probs[src] * col).sum()) if np.all(np.isfinite(col)) else math.inf)
    return min(column_costs)


def rate_at_distortion(
    p: Distribution,
    d: DistortionMatrix,
    target: float,
    tol: float = DEFAULT_TOL,
    bracket: float = 0.01,
    max_bisect: int = 200,
) -> float:
    """Interpolated rate at a prescribed average distortion.

    Brackets the target between two solved slopes whose distortions differ
    by at most `bracket`, then interpolates linearly in (D, R).  Targets at
    or beyond the zero-rate floor return 0.0.
    """
    if target < 0:
        raise ValueError("target distortion must be >= 0")
    if target >= _zero_rate_floor(p, d) - 1e-15:
        return 0.0
    # walk the slope until two solved points straddle the target distortion
    below = None  # steeper slope, distortion <= target
    above = None  # shallower slope, distortion >= target
    point = ba_fixed_point(p, d, -1.0, tol=tol)
    if point.distortion <= target:
        below = point
        s = -0.5
        for _ in range(64):
            point = ba_fixed_point(p, d, s, tol=tol)
            if point.distortion >= target:
                above = point
                break
            below = point
            s *= 0.5
        else:
            above = ba_fixed_point(p, d, 0.0, tol=tol)
    else:
        above = point
        s = -2.0
        for _ in range(64):
            point = ba_fixed_point(p, d, s, tol=tol)
            if point.distortion <= target:
                below = point
                break
            above = point
            s *= 2.0
        else:
            raise NonConvergenceError("could not bracket the target distortion")
    for _ in range(max_bisect):
        if above.distortion - below.distortion <= bracket:
            break
        mid = ba_fixed_point(p, d, 0.5 * (below.s + above.s), tol=tol)
        if mid.distortion <= target:
            below = mid
        else:
            above = mid
    else:
        raise NonConvergenceError("distortion bracket did not shrink to tolerance")
    if above.distortion == below.distortion:
        return below.rate_bits
    frac = (target - below.distortion) / (above.distortion - below.distortion)
    return _snap_nonnegative(below.rate_bits + frac * (above.rate_bits - below.rate_bits))

"""Tolerance covers and the rates that coding under them requires.

A tolerance cover lists, per source symbol, which destination symbols may
stand for it and to what degree.  For clear covers the minimum rate equals
the minimized generalized entropy -sum_i p_i log2 Q(B_i) with
Q(B_i) = sum_j q_j c_ij; fuzzy covers reduce to the slope-parametric solver
with costs -ln(c_ij) at slope -1, because exp(-1 * -ln c) recovers the
similarity degrees exactly.  One solver therefore serves both readings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyBallError, NonConvergenceError, UnequalBallError
from .measures import (
    Alphabet,
    Channel,
    Distribution,
    SimilarityCover,
    entropy,
    set_bayes_posterior,
)
from .ratedist import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    _minimize_log_loss,
    ba_fixed_point,
    neglog_distortion,
    rate_at_distortion,
    rate_via_generalized_form,
    squared_distortion,
)

ZERO_DISTORTION_EPS = 1e-9
SWEEP_DOUBLINGS = 64


@dataclass(frozen=True, eq=False)
class ToleranceCover:
    """A similarity cover read as a coding tolerance.

    Every source row must contain a degree exactly 1: without one fully
    admissible representative, clear-set coding cannot succeed at any rate,
    so such covers are rejected at construction.
    """

    cover: SimilarityCover
    clear: bool = field(init=False)

    def __post_init__(self):
        m = self.cover.matrix
        if not np.all(m.max(axis=1) == 1.0):
            raise ValueError(
                "every source row needs one fully admissible representative (an entry equal to 1)"
            )
        object.__setattr__(self, "clear", self.cover.is_clear)

    @property
    def matrix(self) -> np.ndarray:
        return self.cover.matrix


@dataclass(frozen=True, eq=False)
class ToleranceSolution:
    """Minimizing output marginal with its rate and generalized entropy."""

    q: Distribution
    rate_bits: float
    h_star_bits: float
    channel: Channel


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Rates of the same tolerance computed along independent routes.

    Deltas are reported, never asserted; `claims` flags each comparison
    against the tolerance the caller asked about.
    """

    rate_tolerance_bits: float
    rate_distortion_at_zero_bits: float
    complexity_distortion_bits: float | None
    rate_at_dc_bits: float | None
    dc: float | None
    sweep_slope: float
    delta_rt_rd0: float
    delta_rt_cdc: float | None
    claims: dict[str, bool]


def clear_cover_from_threshold(a: Alphabet, b: Alphabet, radius: float) -> ToleranceCover:
    """Clear cover admitting destinations within `radius` of each source."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    close = np.abs(a.coords[:, None] - b.coords[None, :]) <= radius
    missing = ~close.any(axis=1)
    if missing.any():
        rows = ", ".join(a.labels[i] for i in np.flatnonzero(missing))
        raise EmptyBallError(f"no representative within radius {radius} for: {rows}")
    return ToleranceCover(SimilarityCover(close.astype(float)))


def check_tolerance_constraint(
    ch: Channel, cover: ToleranceCover, q: Distribution, atol: float = 1e-12
) -> bool:
    """Whether a channel respects the tolerance.

    Clear covers demand zero mass outside each ball; fuzzy covers cap the
    mass of every not-fully-admissible pair at q_j c_ij / Q(B_i).
    """
    m = cover.matrix
    if ch.matrix.shape != m.shape or len(q) != m.shape[1]:
        raise ValueError("channel, cover and marginal shapes must agree")
    if cover.clear:
        return bool(np.all(ch.matrix[m == 0.0] <= atol))
    coverage = m @ q.probs
    cap = q.probs[None, :] * m / coverage[:, None]
    partial = m != 1.0
    return bool(np.all(ch.matrix[partial] <= cap[partial] + atol))


def _admissibility_channel(cover: ToleranceCover, q: np.ndarray) -> Channel:
    # the stationary factorization ch_ij = q_j c_ij / Q(B_i)
    m = cover.matrix
    coverage = m @ q
    ch = q[None, :] * m
    rows = coverage > 0
    ch[rows] /= coverage[rows, None]
    for i in np.flatnonzero(~rows):
        admissible = m[i] == 1.0
        ch[i] = admissible / admissible.sum()
    return Channel(ch)


def _h_star_bits(p: Distribution, cover: ToleranceCover, q: np.ndarray) -> float:
    coverage = cover.matrix @ q
    src = p.probs > 0
    return float(-(p.probs[src] * np.log2(coverage[src])).sum())


def _solution(p: Distribution, cover: ToleranceCover, q: np.ndarray, h_star: float) -> ToleranceSolution:
    if cover.clear:
        rate = h_star
    else:
        rate = rate_via_generalized_form(p, Distribution(q), neglog_distortion(cover.cover), -1.0)
    return ToleranceSolution(
        q=Distribution(q),
        rate_bits=rate,
        h_star_bits=h_star,
        channel=_admissibility_channel(cover, q),
    )


def minimize_generalized_entropy(
    p: Distribution,
    cover: ToleranceCover,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    return_trace: bool = False,
):
    """Minimize -sum_i p_i log2(sum_j q_j c_ij) over the output marginal.

    Runs the multiplicative fixed point directly on the similarity degrees
    (the slope-free limit of the parametric update).  For fuzzy covers the
    reported rate is the log-ratio objective at the minimizer; for clear
    covers rate and generalized entropy coincide.
    """
    m = cover.matrix
    if len(p) != m.shape[0]:
        raise ValueError("source length must match the cover rows")
    start = np.full(m.shape[1], 1.0 / m.shape[1])
    q, h_star, trace = _minimize_log_loss(p.probs, m, start, tol, max_iter)
    sol = _solution(p, cover, q, h_star)
    return (sol, trace) if return_trace else sol


def rate_tolerance(
    p: Distribution, cover: ToleranceCover, tol: float = DEFAULT_TOL
) -> ToleranceSolution:
    """Minimum bits per symbol for coding the source within the tolerance."""
    if cover.clear:
        return minimize_generalized_entropy(p, cover, tol=tol)
    point = ba_fixed_point(p, neglog_distortion(cover.cover), -1.0, tol=tol)
    q = point.q.probs
    return ToleranceSolution(
        q=point.q,
        rate_bits=point.rate_bits,
        h_star_bits=_h_star_bits(p, cover, q),
        channel=point.channel,
    )


def complexity_distortion(
    p: Distribution, a: Alphabet, b: Alphabet, dc: float, tol: float = DEFAULT_TOL
) -> ToleranceSolution:
    """Rate for uniform clear balls of squared radius dc (radius sqrt(dc))."""
    if dc < 0:
        raise ValueError("squared ball radius must be >= 0")
    return rate_tolerance(p, clear_cover_from_threshold(a, b, math.sqrt(dc)), tol=tol)


def structure_function(cover: ToleranceCover) -> float:
    """log2 of the shared ball size, defined only when every nonempty
    destination-side set of a clear cover has the same cardinality."""
    if not cover.clear:
        raise ValueError("the structure function needs a clear cover")
    sizes = cover.matrix.sum(axis=0)
    occupied = sizes[sizes > 0]
    if np.unique(occupied).size != 1:
        listing = ", ".join(str(int(s)) for s in sizes)
        raise UnequalBallError(f"ball sizes differ ({listing}); log of a common size is undefined")
    return float(np.log2(occupied[0]))


def conditional_entropy_given_tolerance(
    p: Distribution, cover: ToleranceCover, q: Distribution
) -> float:
    """Average source uncertainty left inside a destination-drawn set."""
    if not cover.clear:
        raise ValueError("conditional entropy under a tolerance needs a clear cover")
    if len(q) != cover.matrix.shape[1]:
        raise ValueError("marginal length must match the cover columns")
    total = 0.0
    for j in np.flatnonzero(q.probs > 0):
        posterior = set_bayes_posterior(p, cover.matrix[:, j])
        total += float(q.probs[j]) * entropy(posterior)
    return total


def uniform_ball_radius(a: Alphabet, b: Alphabet, cover: ToleranceCover) -> float | None:
    """Radius regenerating the cover as a threshold cover, or None."""
    if not cover.clear:
        return None
    if cover.matrix.shape != (len(a), len(b)):
        raise ValueError("cover shape must match the alphabets")
    dist = np.abs(a.coords[:, None] - b.coords[None, :])
    ones = cover.matrix == 1.0
    radius = float(dist[ones].max())
    return radius if np.array_equal(dist <= radius, ones) else None


def verify_equivalence(
    p: Distribution,
    a: Alphabet,
    b: Alphabet,
    cover: ToleranceCover,
    tol: float = 1e-6,
    dc: float | None = None,
    solver_tol: float = DEFAULT_TOL,
) -> EquivalenceReport:
    """Solve the same tolerance along independent routes and report spreads.

    Computes the tolerance rate directly, the zero-distortion limit of the
    slope sweep under -ln(similarity) costs, and, when the cover is (or dc
    names) a uniform-radius ball family, the ball rate; a squared-distortion
    budget dc additionally yields the interpolated rate at average
    distortion dc for the strict-gap comparison.
    """
    solution = rate_tolerance(p, cover, tol=solver_tol)
    rt = solution.rate_bits

    costs = neglog_distortion(cover.cover)
    s = -1.0
    for _ in range(SWEEP_DOUBLINGS):
        point = ba_fixed_point(p, costs, s, tol=solver_tol)
        if point.distortion < ZERO_DISTORTION_EPS:
            break
        s *= 2.0
    else:
        raise NonConvergenceError("distortion did not vanish within the slope sweep")
    rd0 = point.rate_bits

    radius = uniform_ball_radius(a, b, cover)
    effective_dc = dc if dc is not None else (radius**2 if radius is not None else None)
    cdc = None
    if radius is not None and effective_dc is not None:
        cdc = complexity_distortion(p, a, b, effective_dc, tol=solver_tol).rate_bits
    rate_dc = None
    if effective_dc is not None:
        rate_dc = rate_at_distortion(p, squared_distortion(a, b), effective_dc, tol=solver_tol)

    delta_rt_rd0 = abs(rt - rd0)
    delta_rt_cdc = abs(rt - cdc) if cdc is not None else None
    claims = {"tolerance_rate_equals_zero_distortion_rate": delta_rt_rd0 < tol}
    if delta_rt_cdc is not None:
        claims["tolerance_rate_equals_ball_rate"] = delta_rt_cdc < tol
    if cdc is not None and rate_dc is not None:
        claims["rate_at_budget_below_ball_rate"] = rate_dc < cdc
    return EquivalenceReport(
        rate_tolerance_bits=rt,
        rate_distortion_at_zero_bits=rd0,
        complexity_distortion_bits=cdc,
        rate_at_dc_bits=rate_dc,
        dc=effective_dc,
        sweep_slope=s,
        delta_rt_rd0=delta_rt_rd0,
        delta_rt_cdc=delta_rt_cdc,
        claims=claims,
    )

"""Finite alphabets, distributions, channels, similarity covers, and the
statistical / fuzzy-event information measures built on them.

Conventions used throughout the package:

* every reported information quantity is in bits (log base 2); natural
  exponentials appear only inside similarity weights,
* sums follow 0 * log(0) = 0 and 0 * (-inf) = 0,
* -inf is a legitimate information value (a fully falsified ideal claim);
  +inf never is: mass outside a reference support raises
  SupportMismatchError instead of returning infinite bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TypeAlias, Union

import numpy as np

from .errors import (
    AllZeroRowError,
    InvalidPriorError,
    SupportMismatchError,
    ZeroLogicalProbabilityError,
)

ExtendedBits: TypeAlias = float  # bits; -inf allowed, +inf never returned

LN2 = math.log(2.0)

_PROB_ATOL = 1e-9
_ROUNDING_GUARD = 1e-12


def _snap_nonnegative(x: float) -> float:
    # forgive pure rounding noise in quantities that are >= 0 by theory
    return 0.0 if -_ROUNDING_GUARD < x < 0.0 else x


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite alphabet whose symbols carry real coordinates."""

    labels: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.labels:
            raise ValueError("alphabet is empty")
        if len(self.labels) != len(self.values):
            raise ValueError("alphabet needs exactly one coordinate per label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("alphabet labels must be distinct")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("alphabet coordinates must be finite")

    @classmethod
    def from_values(cls, values: Sequence[float], prefix: str = "x") -> "Alphabet":
        vals = tuple(float(v) for v in values)
        return cls(tuple(f"{prefix}{k}" for k in range(1, len(vals) + 1)), vals)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def coords(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite alphabet (entries >= 0, total 1)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("distribution must be a nonempty vector")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("distribution entries must be finite and >= 0")
        if abs(p.sum() - 1.0) > _PROB_ATOL:
            raise ValueError(f"distribution sums to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Distribution":
        p = np.zeros(n)
        p[index] = 1.0
        return cls(p)


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix; row i is the output law given input symbol i."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("channel must be a nonempty matrix")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("channel entries must be finite and >= 0")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > _PROB_ATOL):
            raise ValueError("every channel row must sum to 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n_inputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(np.eye(n))


@dataclass(frozen=True, eq=False)
class SimilarityCover:
    """Similarity degrees between source and destination symbols.

    Row i is the fuzzy admissibility ball around source symbol i; column j
    is the fuzzy set of sources that destination symbol j may stand for.
    A cover is *clear* when every degree is exactly 0 or 1.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("cover must be a nonempty matrix")
        if not np.all(np.isfinite(m)) or np.any(m < 0) or np.any(m > 1):
            raise ValueError("similarity degrees must lie in [0, 1]")
        if np.any(m.max(axis=1) <= 0):
            raise ValueError("every source symbol needs at least one admissible destination")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def is_clear(self) -> bool:
        m = self.matrix
        return bool(np.all((m == 0.0) | (m == 1.0)))

    @property
    def n_sources(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_destinations(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]


def _as_membership(membership, n: int) -> np.ndarray:
    c = np.asarray(membership, dtype=float)
    if c.shape != (n,):
        raise ValueError(f"membership column must have length {n}")
    if not np.all(np.isfinite(c)) or np.any(c < 0) or np.any(c > 1):
        raise ValueError("membership grades must lie in [0, 1]")
    return c


def entropy(p: Distribution) -> float:
    """Shannon entropy in bits, with 0 * log(0) = 0."""
    probs = p.probs
    pos = probs > 0
    return float(-(probs[pos] * np.log2(probs[pos])).sum())


def kl_divergence(p: Distribution, q: Distribution) -> ExtendedBits:
    """Relative entropy sum_i p_i log2(p_i / q_i) in bits.

    Raises SupportMismatchError when p has mass where q has none; that case
    would be +inf bits, which no downstream formula consumes.
    """
    if len(p) != len(q):
        raise ValueError("distributions must share an alphabet")
    pp, qq = p.probs, q.probs
    pos = pp > 0
    if np.any(qq[pos] == 0):
        raise SupportMismatchError("p assigns mass outside q's support")
    return _snap_nonnegative(float((pp[pos] * np.log2(pp[pos] / qq[pos])).sum()))


def shannon_mutual_information(p: Distribution, ch: Channel) -> float:
    """Mutual information in bits between the source and the channel output."""
    if len(p) != ch.n_inputs:
        raise ValueError("source length must match the channel input side")
    joint = p.probs[:, None] * ch.matrix
    marginal = joint.sum(axis=0)
    pos = joint > 0
    ratios = ch.matrix[pos] / np.broadcast_to(marginal, joint.shape)[pos]
    return _snap_nonnegative(float((joint[pos] * np.log2(ratios)).sum()))


def logical_probability(p: Distribution, membership) -> float:
    """Prior probability of the fuzzy event, the p-average of its memberships."""
    c = _as_membership(membership, len(p))
    return float(np.dot(p.probs, c))


def set_bayes_posterior(p: Distribution, membership) -> Distribution:
    """Posterior over source symbols given that the fuzzy event occurred."""
    c = _as_membership(membership, len(p))
    q = float(np.dot(p.probs, c))
    if q <= 0.0:
        raise ZeroLogicalProbabilityError("membership column has zero logical probability")
    return Distribution(p.probs * c / q)


def single_event_information(prior: float, posterior: float) -> ExtendedBits:
    """log2(posterior / prior); negative when the event got less likely."""
    if prior <= 0.0:
        raise InvalidPriorError("prior probability must be positive")
    if posterior < 0.0:
        raise ValueError("posterior probability must be >= 0")
    if posterior == 0.0:
        return float("-inf")
    return float(math.log2(posterior / prior))


def predictive_information(membership_at_fact: float, logical_prob: float) -> ExtendedBits:
    """Bits earned by a verified fuzzy claim: log2(membership / logical prob).

    -inf when the realized symbol is fully outside the claimed set (the
    falsified ideal-claim branch).
    """
    if not 0.0 <= membership_at_fact <= 1.0:
        raise ValueError("membership grade must lie in [0, 1]")
    if logical_prob <= 0.0:
        raise ZeroLogicalProbabilityError("logical probability must be positive")
    if logical_prob > 1.0:
        raise ValueError("logical probability cannot exceed 1")
    if membership_at_fact == 0.0:
        return float("-inf")
    return float(math.log2(membership_at_fact / logical_prob))


def kullback_information(p: Distribution, membership) -> float:
    """Average bits of the fuzzy event about the source, assuming the
    factual posterior matches the event posterior; always >= 0."""
    return kl_divergence(set_bayes_posterior(p, membership), p)


def generalized_kullback(evidence: Distribution, p: Distribution, membership) -> ExtendedBits:
    """Evidence-weighted log-ratio of the event posterior to the prior.

    The per-symbol ratio posterior/prior reduces to membership/logical-prob,
    which stays defined even for symbols the prior excludes.  Returns -inf
    when the evidence puts mass on a zero-membership symbol.
    """
    if len(evidence) != len(p):
        raise ValueError("evidence and prior must share an alphabet")
    c = _as_membership(membership, len(p))
    q = float(np.dot(p.probs, c))
    if q <= 0.0:
        raise ZeroLogicalProbabilityError("membership column has zero logical probability")
    e = evidence.probs
    pos = e > 0
    if np.any(c[pos] == 0.0):
        return float("-inf")
    return float((e[pos] * np.log2(c[pos] / q)).sum())


def generalized_mutual_information(
    p: Distribution, ch: Channel, cover: SimilarityCover
) -> ExtendedBits:
    """Channel-averaged fuzzy-event information, bounded above by the
    Shannon mutual information of the same (p, ch) pair."""
    if len(p) != ch.n_inputs:
        raise ValueError("source length must match the channel input side")
    if cover.matrix.shape != ch.matrix.shape:
        raise ValueError("cover and channel shapes must agree")
    joint = p.probs[:, None] * ch.matrix
    marginal = joint.sum(axis=0)
    qcol = p.probs @ cover.matrix
    if np.any((marginal > 0) & (qcol <= 0)):
        raise ZeroLogicalProbabilityError(
            "an output with positive probability has a zero-logical-probability column"
        )
    pos = joint > 0
    degrees = cover.matrix[pos]
    if np.any(degrees == 0.0):
        return float("-inf")
    ratios = degrees / np.broadcast_to(qcol, joint.shape)[pos]
    return float((joint[pos] * np.log2(ratios)).sum())


def semantic_normalize(ch: Union[Channel, np.ndarray], j: int) -> np.ndarray:
    """Membership column for destination j, rescaling each likelihood row by
    its maximum so the most plausible destination gets grade 1."""
    m = ch.matrix if isinstance(ch, Channel) else np.asarray(ch, dtype=float)
    if m.ndim != 2 or np.any(m < 0) or not np.all(np.isfinite(m)):
        raise ValueError("likelihood table must be a nonnegative finite matrix")
    if not 0 <= j < m.shape[1]:
        raise ValueError(f"destination index {j} out of range")
    row_max = m.max(axis=1)
    if np.any(row_max <= 0):
        raise AllZeroRowError("a likelihood row is all zero and cannot be normalized")
    return m[:, j] / row_max

"""Gaussian confusion model for positioning readouts.

Covers the accuracy-spec conventions (DRMS / 2DRMS / CEP), pairwise
similarity covers built from a confusion width, membership estimation from
random-subset experiments, and forecast scoring / grid optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measures import (
    Alphabet,
    Distribution,
    ExtendedBits,
    SimilarityCover,
    generalized_kullback,
)

ACCURACY_KINDS = ("DRMS", "2DRMS", "CEP")


@dataclass(frozen=True)
class GaussianConfusion:
    """Bell-shaped similarity around a pointed coordinate; peak value 1."""

    center: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.sigma)):
            raise ValueError("confusion parameters must be finite")
        if self.sigma <= 0:
            raise ValueError("confusion width sigma must be positive")


@dataclass(frozen=True)
class AccuracySpec:
    """Quoted positioning accuracy: a kind (DRMS, 2DRMS, CEP) and a radius."""

    kind: str
    radius: float

    def __post_init__(self):
        if self.kind not in ACCURACY_KINDS:
            raise ValueError(f"accuracy kind must be one of {ACCURACY_KINDS}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError("accuracy radius must be positive")


def confusion(x: float, model: GaussianConfusion) -> float:
    """Similarity degree of coordinate x with the model's center."""
    z = (x - model.center) / model.sigma
    return float(math.exp(-0.5 * z * z))


def confusion_column(alphabet: Alphabet, model: GaussianConfusion) -> np.ndarray:
    """Membership grades of every alphabet symbol in the model's fuzzy set."""
    z = (alphabet.coords - model.center) / model.sigma
    return np.exp(-0.5 * z * z)


def build_cover(a: Alphabet, b: Alphabet, sigma: float) -> SimilarityCover:
    """Pairwise Gaussian similarity between source and destination coordinates."""
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError("sigma must be positive")
    diff = (a.coords[:, None] - b.coords[None, :]) / sigma
    return SimilarityCover(np.exp(-0.5 * diff * diff))


def standard_normal_central_mass(z: float, panels: int = 512) -> float:
    """Mass of the standard normal on [-z, z], by composite Simpson quadrature."""
    if z <= 0:
        return 0.0
    grid = np.linspace(-z, z, 2 * panels + 1)
    dens = np.exp(-0.5 * grid * grid) / math.sqrt(2.0 * math.pi)
    h = grid[1] - grid[0]
    return float(h / 3.0 * (dens[0] + dens[-1] + 4.0 * dens[1:-1:2].sum() + 2.0 * dens[2:-1:2].sum()))


def standard_normal_central_quantile(mass: float, tol: float = 1e-12) -> float:
    """z such that [-z, z] carries the given central normal mass (bisection)."""
    if not 0.0 < mass < 1.0:
        raise ValueError("central mass must lie strictly between 0 and 1")
    lo, hi = 0.0, 10.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if standard_normal_central_mass(mid) < mass:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def accuracy_to_sigma(spec: AccuracySpec) -> float:
    """Convert a quoted accuracy radius to the Gaussian width sigma.

    DRMS quotes sigma itself and 2DRMS quotes 2*sigma.  CEP quotes the
    radius holding half the probability mass, so sigma = radius / z with z
    the central standard-normal quantile at mass 0.5 (about 0.67449).
    """
    if spec.kind == "DRMS":
        return spec.radius
    if spec.kind == "2DRMS":
        return spec.radius / 2.0
    return spec.radius / standard_normal_central_quantile(0.5)


@dataclass(frozen=True)
class SubsetSampleSet:
    """Outcomes of repeated confusion experiments, one symbol subset each."""

    samples: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(frozenset(s) for s in self.samples))
        if not self.samples:
            raise ValueError("need at least one sampled subset")

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def draw(
        cls,
        alphabet: Alphabet,
        model: GaussianConfusion,
        n: int,
        rng: np.random.Generator,
    ) -> "SubsetSampleSet":
        """Draw n subsets, including each symbol independently with its
        confusion degree.  The generator is caller-supplied for reproducibility."""
        if n < 1:
            raise ValueError("need at least one experiment")
        degrees = confusion_column(alphabet, model)
        hits = rng.random((n, len(alphabet))) < degrees[None, :]
        labels = alphabet.labels
        return cls(
            tuple(
                frozenset(labels[k] for k in np.flatnonzero(row)) for row in hits
            )
        )


def estimate_membership(samples: SubsetSampleSet, alphabet: Alphabet) -> np.ndarray:
    """Empirical inclusion frequency of each symbol across the sampled subsets."""
    counts = np.zeros(len(alphabet))
    for subset in samples.samples:
        for k, label in enumerate(alphabet.labels):
            if label in subset:
                counts[k] += 1
    return counts / len(samples)


def evaluate_forecast(
    evidence: Distribution,
    p: Distribution,
    model: GaussianConfusion,
    alphabet: Alphabet,
) -> ExtendedBits:
    """Evidence-weighted score of the claim "the value is about model.center"."""
    return generalized_kullback(evidence, p, confusion_column(alphabet, model))


def optimize_forecast(
    evidence: Distribution,
    p: Distribution,
    centers: Sequence[float],
    sigmas: Sequence[float],
    alphabet: Alphabet,
) -> tuple[float, float, ExtendedBits]:
    """Exhaustive grid search for the best-scoring (center, sigma) claim.

    Ties keep the earliest grid entry (centers outer, sigmas inner).
    """
    centers = [float(c) for c in centers]
    sigmas = [float(s) for s in sigmas]
    if not centers or not sigmas:
        raise ValueError("the search grid must be nonempty")
    best: tuple[float, float, float] | None = None
    for c0 in centers:
        for s0 in sigmas:
            value = evaluate_forecast(evidence, p, GaussianConfusion(c0, s0), alphabet)
            if best is None or value > best[2]:
                best = (c0, s0, value)
    return best

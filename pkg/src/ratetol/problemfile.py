"""Problem-file ingestion and emission.

A problem file is one JSON document with the named top-level fields

    alphabet_x, alphabet_y : {"labels": [...], "values": [...]} (labels optional)
    source                 : probability vector over alphabet_x
    similarity             : matrix of rows, or {"kind": "gaussian", "sigma": s}
                             or {"kind": "threshold", "radius": r}   (optional)
    distortion             : matrix of rows (inf allowed), or {"kind": "squared"}
                             or {"kind": "neglog-of-similarity"}     (optional)

All invariants are validated at load time and reported with the offending
field name.  Saving a loaded file and re-reading it reproduces the same
in-memory values; infinities round-trip through JSON's Infinity literal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ProblemFileError
from .gps import build_cover
from .measures import Alphabet, Distribution, SimilarityCover
from .ratedist import DistortionMatrix, neglog_distortion, squared_distortion

SIMILARITY_KINDS = ("gaussian", "threshold")
DISTORTION_KINDS = ("squared", "neglog-of-similarity")


def _parse_entry(value, field: str) -> float:
    if isinstance(value, str):
        text = value.strip().lower().lstrip("+")
        if text in ("inf", "infinity"):
            return math.inf
        raise ProblemFileError(f"{field}: cannot read {value!r} as a number")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"{field}: cannot read {value!r} as a number")
    return float(value)


def _parse_matrix(rows, field: str) -> list[list[float]]:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ProblemFileError(f"{field}: expected an array of row arrays")
    width = len(rows[0])
    parsed = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ProblemFileError(f"{field}: row {i} has length {len(row)}, expected {width}")
        parsed.append([_parse_entry(v, f"{field}[{i}]") for v in row])
    return parsed


def _parse_alphabet(data, field: str, prefix: str) -> Alphabet:
    if not isinstance(data, dict) or "values" not in data:
        raise ProblemFileError(f"{field}: expected an object with a 'values' array")
    values = data["values"]
    if not isinstance(values, list) or not values:
        raise ProblemFileError(f"{field}.values: expected a nonempty array")
    coords = [_parse_entry(v, f"{field}.values") for v in values]
    labels = data.get("labels")
    try:
        if labels is None:
            return Alphabet.from_values(coords, prefix=prefix)
        return Alphabet(tuple(labels), tuple(coords))
    except ValueError as exc:
        raise ProblemFileError(f"{field}: {exc}") from None


def _parse_generator(data, field: str, kinds, params) -> dict:
    kind = data.get("kind")
    if kind not in kinds:
        raise ProblemFileError(f"{field}.kind: expected one of {kinds}, got {kind!r}")
    spec = {"kind": kind}
    needed = params.get(kind, ())
    for name in needed:
        if name not in data:
            raise ProblemFileError(f"{field}.{name}: required for kind {kind!r}")
        spec[name] = _parse_entry(data[name], f"{field}.{name}")
    extra = set(data) - {"kind", *needed}
    if extra:
        raise ProblemFileError(f"{field}: unexpected keys {sorted(extra)}")
    return spec


@dataclass(frozen=True, eq=False)
class ProblemFile:
    """A validated problem statement: alphabets, source, optional constructions."""

    alphabet_x: Alphabet
    alphabet_y: Alphabet
    source: Distribution
    similarity: list[list[float]] | dict | None = None
    distortion: list[list[float]] | dict | None = None

    def __post_init__(self):
        # resolving both constructions exercises every referenced invariant
        self.cover()
        self.distortion_matrix()

    @classmethod
    def from_dict(cls, data: Any) -> "ProblemFile":
        if not isinstance(data, dict):
            raise ProblemFileError("top level: expected an object with named fields")
        unknown = set(data) - {"alphabet_x", "alphabet_y", "source", "similarity", "distortion"}
        if unknown:
            raise ProblemFileError(f"top level: unexpected fields {sorted(unknown)}")
        for required in ("alphabet_x", "alphabet_y", "source"):
            if required not in data:
                raise ProblemFileError(f"{required}: field is required")
        ax = _parse_alphabet(data["alphabet_x"], "alphabet_x", "x")
        ay = _parse_alphabet(data["alphabet_y"], "alphabet_y", "y")
        raw_source = data["source"]
        if not isinstance(raw_source, list):
            raise ProblemFileError("source: expected a probability array")
        try:
            source = Distribution(np.array([_parse_entry(v, "source") for v in raw_source]))
        except ValueError as exc:
            raise ProblemFileError(f"source: {exc}") from None
        if len(source) != len(ax):
            raise ProblemFileError(
                f"source: length {len(source)} does not match alphabet_x ({len(ax)})"
            )

        similarity = data.get("similarity")
        if isinstance(similarity, dict):
            similarity = _parse_generator(
                similarity, "similarity", SIMILARITY_KINDS,
                {"gaussian": ("sigma",), "threshold": ("radius",)},
            )
        elif similarity is not None:
            similarity = _parse_matrix(similarity, "similarity")

        distortion = data.get("distortion")
        if isinstance(distortion, dict):
            distortion = _parse_generator(
                distortion, "distortion", DISTORTION_KINDS,
                {"squared": (), "neglog-of-similarity": ()},
            )
        elif distortion is not None:
            distortion = _parse_matrix(distortion, "distortion")

        return cls(alphabet_x=ax, alphabet_y=ay, source=source,
                   similarity=similarity, distortion=distortion)

    def cover(self) -> SimilarityCover | None:
        if self.similarity is None:
            return None
        if isinstance(self.similarity, dict):
            kind = self.similarity["kind"]
            try:
                if kind == "gaussian":
                    return build_cover(self.alphabet_x, self.alphabet_y, self.similarity["sigma"])
                close = (
                    np.abs(self.alphabet_x.coords[:, None] - self.alphabet_y.coords[None, :])
                    <= self.similarity["radius"]
                )
                return SimilarityCover(close.astype(float))
            except ValueError as exc:
                raise ProblemFileError(f"similarity: {exc}") from None
        matrix = np.array(self.similarity, dtype=float)
        if matrix.shape != (len(self.alphabet_x), len(self.alphabet_y)):
            raise ProblemFileError(
                f"similarity: shape {matrix.shape} does not match the alphabets "
                f"({len(self.alphabet_x)} x {len(self.alphabet_y)})"
            )
        try:
            return SimilarityCover(matrix)
        except ValueError as exc:
            raise ProblemFileError(f"similarity: {exc}") from None

    def distortion_matrix(self) -> DistortionMatrix | None:
        if self.distortion is None:
            return None
        if isinstance(self.distortion, dict):
            kind = self.distortion["kind"]
            if kind == "squared":
                return squared_distortion(self.alphabet_x, self.alphabet_y)
            cover = self.cover()
            if cover is None:
                raise ProblemFileError(
                    "distortion: kind 'neglog-of-similarity' needs a similarity field"
                )
            return neglog_distortion(cover)
        matrix = np.array(self.distortion, dtype=float)
        if matrix.shape != (len(self.alphabet_x), len(self.alphabet_y)):
            raise ProblemFileError(
                f"distortion: shape {matrix.shape} does not match the alphabets "
                f"({len(self.alphabet_x)} x {len(self.alphabet_y)})"
            )
        try:
            return DistortionMatrix(matrix)
        except ValueError as exc:
            raise ProblemFileError(f"distortion: {exc}") from None

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {
            "alphabet_x": {"labels": list(self.alphabet_x.labels),
                           "values": list(self.alphabet_x.values)},
            "alphabet_y": {"labels": list(self.alphabet_y.labels),
                           "values": list(self.alphabet_y.values)},
            "source": [float(v) for v in self.source.probs],
        }
        if self.similarity is not None:
            doc["similarity"] = self.similarity
        if self.distortion is not None:
            doc["distortion"] = self.distortion
        return doc

    @classmethod
    def load(cls, path: str | Path) -> "ProblemFile":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ProblemFileError(f"{path}: {exc}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemFileError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(self.to_dict(), handle, indent=2)
            handle.write("\n")

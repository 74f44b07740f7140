"""Finite point configurations (atomic measures with integer multiplicities).

A configuration is a finite collection of real locations, each carrying a
positive integer multiplicity.  It is the common currency between the
sampler, the configuration-indexed kernels, and the configuration-space
functionals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["Configuration"]


@dataclass(frozen=True)
class Configuration:
    """A finite atomic measure ``sum_j mult_j * delta_{points_j}``.

    Attributes
    ----------
    points : numpy.ndarray
        Strictly increasing float array of atom locations.
    multiplicities : numpy.ndarray
        Positive integer array, same length as ``points``.
    """

    points: np.ndarray
    multiplicities: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if self.multiplicities is None:
            mult = np.ones(pts.size, dtype=np.int64)
        else:
            mult = np.asarray(self.multiplicities).ravel()
            if mult.size != pts.size:
                raise ValidationError(
                    "points and multiplicities must have equal length"
                )
            if mult.size and not np.all(mult == np.asarray(mult, dtype=np.int64)):
                raise ValidationError("multiplicities must be integers")
            mult = np.asarray(mult, dtype=np.int64)
        if pts.size:
            if not np.all(np.isfinite(pts)):
                raise ValidationError("configuration points must be finite")
            if np.any(np.diff(pts) <= 0.0):
                raise ValidationError("points must be strictly increasing")
            if np.any(mult < 1):
                raise ValidationError("multiplicities must be >= 1")
        pts.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "multiplicities", mult)

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def from_points(cls, values) -> "Configuration":
        """Build from an unsorted iterable; equal values merge into multiplicity."""
        arr = np.sort(np.asarray(list(values), dtype=float).ravel())
        if arr.size == 0:
            return cls(np.empty(0), np.empty(0, dtype=np.int64))
        uniq, counts = np.unique(arr, return_counts=True)
        return cls(uniq, counts)

    @classmethod
    def empty(cls) -> "Configuration":
        return cls(np.empty(0), np.empty(0, dtype=np.int64))

    # ------------------------------------------------------------------
    # measure operations
    # ------------------------------------------------------------------
    @property
    def total_mass(self) -> int:
        """Total number of points counted with multiplicity."""
        return int(self.multiplicities.sum())

    @property
    def is_simple(self) -> bool:
        """True when every multiplicity equals one."""
        return bool(np.all(self.multiplicities == 1))

    def count_in(self, lo: float, hi: float) -> int:
        """Mass of the closed interval ``[lo, hi]``."""
        sel = (self.points >= lo) & (self.points <= hi)
        return int(self.multiplicities[sel].sum())

    def restricted(self, lo: float, hi: float) -> "Configuration":
        """Restriction to the closed interval ``[lo, hi]``."""
        sel = (self.points >= lo) & (self.points <= hi)
        return Configuration(self.points[sel], self.multiplicities[sel])

    def without_point(self, z: float) -> "Configuration":
        """Remove the whole atom at ``z`` (no-op when ``z`` is not an atom)."""
        sel = self.points != z
        return Configuration(self.points[sel], self.multiplicities[sel])

    def translate(self, a: float) -> "Configuration":
        """The shifted configuration with atoms at ``points + a``."""
        return Configuration(self.points + a, self.multiplicities)

    def merged_with(self, other: "Configuration") -> "Configuration":
        """Superposition (measure sum) of two configurations."""
        pts = np.concatenate([self.points, other.points])
        mult = np.concatenate([self.multiplicities, other.multiplicities])
        order = np.argsort(pts, kind="stable")
        pts, mult = pts[order], mult[order]
        uniq, inverse = np.unique(pts, return_inverse=True)
        summed = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(summed, inverse, mult)
        return Configuration(uniq, summed)

    def expanded(self) -> np.ndarray:
        """Points repeated by multiplicity, as a sorted flat array."""
        return np.repeat(self.points, self.multiplicities)

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(
            {
                "points": self.points.tolist(),
                "multiplicities": self.multiplicities.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        data = json.loads(text)
        if isinstance(data, list):  # bare array of points
            return cls.from_points(data)
        return cls(
            np.asarray(data["points"], dtype=float),
            np.asarray(data.get("multiplicities", [1] * len(data["points"]))),
        )

    def __len__(self) -> int:
        return self.points.size

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        body = ", ".join(
            f"{p:g}" + (f"x{m}" if m > 1 else "")
            for p, m in zip(self.points, self.multiplicities)
        )
        return f"Configuration([{body}])"

"""Subset-indexed coefficient vectors.

A wave function on ``N`` sites is stored densely: entry ``m`` of the
coefficient array is the amplitude of the basis element labeled by the
subset with bitmask ``m`` (the set of up spins).  The same container holds
superset sums and any other function on the subset lattice.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DegenerateNormalizationError, SizeError
from .lattice import MAX_VERTICES

EPS_NORM = 1e-12


@lru_cache(maxsize=None)
def popcounts(n_vertices: int) -> np.ndarray:
    """Cardinality of every subset mask ``0 .. 2**n_vertices - 1``."""
    counts = np.zeros(1, dtype=np.int8)
    for _ in range(n_vertices):
        counts = np.concatenate([counts, counts + 1])
    counts.flags.writeable = False
    return counts


@lru_cache(maxsize=None)
def sector_masks(n_vertices: int, n: int) -> np.ndarray:
    """Masks of cardinality ``n``, in increasing order."""
    masks = np.flatnonzero(popcounts(n_vertices) == n)
    masks.flags.writeable = False
    return masks


@dataclass
class SubsetVector:
    n_vertices: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n_vertices <= MAX_VERTICES:
            raise SizeError(f"n_vertices={self.n_vertices} outside 0..{MAX_VERTICES}")
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (1 << self.n_vertices,):
            raise ArgumentError(
                f"expected {1 << self.n_vertices} coefficients, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ArgumentError("coefficients must be finite")

    @classmethod
    def zeros(cls, n_vertices: int) -> SubsetVector:
        return cls(n_vertices, np.zeros(1 << n_vertices))

    @classmethod
    def basis(cls, n_vertices: int, mask: int) -> SubsetVector:
        """Indicator of a single subset."""
        v = cls.zeros(n_vertices)
        if not 0 <= mask < len(v.coeffs):
            raise ArgumentError(f"mask {mask} out of range for {n_vertices} vertices")
        v.coeffs[mask] = 1.0
        return v

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def copy(self) -> SubsetVector:
        return SubsetVector(self.n_vertices, self.coeffs.copy())

    def to_dict(self) -> dict:
        return {"n_vertices": self.n_vertices, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> SubsetVector:
        return cls(int(data["n_vertices"]), np.asarray(data["coeffs"], dtype=np.float64))

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load_json(cls, path: str | Path) -> SubsetVector:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def csv_rows(self) -> Iterable[tuple[int, int, float]]:
        card = popcounts(self.n_vertices)
        for mask, value in enumerate(self.coeffs):
            yield mask, int(card[mask]), float(value)

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mask", "cardinality", "coefficient"])
            writer.writerows((m, c, repr(x)) for m, c, x in self.csv_rows())


@dataclass
class SectorVector:
    """Coefficients of one spin-wave sector, ordered as ``sector_masks``."""
    n_vertices: int
    n: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if not 0 <= self.n <= self.n_vertices:
            raise ArgumentError(f"sector {self.n} out of range 0..{self.n_vertices}")
        expected = len(sector_masks(self.n_vertices, self.n))
        if self.entries.shape != (expected,):
            raise ArgumentError(
                f"sector {self.n} of {self.n_vertices} sites needs {expected} entries, "
                f"got shape {self.entries.shape}")

    @property
    def masks(self) -> np.ndarray:
        return sector_masks(self.n_vertices, self.n)

    def embed(self) -> SubsetVector:
        v = SubsetVector.zeros(self.n_vertices)
        v.coeffs[self.masks] = self.entries
        return v

    def value(self, mask: int) -> float:
        """Coefficient at ``mask``; zero off the sector."""
        if int(mask).bit_count() != self.n:
            return 0.0
        return float(self.entries[np.searchsorted(self.masks, mask)])


def _check(v: SubsetVector) -> None:
    if not isinstance(v, SubsetVector):
        raise ArgumentError(f"expected SubsetVector, got {type(v).__name__}")


def sector_project(v: SubsetVector, n: int) -> SectorVector:
    _check(v)
    if not 0 <= n <= v.n_vertices:
        raise ArgumentError(f"sector {n} out of range 0..{v.n_vertices}")
    return SectorVector(v.n_vertices, n, v.coeffs[sector_masks(v.n_vertices, n)].copy())


def sector_weights(v: SubsetVector) -> np.ndarray:
    """Sum of coefficients in each sector ``n = 0 .. N``."""
    return np.bincount(popcounts(v.n_vertices), weights=v.coeffs, minlength=v.n_vertices + 1)


def total_sum(v: SubsetVector) -> float:
    _check(v)
    return float(np.sum(v.coeffs))


def normalize(v: SubsetVector, eps: float = EPS_NORM) -> SubsetVector:
    """Rescale so the coefficients sum to one."""
    total = total_sum(v)
    if abs(total) <= eps:
        raise DegenerateNormalizationError(
            f"coefficient sum {total!r} is zero to within {eps}; cannot normalize")
    return SubsetVector(v.n_vertices, v.coeffs / total)


def _sweep(coeffs: np.ndarray, n_vertices: int, sign: float) -> np.ndarray:
    out = np.array(coeffs, dtype=np.float64, copy=True)
    for i in range(n_vertices):
        # axis 1 of the view is bit i: [..., 0, ...] lacks i, [..., 1, ...] has it
        view = out.reshape(-1, 2, 1 << i)
        if sign > 0:
            view[:, 0, :] += view[:, 1, :]
        else:
            view[:, 0, :] -= view[:, 1, :]
    return out


def superset_zeta(v: SubsetVector) -> SubsetVector:
    """``out[S] = sum over T ⊇ S of v[T]``, in ``O(N 2^N)``."""
    _check(v)
    return SubsetVector(v.n_vertices, _sweep(v.coeffs, v.n_vertices, +1.0))


def superset_mobius(c: SubsetVector) -> SubsetVector:
    """Inverse of :func:`superset_zeta`: ``out[S] = sum_{T ⊇ S} (-1)^|T-S| c[T]``."""
    _check(c)
    return SubsetVector(c.n_vertices, _sweep(c.coeffs, c.n_vertices, -1.0))


def product_state(probs: Sequence[float]) -> SubsetVector:
    """Independent-site state ``f(S) = prod_{i in S} p_i prod_{j not in S} (1 - p_j)``."""
    probs = np.asarray(probs, dtype=np.float64)
    coeffs = np.ones(1)
    for p in probs:
        # new bit is the most significant so far
        coeffs = np.concatenate([coeffs * (1.0 - p), coeffs * p])
    return SubsetVector(len(probs), coeffs)


def random_state(n_vertices: int, rng: np.random.Generator) -> SubsetVector:
    """Nonnegative random coefficients normalized to sum one."""
    coeffs = rng.random(1 << n_vertices)
    return SubsetVector(n_vertices, coeffs / coeffs.sum())


def random_sector(n_vertices: int, n: int, rng: np.random.Generator) -> SectorVector:
    return SectorVector(n_vertices, n, rng.standard_normal(len(sector_masks(n_vertices, n))))


def relabel(v: SubsetVector, perm: Sequence[int]) -> SubsetVector:
    """Move the coefficient of ``S`` to ``{perm[i] : i in S}``."""
    n = v.n_vertices
    if sorted(perm) != list(range(n)):
        raise ArgumentError(f"{perm} is not a permutation of range({n})")
    idx = np.arange(1 << n)
    image = np.zeros_like(idx)
    for i, p in enumerate(perm):
        image |= ((idx >> i) & 1) << p
    out = np.empty_like(v.coeffs)
    out[image] = v.coeffs
    return SubsetVector(n, out)

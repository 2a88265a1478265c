"""Polymer expansion of a normalized wave function.

The pipeline is ``f -> c -> u -> f``:

* ``c(S) = sum_{T ⊇ S} f(T)`` (:func:`compute_c`); read at ``|S| = r`` these
  are the ``c^r`` coefficients, and ``c(∅) = 1`` for a normalized state.
* ``c(S) = sum over set partitions P of S of prod_{B in P} u(B)`` where
  ``u({i}) = phi_i``.  :func:`solve_u` inverts this block by block.
* ``f`` is rebuilt as a sum over partitions of all sites of tensor products:
  a singleton ``{i}`` carries ``(phi_i, 1 - phi_i)`` and a larger block ``B``
  carries ``u(B)`` times ``(1, -1)`` on each of its sites.

Both directions of the partition sum use the lowest-site recurrence
``c(S) = sum_{x ∈ B ⊆ S} u(B) c(S - B)`` with ``x = min S``, which costs
``O(3^N)`` overall.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

from .errors import ArgumentError, DegenerateNormalizationError, SizeError
from .lattice import members
from .state import (SubsetVector, popcounts, superset_mobius, superset_zeta,
                    total_sum)

SOLVE_MAX_VERTICES = 20
BELL_MAX = 12
NORM_TOL = 1e-9


@dataclass(frozen=True)
class SetPartition:
    """Disjoint nonempty blocks, each a subset bitmask."""
    blocks: tuple[int, ...]

    def __post_init__(self):
        seen = 0
        for b in self.blocks:
            if b <= 0 or b & seen:
                raise ArgumentError(f"blocks {self.blocks} are not disjoint and nonempty")
            seen |= b

    @property
    def support(self) -> int:
        return sum(self.blocks)

    @property
    def proper(self) -> bool:
        return len(self.blocks) >= 2

    def __str__(self) -> str:
        return " | ".join("".join(map(str, members(b))) for b in self.blocks)


@dataclass
class PolymerCoefficients:
    """Polymer weights indexed by block mask.

    ``weights[1 << i]`` is ``phi_i``; ``weights[B]`` for ``|B| >= 2`` is the
    multi-site polymer ``u(B)``; ``weights[0]`` is unused and kept at zero.
    """
    n_vertices: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (1 << self.n_vertices,):
            raise ArgumentError(
                f"expected {1 << self.n_vertices} weights, got shape {self.weights.shape}")

    @property
    def phi(self) -> np.ndarray:
        return self.weights[1 << np.arange(self.n_vertices)]

    @property
    def u(self) -> dict[int, float]:
        """Multi-site polymers as ``{mask: value}``."""
        masks = np.flatnonzero(popcounts(self.n_vertices) >= 2)
        return dict(zip(masks.tolist(), self.weights[masks].tolist()))

    def __getitem__(self, mask: int) -> float:
        return float(self.weights[mask])

    def max_polymer(self) -> float:
        """Largest ``|u(B)|`` over blocks with at least two sites."""
        big = popcounts(self.n_vertices) >= 2
        return float(np.max(np.abs(self.weights[big]), initial=0.0))

    @classmethod
    def from_parts(cls, phi: Sequence[float], u: dict[int, float] | None = None) -> PolymerCoefficients:
        n = len(phi)
        weights = np.zeros(1 << n)
        weights[1 << np.arange(n)] = phi
        for mask, value in (u or {}).items():
            if int(mask).bit_count() < 2:
                raise ArgumentError(f"polymer mask {mask} has fewer than two sites")
            weights[mask] = value
        return cls(n, weights)


@numba.njit(cache=True)
def _partition_log(c):
    # process masks in increasing order; every proper sub-block precedes S
    u = np.zeros_like(c)
    for S in range(1, c.shape[0]):
        x = S & -S
        rest = S ^ x
        acc = c[S]
        if rest != 0:
            # proper submasks of rest, ending at 0 (the block {x})
            sub = (rest - 1) & rest
            while True:
                acc -= u[x | sub] * c[rest ^ sub]
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        u[S] = acc
    return u


@numba.njit(cache=True)
def _partition_exp(u):
    c = np.zeros_like(u)
    c[0] = 1.0
    for S in range(1, u.shape[0]):
        x = S & -S
        rest = S ^ x
        acc = u[S]
        if rest != 0:
            sub = (rest - 1) & rest
            while True:
                acc += u[x | sub] * c[rest ^ sub]
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        c[S] = acc
    return c


def compute_c(f: SubsetVector, tol: float = NORM_TOL) -> SubsetVector:
    """Superset sums of a normalized state."""
    total = total_sum(f)
    if abs(total - 1.0) > tol:
        raise DegenerateNormalizationError(
            f"state must be normalized to sum 1 (got {total!r}); normalize it first")
    return superset_zeta(f)


def solve_u(c: SubsetVector, tol: float = NORM_TOL) -> PolymerCoefficients:
    """Solve for the polymer weights whose partition sums reproduce ``c``."""
    if c.n_vertices > SOLVE_MAX_VERTICES:
        raise SizeError(f"solve_u is limited to {SOLVE_MAX_VERTICES} vertices, got {c.n_vertices}")
    if abs(c.coeffs[0] - 1.0) > tol:
        raise DegenerateNormalizationError(f"c(∅) must be 1, got {c.coeffs[0]!r}")
    return PolymerCoefficients(c.n_vertices, _partition_log(c.coeffs))


def rebuild_c(p: PolymerCoefficients) -> SubsetVector:
    """Partition sums ``c(S) = sum_P prod_B u(B)``; ``c(∅) = 1``."""
    if p.n_vertices > SOLVE_MAX_VERTICES:
        raise SizeError(f"limited to {SOLVE_MAX_VERTICES} vertices, got {p.n_vertices}")
    return SubsetVector(p.n_vertices, _partition_exp(p.weights))


def reconstruct_f(p: PolymerCoefficients) -> SubsetVector:
    """The wave function generated by the polymer weights.

    Summing the tensor-product expansion over the sites outside ``S`` kills
    every block that leaves ``S`` and turns each outside singleton into 1, so
    the superset sums of the result are :func:`rebuild_c`; a Möbius sweep
    then recovers the coefficients.
    """
    return superset_mobius(rebuild_c(p))


def decompose(f: SubsetVector) -> PolymerCoefficients:
    return solve_u(compute_c(f))


def count_partitions(s: int) -> int:
    """Number of set partitions of the subset ``s`` (a Bell number)."""
    k = int(s).bit_count()
    if s < 0:
        raise ArgumentError(f"invalid subset mask {s}")
    if k > BELL_MAX:
        raise SizeError(f"|s| = {k} exceeds the cap of {BELL_MAX}")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def truncate(p: PolymerCoefficients, k_max: int) -> PolymerCoefficients:
    """Drop every polymer on more than ``k_max`` sites; ``phi`` is kept."""
    if k_max < 1:
        raise ArgumentError(f"k_max must be at least 1, got {k_max}")
    weights = p.weights.copy()
    weights[popcounts(p.n_vertices) > k_max] = 0.0
    return PolymerCoefficients(p.n_vertices, weights)


@dataclass
class TruncationRow:
    k_max: int
    l1_error: float
    linf_error: float
    rel_l2_error: float

    def as_dict(self) -> dict:
        return {"k_max": self.k_max, "l1_error": self.l1_error,
                "linf_error": self.linf_error, "rel_l2_error": self.rel_l2_error}


def truncation_errors(p: PolymerCoefficients, k_values: Iterable[int] | None = None) -> list[TruncationRow]:
    """Reconstruction error from dropping large polymers, one row per ``k_max``.

    Errors are measured against the untruncated reconstruction, so the
    ``k_max = N`` row is exactly zero and the table isolates the effect of
    the truncation from the round-off of the decomposition itself.
    """
    if k_values is None:
        k_values = range(1, p.n_vertices + 1)
    full = reconstruct_f(p).coeffs
    norm = float(np.linalg.norm(full))
    rows = []
    for k in k_values:
        diff = reconstruct_f(truncate(p, k)).coeffs - full
        rows.append(TruncationRow(
            k,
            float(np.sum(np.abs(diff))),
            float(np.max(np.abs(diff))),
            float(np.linalg.norm(diff) / norm) if norm > 0 else 0.0,
        ))
    return rows

"""Heat flow on the subset graph and the Heisenberg Hamiltonian it generates.

With unit coupling the Hamiltonian is ``H = -sum_{i~j} (I_ij - 1)``, where
``I_ij`` swaps the spins on bond ``(i, j)``.  In the subset basis this makes
``-H`` the graph Laplacian of the subset graph, so ``f(t) = exp(-Ht) f``
solves the graph heat equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.linalg import eigh

from .errors import ArgumentError, SizeError
from .lattice import Lattice
from .state import SubsetVector, sector_masks

EXACT_MAX_VERTICES = 12
# swap tables for lattices up to this size are kept in memory
_CACHE_MAX_VERTICES = 16

METHODS = ("exact_expm", "rk4")


@dataclass
class EvolutionConfig:
    t_final: float
    method: str = "exact_expm"
    dt: float = 1e-3
    record_times: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.method == "exact":
            self.method = "exact_expm"
        if self.method not in METHODS:
            raise ArgumentError(f"unknown method {self.method!r}; choose from {METHODS}")
        if not (self.t_final >= 0 and math.isfinite(self.t_final)):
            raise ArgumentError(f"t_final must be finite and nonnegative, got {self.t_final}")
        if not self.dt > 0:
            raise ArgumentError(f"dt must be positive, got {self.dt}")
        if not self.record_times:
            self.record_times = [self.t_final]
        self.record_times = sorted(float(t) for t in self.record_times)
        if self.record_times[0] < 0 or self.record_times[-1] > self.t_final:
            raise ArgumentError("record times must lie in [0, t_final]")


def _swap_tables(lat: Lattice) -> Iterator[np.ndarray]:
    """For each bond, the index permutation exchanging the two end spins."""
    if lat.n_vertices <= _CACHE_MAX_VERTICES:
        yield from _cached_swap_tables(lat)
    else:
        idx = np.arange(1 << lat.n_vertices, dtype=np.int64)
        for i, j in lat.edges:
            yield _swap_table(idx, i, j)


def _swap_table(idx: np.ndarray, i: int, j: int) -> np.ndarray:
    differ = ((idx >> i) ^ (idx >> j)) & 1
    return idx ^ (differ * ((1 << i) | (1 << j)))


@lru_cache(maxsize=8)
def _cached_swap_tables(lat: Lattice) -> tuple[np.ndarray, ...]:
    idx = np.arange(1 << lat.n_vertices, dtype=np.int64)
    return tuple(_swap_table(idx, i, j) for i, j in lat.edges)


def _check_size(lat: Lattice, f: SubsetVector) -> None:
    if f.n_vertices != lat.n_vertices:
        raise ArgumentError(
            f"vector has {f.n_vertices} vertices but lattice has {lat.n_vertices}")


def _heat(lat: Lattice, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for table in _swap_tables(lat):
        # bonds with equal end spins map S to itself and contribute zero
        out += x[table]
        out -= x
    return out


def heat_rhs(lat: Lattice, f: SubsetVector) -> SubsetVector:
    """``sum over S' ~ S of (f(S') - f(S))`` at every subset ``S``."""
    _check_size(lat, f)
    return SubsetVector(f.n_vertices, _heat(lat, f.coeffs))


def apply_hamiltonian(lat: Lattice, f: SubsetVector) -> SubsetVector:
    _check_size(lat, f)
    return SubsetVector(f.n_vertices, -_heat(lat, f.coeffs))


def sector_hamiltonian(lat: Lattice, n: int) -> np.ndarray:
    """Dense matrix of ``H`` restricted to the ``n`` spin-wave sector.

    Off-diagonal entries are -1 for adjacent subsets and the diagonal is the
    number of subset neighbors.
    """
    n_vertices = lat.n_vertices
    if not 0 <= n <= n_vertices:
        raise ArgumentError(f"sector {n} out of range 0..{n_vertices}")
    masks = sector_masks(n_vertices, n)
    position = {int(m): k for k, m in enumerate(masks)}
    mat = np.zeros((len(masks), len(masks)))
    for i, j in lat.edges:
        bond = (1 << i) | (1 << j)
        for k, m in enumerate(masks):
            m = int(m)
            if ((m >> i) ^ (m >> j)) & 1:
                mat[k, position[m ^ bond]] -= 1.0
                mat[k, k] += 1.0
    return mat


@lru_cache(maxsize=64)
def _sector_eigh(lat: Lattice, n: int) -> tuple[np.ndarray, np.ndarray]:
    evals, evecs = eigh(sector_hamiltonian(lat, n))
    # H is positive semidefinite; clip round-off below zero
    evals = np.clip(evals, 0.0, None)
    evals.flags.writeable = False
    evecs.flags.writeable = False
    return evals, evecs


def _evolve_exact(lat: Lattice, f0: SubsetVector, times: list[float]) -> list[np.ndarray]:
    if lat.n_vertices > EXACT_MAX_VERTICES:
        raise SizeError(
            f"exact_expm is limited to {EXACT_MAX_VERTICES} vertices, got {lat.n_vertices}")
    out = [np.zeros_like(f0.coeffs) for _ in times]
    for n in range(lat.n_vertices + 1):
        masks = sector_masks(lat.n_vertices, n)
        block = f0.coeffs[masks]
        if not np.any(block):
            continue
        evals, evecs = _sector_eigh(lat, n)
        amp = evecs.T @ block
        for snap, t in zip(out, times):
            snap[masks] = evecs @ (np.exp(-evals * t) * amp)
    return out


def _rk4_steps(lat: Lattice, x: np.ndarray, span: float, dt: float) -> np.ndarray:
    if span <= 0:
        return x
    steps = max(1, math.ceil(span / dt - 1e-9))
    h = span / steps
    for _ in range(steps):
        k1 = _heat(lat, x)
        k2 = _heat(lat, x + 0.5 * h * k1)
        k3 = _heat(lat, x + 0.5 * h * k2)
        k4 = _heat(lat, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def evolve(lat: Lattice, f0: SubsetVector, cfg: EvolutionConfig) -> list[tuple[float, SubsetVector]]:
    """Evolve ``f0`` under ``exp(-Ht)`` and return the state at each record time.

    ``exact_expm`` diagonalizes each sector Hamiltonian.  ``rk4`` integrates the
    heat equation with a fixed step no larger than ``cfg.dt``, landing exactly
    on each record time.
    """
    _check_size(lat, f0)
    times = list(cfg.record_times)
    if cfg.method == "exact_expm":
        snaps = _evolve_exact(lat, f0, times)
    else:
        snaps = []
        x, now = f0.coeffs.copy(), 0.0
        for t in times:
            x = _rk4_steps(lat, x, t - now, cfg.dt)
            now = t
            snaps.append(x.copy())
    return [(t, SubsetVector(f0.n_vertices, s)) for t, s in zip(times, snaps)]


def evolve_to(lat: Lattice, f0: SubsetVector, t: float, method: str = "exact_expm",
              dt: float = 1e-3) -> SubsetVector:
    """Shorthand for the state at a single time."""
    return evolve(lat, f0, EvolutionConfig(t, method, dt))[-1][1]

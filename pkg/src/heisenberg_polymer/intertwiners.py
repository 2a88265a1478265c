"""Superset-sum maps between spin-wave sectors and checks of their identities.

``apply_T(g, r, s)`` sends a sector-``r`` vector to the sector-``s`` vector
``h(S) = sum over S' ⊇ S, |S'| = r of g(S')``.  It is the identity for
``s == r`` and zero for ``s > r``.  These maps commute with the sector
Hamiltonians, which is what the ``check_*`` functions measure.
"""
from __future__ import annotations

from math import factorial
from typing import NamedTuple

import numpy as np

from .dynamics import apply_hamiltonian, evolve_to, heat_rhs
from .errors import ArgumentError
from .lattice import Lattice, check_subset, subset_neighbors
from .state import SectorVector, sector_masks, sector_project, superset_zeta


def apply_T(g: SectorVector, r: int, s: int) -> SectorVector:
    if g.n != r:
        raise ArgumentError(f"input lives in sector {g.n}, expected sector {r}")
    n_vertices = g.n_vertices
    if not 0 <= s <= n_vertices:
        raise ArgumentError(f"target sector {s} out of range 0..{n_vertices}")
    if s == r:
        return SectorVector(n_vertices, s, g.entries.copy())
    if s > r:
        return SectorVector(n_vertices, s, np.zeros(len(sector_masks(n_vertices, s))))
    # g is supported on cardinality r, so the full superset sum read at
    # cardinality s only picks up supersets of size r
    return sector_project(superset_zeta(g.embed()), s)


def composition_factor(r: int, s: int, k: int) -> int:
    """Multiplier in ``T^{s,k} T^{r,s} = factor * T^{r,k}``: ways to pick the middle set."""
    return factorial(r - k) // (factorial(s - k) * factorial(r - s))


def check_composition(r: int, s: int, k: int, g: SectorVector) -> float:
    """Max-abs residual of ``T^{s,k} T^{r,s} g - factor * T^{r,k} g``."""
    if not r > s > k >= 0:
        raise ArgumentError(f"need r > s > k >= 0, got r={r}, s={s}, k={k}")
    lhs = apply_T(apply_T(g, r, s), s, k).entries
    rhs = composition_factor(r, s, k) * apply_T(g, r, k).entries
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def _sector_H(lat: Lattice, g: SectorVector) -> SectorVector:
    return sector_project(apply_hamiltonian(lat, g.embed()), g.n)


def check_intertwining(lat: Lattice, r: int, s: int, g: SectorVector) -> float:
    """Max-abs residual of ``T H g - H T g`` for ``g`` in sector ``r``."""
    if g.n != r:
        raise ArgumentError(f"input lives in sector {g.n}, expected sector {r}")
    lhs = apply_T(_sector_H(lat, g), r, s)
    rhs = _sector_H(lat, apply_T(g, r, s))
    return float(np.max(np.abs(lhs.entries - rhs.entries), initial=0.0))


def check_intertwining_flow(lat: Lattice, r: int, s: int, g: SectorVector, t: float,
                            method: str = "exact_expm", dt: float = 1e-3) -> float:
    """Max-abs residual of ``T exp(-Ht) g - exp(-Ht) T g``."""
    if g.n != r:
        raise ArgumentError(f"input lives in sector {g.n}, expected sector {r}")
    lhs = apply_T(sector_project(evolve_to(lat, g.embed(), t, method, dt), r), r, s)
    rhs = sector_project(evolve_to(lat, apply_T(g, r, s).embed(), t, method, dt), s)
    return float(np.max(np.abs(lhs.entries - rhs.entries), initial=0.0))


class SplitTerms(NamedTuple):
    """Heat-flux split of ``d/dt sum_i f(s + i)`` at a fixed set ``s``.

    ``i1`` collects moves of the members of ``s``, ``i2`` moves of the added
    site.  ``g_flux`` is the heat right-hand side of ``g = T^{r,r-1} f`` at
    ``s``, computed independently; ``total`` is ``T^{r,r-1}`` of the heat
    right-hand side of ``f``, read at ``s``.
    """
    i1: float
    i2: float
    g_flux: float
    total: float

    @property
    def i1_residual(self) -> float:
        return abs(self.i1 - self.g_flux)


def check_split_cancellation(lat: Lattice, s: int, f: SectorVector) -> SplitTerms:
    """Evaluate both halves of the heat flux of ``g(s) = sum_{j not in s} f(s ∪ j)``.

    All unions are disjoint: ``i`` and ``j`` range over sites outside ``s``
    and the moved set ``s'`` must not contain ``i``.  The first half should
    reproduce the heat flux of ``g`` itself and the second should vanish.
    """
    check_subset(lat, s)
    r = f.n
    if s.bit_count() != r - 1:
        raise ArgumentError(f"|s| = {s.bit_count()} but f lives in sector {r}; need |s| = r - 1")
    fv = f.embed().coeffs
    outside = [i for i in range(lat.n_vertices) if not (s >> i) & 1]
    moves = subset_neighbors(lat, s)

    i1 = 0.0
    for i in outside:
        bit = 1 << i
        for sp in moves:
            if not sp & bit:
                i1 += fv[sp | bit] - fv[s | bit]

    i2 = 0.0
    for i in outside:
        for j in lat.adjacency[i]:
            if not (s >> j) & 1:
                i2 += fv[s | (1 << j)] - fv[s | (1 << i)]

    # independent route: build g directly from its definition, then its heat flux
    g = np.zeros_like(fv)
    for m in sector_masks(lat.n_vertices, r - 1):
        m = int(m)
        g[m] = sum(fv[m | (1 << j)] for j in range(lat.n_vertices) if not (m >> j) & 1)
    g_flux = sum(g[sp] - g[s] for sp in moves)

    total = float(superset_zeta(heat_rhs(lat, f.embed())).coeffs[s])
    return SplitTerms(float(i1), float(i2), float(g_flux), total)

"""Deliberately naive reference implementations for the test suite.

Nothing here calls the fast paths in ``state``, ``dynamics``,
``intertwiners`` or ``polymer``; only the ``Lattice`` and ``SetPartition``
types are shared.  The scalar routines work on plain sequences so that
``fractions.Fraction`` inputs give exact rational results.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import SizeError
from .lattice import Lattice
from .polymer import SetPartition

DENSE_MAX_VERTICES = 12
ENUM_MAX = 10

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
# i * sigma_y, so that sigma_y (x) sigma_y = -(A (x) A) stays real
_ISY = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    out = np.ones((1, 1))
    for k in range(n):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def _kron_index_to_mask(n: int) -> np.ndarray:
    """Kron basis position of each subset mask.

    Site 0 is the leftmost tensor factor and component 0 of each factor is
    spin up, i.e. the site belongs to the subset.
    """
    pos = np.zeros(1 << n, dtype=np.int64)
    for mask in range(1 << n):
        pos[mask] = sum(((mask >> i) & 1 ^ 1) << (n - 1 - i) for i in range(n))
    return pos


def swap_operator(i: int, j: int, n: int) -> np.ndarray:
    """``I_ij = (1 + sigma_i . sigma_j) / 2`` in the kron basis."""
    dot = (_site_op(_SX, i, n) @ _site_op(_SX, j, n)
           - _site_op(_ISY, i, n) @ _site_op(_ISY, j, n)
           + _site_op(_SZ, i, n) @ _site_op(_SZ, j, n))
    return 0.5 * (np.eye(1 << n) + dot)


def build_hamiltonian_dense(lat: Lattice) -> np.ndarray:
    """``H = -sum_{i~j} (I_ij - 1)`` from Pauli matrices, rows/cols in mask order."""
    n = lat.n_vertices
    if n > DENSE_MAX_VERTICES:
        raise SizeError(f"dense Hamiltonian is limited to {DENSE_MAX_VERTICES} vertices")
    dim = 1 << n
    h = np.zeros((dim, dim))
    for i in range(n):
        for j in lat.adjacency[i]:
            if i < j:
                h -= swap_operator(i, j, n) - np.eye(dim)
    pos = _kron_index_to_mask(n)
    return h[np.ix_(pos, pos)]


def sector_basis(n: int, r: int) -> list[int]:
    return sorted(sum(1 << i for i in combo) for combo in combinations(range(n), r))


def dense_T(n: int, r: int, s: int) -> np.ndarray:
    """Matrix of the sector map ``r -> s`` (rows: sector ``s``, cols: sector ``r``)."""
    rows, cols = sector_basis(n, s), sector_basis(n, r)
    mat = np.zeros((len(rows), len(cols)))
    for a, small in enumerate(rows):
        for b, big in enumerate(cols):
            if s == r:
                mat[a, b] = float(small == big)
            elif s < r and small & big == small:
                mat[a, b] = 1.0
    return mat


def naive_superset_sum(values: Sequence) -> list:
    """``O(4^N)`` double loop over all pairs of masks."""
    size = len(values)
    out = []
    for s in range(size):
        acc = 0 * values[0]
        for t in range(size):
            if t & s == s:
                acc = acc + values[t]
        out.append(acc)
    return out


def naive_subset_neighbors(lat: Lattice, s: int) -> list[int]:
    """Swap a member with an outside site, keeping pairs that are lattice bonds."""
    n = lat.n_vertices
    inside = [i for i in range(n) if s >> i & 1]
    outside = [j for j in range(n) if not s >> j & 1]
    return sorted(s - (1 << i) + (1 << j) for i in inside for j in outside
                  if j in lat.adjacency[i])


def enumerate_partitions(s: int) -> Iterator[SetPartition]:
    """Set partitions of ``s`` in restricted-growth-string order."""
    elems = [i for i in range(s.bit_length()) if s >> i & 1]
    k = len(elems)
    if k > ENUM_MAX:
        raise SizeError(f"|s| = {k} exceeds the enumeration cap of {ENUM_MAX}")
    if k == 0:
        yield SetPartition(())
        return
    rgs = [0] * k
    while True:
        blocks = [0] * (max(rgs) + 1)
        for e, b in zip(elems, rgs):
            blocks[b] |= 1 << e
        yield SetPartition(tuple(blocks))
        # next restricted growth string: bump the rightmost position that may grow
        i = k - 1
        while i > 0 and rgs[i] > max(rgs[:i]):
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        for m in range(i + 1, k):
            rgs[m] = 0


def naive_solve_u(c: Sequence) -> dict[int, object]:
    """Solve ``c(S) = u(S) + sum over proper partitions of prod u(B)`` by size."""
    size = len(c)
    n = size.bit_length() - 1
    u: dict[int, object] = {}
    for r in range(1, n + 1):
        for s in sector_basis(n, r):
            acc = c[s]
            for part in enumerate_partitions(s):
                if part.proper:
                    term = 1
                    for b in part.blocks:
                        term = term * u[b]
                    acc = acc - term
            u[s] = acc
    return u


def naive_reconstruct(u: dict[int, object], n: int) -> list:
    """Coefficients of the tensor-product expansion, summed over partitions of all sites.

    ``u`` maps every nonempty block mask to its weight (singletons carry phi).
    """
    full = (1 << n) - 1
    out = [0 * u[1]] * (1 << n) if n else [1]
    for part in enumerate_partitions(full):
        for s in range(1 << n):
            term = 1
            for b in part.blocks:
                if b.bit_count() == 1:
                    term = term * (u[b] if s & b else 1 - u[b])
                else:
                    term = term * u[b] * (-1) ** (b & ~s).bit_count()
            out[s] = out[s] + term
    return out


def naive_reconstruct_vectorized(u: dict[int, float], n: int) -> np.ndarray:
    """Same sum as :func:`naive_reconstruct`, vectorized over subsets for float inputs."""
    masks = np.arange(1 << n)
    bits = [(masks >> i) & 1 for i in range(n)]
    out = np.zeros(1 << n)
    for part in enumerate_partitions((1 << n) - 1):
        term = np.ones(1 << n)
        for b in part.blocks:
            sites = [i for i in range(n) if b >> i & 1]
            if len(sites) == 1:
                on = bits[sites[0]]
                term *= np.where(on == 1, u[b], 1.0 - u[b])
            else:
                missing = sum(1 - bits[i] for i in sites)
                term *= u[b] * (-1.0) ** missing
        out += term
    return out


def rational_roundtrip(f: Sequence[Fraction]) -> tuple[list[Fraction], dict[int, Fraction]]:
    """Exact ``f -> c -> u -> f`` with rational arithmetic; returns (f_back, u)."""
    n = len(f).bit_length() - 1
    if n > 6:
        raise SizeError("exact-rational mode is limited to 6 vertices")
    c = naive_superset_sum(list(f))
    u = naive_solve_u(c)
    return naive_reconstruct(u, n), u

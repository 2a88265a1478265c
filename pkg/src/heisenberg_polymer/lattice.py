"""Finite rectangular lattices and the subset adjacency relation.

Vertices are indexed row-major over ``dims`` (the last axis varies fastest).
Subsets of vertices are plain ``int`` bitmasks: bit ``i`` is set iff vertex
``i`` belongs to the subset.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product
from math import prod
from typing import Iterable, Sequence

from .errors import ArgumentError, SizeError

MAX_VERTICES = 24


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Lattice:
    dims: tuple[int, ...]
    boundary: Boundary
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def full_mask(self) -> int:
        return (1 << self.n_vertices) - 1

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Undirected edges ``(i, j)`` with ``i < j``, sorted."""
        return tuple(sorted(
            (i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j
        ))

    def label(self) -> str:
        return "x".join(map(str, self.dims)) + f"/{self.boundary.value}"

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "boundary": self.boundary.value,
                "n_vertices": self.n_vertices, "n_edges": len(self.edges)}


def parse_dims(text: str) -> tuple[int, ...]:
    """Parse ``"3x2"`` into ``(3, 2)``."""
    try:
        dims = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ArgumentError(f"cannot parse lattice dims {text!r}") from None
    return dims


def build_lattice(dims: Sequence[int] | str, boundary: Boundary | str = Boundary.OPEN) -> Lattice:
    """Build a d-dimensional rectangular lattice with nearest-neighbor bonds.

    Under periodic boundaries a side of length 2 contributes a single bond per
    vertex pair (no double edges) and a side of length 1 contributes none.
    """
    if isinstance(dims, str):
        dims = parse_dims(dims)
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ArgumentError(f"lattice dims must be positive integers, got {dims}")
    try:
        boundary = Boundary(boundary)
    except ValueError:
        raise ArgumentError(f"unknown boundary {boundary!r}") from None
    n = prod(dims)
    if n > MAX_VERTICES:
        raise SizeError(f"lattice has {n} vertices; the cap is {MAX_VERTICES}")

    strides = [prod(dims[k + 1:]) for k in range(len(dims))]
    adjacency = []
    for coord in product(*(range(d) for d in dims)):
        v = sum(c * s for c, s in zip(coord, strides))
        nbrs = set()
        for axis, side in enumerate(dims):
            for step in (-1, 1):
                c = coord[axis] + step
                if boundary is Boundary.PERIODIC:
                    c %= side
                elif not 0 <= c < side:
                    continue
                w = v + (c - coord[axis]) * strides[axis]
                if w != v:
                    nbrs.add(w)
        adjacency.append(tuple(sorted(nbrs)))
    return Lattice(dims, boundary, tuple(adjacency))


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: int) -> list[int]:
    """Vertices of a subset in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def check_subset(lat: Lattice, s: int) -> None:
    if not 0 <= s <= lat.full_mask:
        raise ArgumentError(f"subset mask {s} is not valid for {lat.n_vertices} vertices")


def subset_neighbors(lat: Lattice, s: int) -> list[int]:
    """All ``S'`` reachable from ``S`` by moving one member to a free neighbor site.

    Each neighbor appears once, since ``S ^ S'`` is exactly the edge used.
    """
    check_subset(lat, s)
    out = []
    for i, j in lat.edges:
        if ((s >> i) ^ (s >> j)) & 1:
            out.append(s ^ ((1 << i) | (1 << j)))
    return sorted(out)

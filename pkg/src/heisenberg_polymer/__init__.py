"""Exact polymer expansion of Heisenberg ferromagnet wave functions on small lattices."""

__version__ = "0.1.0"

from .dynamics import EvolutionConfig, apply_hamiltonian, evolve, evolve_to, heat_rhs
from .errors import ArgumentError, DegenerateNormalizationError, SizeError
from .intertwiners import (apply_T, check_composition, check_intertwining,
                           check_intertwining_flow, check_split_cancellation)
from .lattice import Boundary, Lattice, build_lattice, subset_neighbors
from .polymer import (PolymerCoefficients, SetPartition, compute_c, count_partitions,
                      decompose, reconstruct_f, solve_u, truncate, truncation_errors)
from .state import (SectorVector, SubsetVector, normalize, sector_project, superset_mobius,
                    superset_zeta, total_sum)

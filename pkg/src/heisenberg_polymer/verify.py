"""Randomized battery of the algebraic identities, used by ``heisenberg-polymer verify``."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import EXACT_MAX_VERTICES, evolve_to
from .intertwiners import (apply_T, check_composition, check_intertwining,
                           check_intertwining_flow, check_split_cancellation,
                           composition_factor)
from .lattice import Lattice, subset_neighbors
from .polymer import SOLVE_MAX_VERTICES, compute_c, decompose, reconstruct_f
from .state import (SubsetVector, product_state, random_sector, random_state,
                    relabel, superset_mobius, superset_zeta, total_sum)

ALGEBRAIC_TOL = 1e-12
ROUNDTRIP_TOL = 1e-10
FLOW_TOL = 1e-8
CONSERVATION_TOL = 1e-9


@dataclass
class IdentityResult:
    identity: str
    lattice: str
    sizes: str
    residual: float
    tolerance: float
    trials: int

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        return out


def _scaled(residual: float, *arrays: np.ndarray) -> float:
    scale = max([1.0] + [float(np.max(np.abs(a), initial=0.0)) for a in arrays])
    return residual / scale


def run_suite(lat: Lattice, trials: int = 3, seed: int = 0) -> list[IdentityResult]:
    rng = np.random.default_rng(seed)
    n = lat.n_vertices
    label = lat.label()
    results: list[IdentityResult] = []

    def record(name, residual, tol, count, sizes=f"N={n}"):
        results.append(IdentityResult(name, label, sizes, float(residual), tol, count))

    # subset adjacency is symmetric and preserves cardinality
    probe = range(1 << n) if n <= 12 else rng.integers(0, 1 << n, 4096).tolist()
    bad = 0
    for s in probe:
        for sp in subset_neighbors(lat, s):
            bad += (s not in subset_neighbors(lat, sp)) + (sp.bit_count() != s.bit_count())
    record("subset_adjacency_symmetry", bad, 0.0, len(probe))

    worst = 0.0
    for _ in range(trials):
        v = SubsetVector(n, rng.standard_normal(1 << n))
        back = superset_mobius(superset_zeta(v)).coeffs
        worst = max(worst, _scaled(np.max(np.abs(back - v.coeffs)), v.coeffs))
    record("zeta_mobius_roundtrip", worst, ALGEBRAIC_TOL, trials)

    worst, count = 0.0, 0
    for r, s, k in ((r, s, k) for r in range(n + 1) for s in range(r) for k in range(s)):
        for _ in range(trials):
            g = random_sector(n, r, rng)
            ref = composition_factor(r, s, k) * apply_T(g, r, k).entries
            worst = max(worst, _scaled(check_composition(r, s, k, g), ref))
            count += 1
    record("composition", worst, ALGEBRAIC_TOL, count)

    worst, count = 0.0, 0
    for r in range(n + 1):
        for s in range(r + 1):
            for _ in range(trials):
                g = random_sector(n, r, rng)
                worst = max(worst, _scaled(check_intertwining(lat, r, s, g), apply_T(g, r, s).entries))
                count += 1
    record("intertwining", worst, ALGEBRAIC_TOL, count)

    if n <= EXACT_MAX_VERTICES:
        worst = 0.0
        for r in range(1, n + 1):
            g = random_sector(n, r, rng)
            worst = max(worst, check_intertwining_flow(lat, r, r - 1, g, 1.0))
        record("intertwining_flow", worst, FLOW_TOL, n, sizes=f"N={n}, t=1")

    worst_i1 = worst_i2 = 0.0
    for _ in range(trials):
        for r in range(1, n + 1):
            f = random_sector(n, r, rng)
            sites = rng.permutation(n)[: r - 1]
            s = int(sum(1 << int(i) for i in sites))
            terms = check_split_cancellation(lat, s, f)
            worst_i1 = max(worst_i1, _scaled(terms.i1_residual, f.entries))
            worst_i2 = max(worst_i2, _scaled(abs(terms.i2), f.entries))
    record("split_first_term", worst_i1, ALGEBRAIC_TOL, trials * n)
    record("split_second_term_vanishes", worst_i2, ALGEBRAIC_TOL, trials * n)

    f0 = random_state(n, rng)
    method = "exact_expm" if n <= EXACT_MAX_VERTICES else "rk4"
    t_cons = 10.0 if method == "exact_expm" else 1.0
    drift = abs(total_sum(evolve_to(lat, f0, t_cons, method)) - total_sum(f0))
    record("normalization_conservation", drift, CONSERVATION_TOL, 1, sizes=f"N={n}, t={t_cons}, {method}")

    c_then = evolve_to(lat, compute_c(f0), 1.0, method).coeffs
    then_c = compute_c(evolve_to(lat, f0, 1.0, method)).coeffs
    record("superset_sums_solve_heat_equation", np.max(np.abs(c_then - then_c)), FLOW_TOL, 1,
           sizes=f"N={n}, t=1, {method}")

    if n <= SOLVE_MAX_VERTICES:
        worst = 0.0
        for _ in range(trials):
            f = random_state(n, rng)
            back = reconstruct_f(decompose(f)).coeffs
            worst = max(worst, np.max(np.abs(back - f.coeffs)) / np.max(np.abs(f.coeffs)))
        record("polymer_roundtrip", worst, ROUNDTRIP_TOL, trials)

        worst = 0.0
        f = random_state(n, rng)
        base = decompose(f)
        for _ in range(trials):
            perm = rng.permutation(n).tolist()
            inverse = np.argsort(perm).tolist()
            moved = decompose(relabel(f, perm))
            back = relabel(SubsetVector(n, moved.weights), inverse).coeffs
            worst = max(worst, np.max(np.abs(back - base.weights)))
        record("polymer_order_independence", worst, ALGEBRAIC_TOL, trials)

        worst = 0.0
        for _ in range(trials):
            p = product_state(rng.uniform(0.05, 0.95, n))
            worst = max(worst, decompose(p).max_polymer())
        record("product_state_has_no_polymers", worst, ALGEBRAIC_TOL, trials)

    return results


def all_pass(results: list[IdentityResult]) -> bool:
    return all(r.passed for r in results)

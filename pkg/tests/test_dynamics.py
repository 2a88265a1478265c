import math

import numpy as np
import pytest

from heisenberg_polymer.dynamics import (EvolutionConfig, apply_hamiltonian, evolve, evolve_to,
                                         heat_rhs, sector_hamiltonian)
from heisenberg_polymer.errors import ArgumentError, SizeError
from heisenberg_polymer.lattice import build_lattice, subset_neighbors
from heisenberg_polymer.oracle import build_hamiltonian_dense
from heisenberg_polymer.state import (SubsetVector, popcounts, random_state, sector_masks,
                                      sector_weights, total_sum)


def sector_constant(n_vertices, values):
    card = popcounts(n_vertices)
    return SubsetVector(n_vertices, np.asarray(values)[card])


def test_heat_rhs_single_edge():
    lat = build_lattice([2])
    rhs = heat_rhs(lat, SubsetVector.basis(2, 0b01)).coeffs
    assert rhs.tolist() == [0.0, -1.0, 1.0, 0.0]


def test_heat_rhs_definition(rng):
    lat = build_lattice([3, 2])
    f = SubsetVector(6, rng.standard_normal(64))
    rhs = heat_rhs(lat, f).coeffs
    for s in range(64):
        expected = sum(f[sp] - f[s] for sp in subset_neighbors(lat, s))
        assert rhs[s] == pytest.approx(expected, abs=1e-13)
    assert rhs[0] == 0.0 and rhs[63] == 0.0


def test_heat_rhs_constant_per_sector_and_sum(rng):
    lat = build_lattice([2, 2])
    assert np.all(heat_rhs(lat, sector_constant(4, [1, 2, 3, 4, 5])).coeffs == 0.0)
    f = SubsetVector(4, rng.standard_normal(16))
    assert abs(total_sum(heat_rhs(lat, f))) < 1e-14


def test_size_mismatch():
    with pytest.raises(ArgumentError):
        heat_rhs(build_lattice([3]), SubsetVector.zeros(2))


def test_hamiltonian_single_edge():
    lat = build_lattice([2])
    hf = apply_hamiltonian(lat, SubsetVector.basis(2, 0b01)).coeffs
    assert hf.tolist() == [0.0, 1.0, -1.0, 0.0]
    assert np.all(apply_hamiltonian(lat, SubsetVector(2, np.ones(4))).coeffs == 0.0)


@pytest.mark.parametrize("dims", [[2], [3], [2, 2], [4], [3, 2]])
def test_hamiltonian_matches_spin_interchange(dims):
    lat = build_lattice(dims)
    n = lat.n_vertices
    dense = build_hamiltonian_dense(lat)
    cols = [apply_hamiltonian(lat, SubsetVector.basis(n, m)).coeffs for m in range(1 << n)]
    assert np.array_equal(np.column_stack(cols), dense)


@pytest.mark.parametrize("dims", [[4], [3, 2], [2, 2, 2]])
def test_sector_matrix_symmetric_psd(dims, rng):
    lat = build_lattice(dims)
    for n in range(lat.n_vertices + 1):
        mat = sector_hamiltonian(lat, n)
        assert np.array_equal(mat, mat.T)
        assert np.all(mat.sum(axis=1) == 0.0)
        x = rng.standard_normal(len(mat))
        assert x @ mat @ x >= -1e-12


def test_sector_matrix_two_sites():
    assert sector_hamiltonian(build_lattice([2]), 1).tolist() == [[1.0, -1.0], [-1.0, 1.0]]


def test_config_validation():
    with pytest.raises(ArgumentError):
        EvolutionConfig(1.0, dt=0.0)
    with pytest.raises(ArgumentError):
        EvolutionConfig(1.0, method="euler")
    with pytest.raises(ArgumentError):
        EvolutionConfig(1.0, record_times=[2.0])
    assert EvolutionConfig(1.0, method="exact").method == "exact_expm"


@pytest.mark.parametrize("method,tol", [("exact_expm", 1e-12), ("rk4", 1e-10)])
def test_two_site_closed_form(method, tol):
    lat = build_lattice([2])
    times = [0.1, 0.5, 2.0]
    out = evolve(lat, SubsetVector.basis(2, 0b01), EvolutionConfig(2.0, method, 1e-3, times))
    for t, f in out:
        assert f[0b01] == pytest.approx((1 + math.exp(-2 * t)) / 2, abs=tol)
        assert f[0b10] == pytest.approx((1 - math.exp(-2 * t)) / 2, abs=tol)
    assert out[1][1][0b01] == pytest.approx(0.6839397, abs=1e-7)


def test_equilibrium_is_stationary():
    lat = build_lattice([3, 2])
    f0 = sector_constant(6, np.arange(7.0))
    for method in ("exact_expm", "rk4"):
        assert np.allclose(evolve_to(lat, f0, 3.0, method).coeffs, f0.coeffs, rtol=0, atol=1e-12)


def test_no_edges_no_motion():
    lat = build_lattice([1])
    f0 = SubsetVector(1, [0.25, 0.75])
    assert evolve_to(lat, f0, 7.0).coeffs.tolist() == [0.25, 0.75]


def test_rk4_matches_exact(rng):
    lat = build_lattice([4, 2])
    f0 = random_state(8, rng)
    exact = evolve_to(lat, f0, 1.0, "exact_expm").coeffs
    rk4 = evolve_to(lat, f0, 1.0, "rk4", 1e-3).coeffs
    assert np.max(np.abs(exact - rk4)) <= 1e-8


def test_sector_invariance_and_conservation(rng):
    lat = build_lattice([3, 3], "periodic")
    f0 = random_state(9, rng)
    for method in ("exact_expm", "rk4"):
        f = evolve_to(lat, f0, 2.0, method, 1e-2)
        assert np.allclose(sector_weights(f), sector_weights(f0), rtol=0, atol=1e-12)
        assert abs(total_sum(f) - 1.0) <= 1e-12


def test_sector_variance_nonincreasing(rng):
    lat = build_lattice([3, 2])
    f0 = random_state(6, rng)
    times = np.linspace(0, 3, 13).tolist()
    snaps = evolve(lat, f0, EvolutionConfig(3.0, record_times=times))
    for n in range(7):
        masks = sector_masks(6, n)
        var = [np.var(f.coeffs[masks]) for _, f in snaps]
        assert all(b <= a + 1e-15 for a, b in zip(var, var[1:]))


def test_record_times_not_on_grid():
    lat = build_lattice([2])
    out = evolve(lat, SubsetVector.basis(2, 1), EvolutionConfig(0.5, "rk4", 0.1, [0.25, 0.5]))
    assert [t for t, _ in out] == [0.25, 0.5]
    assert out[0][1][1] == pytest.approx((1 + math.exp(-0.5)) / 2, abs=1e-5)


def test_exact_size_cap():
    lat = build_lattice([13])
    with pytest.raises(SizeError):
        evolve_to(lat, SubsetVector.basis(13, 1), 1.0)

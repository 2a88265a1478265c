import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from heisenberg_polymer.errors import ArgumentError, DegenerateNormalizationError
from heisenberg_polymer.oracle import naive_superset_sum
from heisenberg_polymer.state import (SectorVector, SubsetVector, normalize, product_state,
                                      relabel, sector_masks, sector_project, superset_mobius,
                                      superset_zeta, total_sum)


def test_vector_validation():
    with pytest.raises(ArgumentError):
        SubsetVector(2, np.zeros(3))
    with pytest.raises(ArgumentError):
        SubsetVector(1, [np.nan, 0.0])


def test_sector_project_indicator():
    v = SubsetVector.basis(2, 0b11)
    assert sector_project(v, 2).entries.tolist() == [1.0]
    assert sector_project(v, 1).entries.tolist() == [0.0, 0.0]
    with pytest.raises(ArgumentError):
        sector_project(v, 3)


def test_sectors_reassemble(rng):
    v = SubsetVector(7, rng.standard_normal(128))
    total = sum(sector_project(v, n).embed().coeffs for n in range(8))
    assert np.array_equal(total, v.coeffs)
    assert sum(len(sector_masks(7, n)) for n in range(8)) == 128


def test_sector_vector_value():
    g = SectorVector(3, 2, [1.0, 2.0, 3.0])
    assert g.masks.tolist() == [0b011, 0b101, 0b110]
    assert g.value(0b101) == 2.0
    assert g.value(0b001) == 0.0
    with pytest.raises(ArgumentError):
        SectorVector(3, 2, [1.0, 2.0])


def test_total_sum():
    assert total_sum(SubsetVector.basis(3, 5)) == 1.0
    assert total_sum(SubsetVector(2, [0.5, 0.25, 2.0, -1.0])) == 1.75


def test_normalize():
    uniform = SubsetVector(3, np.full(8, 1 / 8))
    assert np.allclose(normalize(uniform).coeffs, uniform.coeffs)
    assert normalize(SubsetVector(2, [2.0, 0, 0, 0])).coeffs.tolist() == [1.0, 0, 0, 0]
    with pytest.raises(DegenerateNormalizationError):
        normalize(SubsetVector(2, [1.0, -1.0, 0.0, 0.0]))


def test_zeta_two_sites():
    w, a, b, c = 0.1, 0.2, 0.3, 0.4
    out = superset_zeta(SubsetVector(2, [w, a, b, c])).coeffs
    assert np.allclose(out, [w + a + b + c, a + c, b + c, c], rtol=0, atol=1e-15)
    back = superset_mobius(SubsetVector(2, out)).coeffs
    assert np.allclose(back, [w, a, b, c], rtol=0, atol=1e-15)


def test_zeta_extremes():
    assert superset_zeta(SubsetVector.basis(4, 0)).coeffs.tolist() == SubsetVector.basis(4, 0).coeffs.tolist()
    assert np.all(superset_zeta(SubsetVector.basis(4, 15)).coeffs == 1.0)
    assert superset_mobius(SubsetVector(4, np.ones(16))).coeffs.tolist() == SubsetVector.basis(4, 15).coeffs.tolist()


@pytest.mark.parametrize("n", [1, 3, 6, 8])
def test_zeta_matches_naive(rng, n):
    v = rng.standard_normal(1 << n)
    assert np.allclose(superset_zeta(SubsetVector(n, v)).coeffs, naive_superset_sum(list(v)),
                       rtol=0, atol=1e-12)


def test_zeta_exact_on_integers(rng):
    v = rng.integers(-50, 50, 1 << 8).astype(float)
    assert superset_zeta(SubsetVector(8, v)).coeffs.tolist() == [float(x) for x in naive_superset_sum(list(v))]


@pytest.mark.parametrize("n", [10, 16])
def test_roundtrip_both_orders(rng, n):
    v = SubsetVector(n, rng.standard_normal(1 << n))
    scale = np.max(np.abs(v.coeffs))
    assert np.max(np.abs(superset_mobius(superset_zeta(v)).coeffs - v.coeffs)) <= 1e-12 * scale
    assert np.max(np.abs(superset_zeta(superset_mobius(v)).coeffs - v.coeffs)) <= 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 1 << 5, elements=st.floats(-1e3, 1e3)))
def test_roundtrip_property(values):
    v = SubsetVector(5, values)
    back = superset_mobius(superset_zeta(v)).coeffs
    assert np.allclose(back, values, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(values))))


def test_product_state():
    f = product_state([0.2, 0.7])
    assert np.allclose(f.coeffs, [0.8 * 0.3, 0.2 * 0.3, 0.8 * 0.7, 0.2 * 0.7])
    assert total_sum(f) == pytest.approx(1.0)


def test_relabel(rng):
    v = SubsetVector(3, np.arange(8.0))
    moved = relabel(v, [1, 2, 0])
    # {0} -> {1}, {0,2} -> {1,0}
    assert moved[0b010] == v[0b001]
    assert moved[0b011] == v[0b101]
    assert np.array_equal(relabel(moved, [2, 0, 1]).coeffs, v.coeffs)
    with pytest.raises(ArgumentError):
        relabel(v, [0, 0, 1])


def test_json_and_csv(tmp_path, rng):
    v = SubsetVector(3, rng.standard_normal(8))
    path = tmp_path / "v.json"
    v.save_json(path)
    assert json.loads(path.read_text())["n_vertices"] == 3
    assert np.array_equal(SubsetVector.load_json(path).coeffs, v.coeffs)
    v.save_csv(tmp_path / "v.csv")
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "mask,cardinality,coefficient"
    mask, card, value = lines[4].split(",")
    assert (int(mask), int(card), float(value)) == (3, 2, v[3])

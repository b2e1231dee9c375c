"""Lattice containers, dyadic indexing, parameter validation, file round-trips."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwosc.lattice import (
    BesovParams,
    DyadicInterval,
    Lattice,
    LatticeFunction,
    TailModel,
    ZERO_TAIL,
    dyadic_positions,
    load_lattice_function,
    poly_degree_for,
    save_lattice_function,
)


def test_lattice_points_and_spacing():
    lat = Lattice(a=2 * np.pi)
    assert lat.spacing == pytest.approx(1.0)
    assert lat.weight == lat.spacing
    assert lat.point(5) == pytest.approx(5.0)
    np.testing.assert_allclose(lat.points(-2, 2), [-2, -1, 0, 1, 2])
    shifted = Lattice(a=2 * np.pi, shift=0.5)
    assert shifted.point(0) == pytest.approx(0.5)


def test_poly_degree_product_rule():
    # degree is the largest n with n * p <= 1, decided by the float product
    assert poly_degree_for(2.0) == 0
    assert poly_degree_for(1.5) == 0
    assert poly_degree_for(1.0) == 1
    assert poly_degree_for(0.5) == 2
    assert poly_degree_for(1.0 / 3.0) == 3
    assert poly_degree_for(0.1) == 10
    assert poly_degree_for(0.3) == 3


def test_dyadic_interval_geometry():
    lat = Lattice(a=np.pi)  # spacing 2
    iv = DyadicInterval(lat, level=3, position=-1)
    assert iv.index_lo == -8 and iv.index_hi == 0
    assert iv.n_points == 9
    lo, hi = iv.endpoints
    assert lo == pytest.approx(-16.0) and hi == pytest.approx(0.0)


@given(
    level=st.integers(min_value=0, max_value=12),
    k_min=st.integers(min_value=-500, max_value=500),
    span=st.integers(min_value=0, max_value=400),
)
@settings(max_examples=80, deadline=None)
def test_dyadic_positions_match_bruteforce(level, k_min, span):
    k_max = k_min + span
    lo, hi = dyadic_positions(level, k_min, k_max)
    h = 2**level
    brute = [
        pos
        for pos in range(k_min // h - 2, k_max // h + 2)
        if pos * h <= k_max and (pos + 1) * h >= k_min
    ]
    assert list(range(lo, hi + 1)) == brute


def test_lattice_function_window_and_tail():
    lat = Lattice(a=2 * np.pi)
    f = LatticeFunction(lat, -1, np.array([1.0, 2.0, 3.0], dtype=complex))
    assert f.k_max == 1
    assert f.value_at(-1) == 1.0
    assert f.value_at(5) == 0.0
    got = f.window_values(-3, 3)
    np.testing.assert_allclose(got, [0, 0, 1, 2, 3, 0, 0])
    decay = LatticeFunction(
        lat, -1, np.array([1.0, 2.0, 3.0], dtype=complex), tail=TailModel("decay", C=1.0, alpha=2.0)
    )
    with pytest.raises(ValueError):
        decay.window_values(-3, 3)


def test_tail_model_validation():
    with pytest.raises(ValueError):
        TailModel("decay", C=-1.0, alpha=2.0)
    with pytest.raises(ValueError):
        TailModel("nope")
    assert ZERO_TAIL.kind == "zero"


def test_besov_params_validation():
    with pytest.raises(ValueError):
        BesovParams(p=0.2)
    with pytest.raises(ValueError):
        BesovParams(p=1.0, tolerance=2.0)
    with pytest.raises(ValueError):
        BesovParams(p=1.0, level_cap=2)
    assert BesovParams(p=0.5).degree == 2


def test_save_load_roundtrip(tmp_path):
    lat = Lattice(a=3.0, shift=0.0)
    vals = np.array([0.5 - 1j, 2.0, -3.25 + 0.125j])
    f = LatticeFunction(lat, 4, vals)
    from pathlib import Path

    csv = tmp_path / "f.csv"
    side = Path(save_lattice_function(f, csv))
    g = load_lattice_function(csv)
    assert g.lattice.a == lat.a
    assert g.k_min == 4
    np.testing.assert_array_equal(g.values, vals)
    # byte-identical on re-save
    b1 = csv.read_bytes()
    meta1 = json.loads(side.read_text())
    save_lattice_function(f, csv)
    assert csv.read_bytes() == b1
    assert json.loads(side.read_text()) == meta1


def test_lattice_function_validation():
    lat = Lattice(a=1.0)
    with pytest.raises(ValueError):
        LatticeFunction(lat, 0, np.array([], dtype=complex))
    with pytest.raises(ValueError):
        LatticeFunction(lat, 0, np.array([np.nan + 0j]))
    with pytest.raises(ValueError):
        Lattice(a=0.0)
    with pytest.raises(ValueError):
        Lattice(a=-2.0)


def test_real_imag_parts():
    lat = Lattice(a=1.0)
    f = LatticeFunction(lat, 0, np.array([1 + 2j, 3 - 4j]))
    assert f.real_part().is_real
    np.testing.assert_allclose(f.real_part().values.real, [1, 3])
    np.testing.assert_allclose(f.imag_part().values.real, [2, -4])
    assert f.abs_sum() == pytest.approx(abs(1 + 2j) + abs(3 - 4j))

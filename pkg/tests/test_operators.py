"""Finite-rank Toeplitz route, dense discretizations, spectra, shell functional."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwosc.kernels import FULL_BAND, HALF_BAND, KernelSpec, kernel_norm_sq
from pwosc.operators import (
    AtomicSymbol,
    DenseOperator,
    FiniteRankOperator,
    SingularSpectrum,
    dense_toeplitz_sinc,
    dense_truncated_hankel,
    load_dense_operator,
    load_singular_spectrum,
    rochberg_peller_functional,
    sample_symbol_sequence,
    save_dense_operator,
    save_singular_spectrum,
    schatten_quasinorm,
    singular_values,
    standard_symbol_eval,
    toeplitz_from_atoms,
)

# ---------------------------------------------------------------------------
# finite-rank route


def test_single_atom_unit_singular_value():
    rng = np.random.default_rng(3)
    a = 1.3
    for _ in range(12):
        lam = complex(rng.uniform(-10 / a, 10 / a), rng.uniform(-5 / a, 5 / a))
        sym = AtomicSymbol(a, ((lam, 1.0),))
        s = singular_values(toeplitz_from_atoms(sym))
        assert s.sigmas.shape == (1,)
        assert abs(s.sigmas[0] - 1.0) < 1e-9


def test_two_far_atoms_near_orthogonal():
    a = 1.3
    step = math.pi / a
    sym = AtomicSymbol(a, ((0.0 + 0j, 1.0), (40 * step + 0j, 1.0)))
    s = singular_values(toeplitz_from_atoms(sym))
    assert np.allclose(s.sigmas, [1.0, 1.0], atol=1e-9)


def test_zero_coefficients_zero_operator():
    sym = AtomicSymbol(2.0, ((1j, 0.0), (3.0 + 0j, 0.0)))
    s = singular_values(toeplitz_from_atoms(sym))
    assert s.sigmas.size == 0
    assert schatten_quasinorm(s, 0.5) == 0.0


def test_rank_one_sigma_closed_form():
    u = KernelSpec(FULL_BAND, 2.0, 0.4 + 0.9j)
    v = KernelSpec(FULL_BAND, 2.0, -1.1 + 0.2j)
    c = 0.7 - 0.4j
    op = FiniteRankOperator((u,), (v,), np.array([c]))
    s = singular_values(op)
    expected = abs(c) * math.sqrt(kernel_norm_sq(u) * kernel_norm_sq(v))
    assert s.sigmas[0] == pytest.approx(expected, rel=1e-12)


def test_orthonormal_factors_give_coefficient_moduli():
    # at bandwidth pi the sinc kernels at integer points are orthonormal
    a = math.pi
    pts = [0.0, 1.0, 2.0, 5.0]
    specs = tuple(KernelSpec(FULL_BAND, a, p + 0j) for p in pts)
    coeffs = np.array([0.3, -2.0, 1j, 0.25 - 0.25j])
    op = FiniteRankOperator(specs, specs, coeffs)
    s = singular_values(op)
    assert np.allclose(s.sigmas, np.sort(np.abs(coeffs))[::-1], atol=1e-12)


def test_dense_cross_check_random_atoms():
    rng = np.random.default_rng(11)
    a = math.pi
    lams = rng.uniform(-4.0, 4.0, 4)
    cs = rng.normal(size=4) + 1j * rng.normal(size=4)
    sym = AtomicSymbol(a, tuple((complex(l), complex(c)) for l, c in zip(lams, cs)))
    hs_gram = schatten_quasinorm(singular_values(toeplitz_from_atoms(sym)), 2)
    dense = dense_toeplitz_sinc(lambda x: standard_symbol_eval(sym, x), a, 256)
    hs_dense = float(np.linalg.norm(dense.matrix, "fro"))
    assert hs_dense == pytest.approx(hs_gram, rel=2e-3)


def test_p_power_triangle_inequality_atomic_pairs():
    rng = np.random.default_rng(5)
    a = 1.0
    for p in (0.5, 1.0):
        for _ in range(6):
            def rand_op():
                n = rng.integers(1, 4)
                atoms = tuple(
                    (
                        complex(rng.uniform(-4, 4), rng.uniform(0.1, 2)),
                        complex(rng.normal(), rng.normal()),
                    )
                    for _ in range(n)
                )
                return toeplitz_from_atoms(AtomicSymbol(a, atoms))

            opa, opb = rand_op(), rand_op()
            combined = FiniteRankOperator(
                opa.left + opb.left,
                opa.right + opb.right,
                np.concatenate([opa.coeffs, opb.coeffs]),
            )
            lhs = schatten_quasinorm(singular_values(combined), p) ** p
            rhs = (
                schatten_quasinorm(singular_values(opa), p) ** p
                + schatten_quasinorm(singular_values(opb), p) ** p
            )
            assert lhs <= rhs * (1 + 1e-9)


# ---------------------------------------------------------------------------
# Schatten quasinorm


def test_schatten_trivial_values():
    s = SingularSpectrum(np.array([4.0, 3.0]))
    assert schatten_quasinorm(s, 1) == pytest.approx(7.0, rel=1e-15)
    assert schatten_quasinorm(s, 2) == pytest.approx(5.0, rel=1e-15)
    one = SingularSpectrum(np.array([1.0]))
    for p in (0.3, 0.5, 1.0, 2.0, 7.0):
        assert schatten_quasinorm(one, p) == pytest.approx(1.0, rel=1e-15)


def test_schatten_rejects_bad_p():
    s = SingularSpectrum(np.array([1.0]))
    with pytest.raises(ValueError):
        schatten_quasinorm(s, 0.0)
    with pytest.raises(ValueError):
        schatten_quasinorm(s, -1.0)


def test_rank_cutoff_drops_spurious_tail():
    # a sigma at 1e-13 of the max would contribute ~3e-7 at p=0.5; the
    # relative cutoff removes it
    s = SingularSpectrum(np.array([1.0, 9e-13]))
    assert schatten_quasinorm(s, 0.5) == pytest.approx(1.0, rel=1e-15)
    kept = SingularSpectrum(np.array([1.0, 9e-12]))
    assert schatten_quasinorm(kept, 0.5) > 1.0


@settings(max_examples=100, deadline=None)
@given(
    sig=st.lists(st.floats(1e-6, 1e3), min_size=1, max_size=8),
    p=st.floats(0.3, 3.0),
    q=st.floats(0.3, 3.0),
)
def test_schatten_lp_nesting(sig, p, q):
    if p > q:
        p, q = q, p
    arr = np.sort(np.asarray(sig))[::-1]
    s = SingularSpectrum(arr, rank_cutoff=0.0)
    assert schatten_quasinorm(s, p) >= schatten_quasinorm(s, q) * (1 - 1e-12)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SingularSpectrum(np.array([1.0, 2.0]))  # ascending
    with pytest.raises(ValueError):
        SingularSpectrum(np.array([1.0, -0.5]))


# ---------------------------------------------------------------------------
# symbol evaluation and sampling


def test_symbol_value_at_own_real_lattice_point():
    a = 1.3
    sym = AtomicSymbol(a, ((0.0 + 0j, 1.0),))
    assert standard_symbol_eval(sym, 0.0) == pytest.approx(2.0, rel=1e-14)


def test_symbol_empty_and_conjugation():
    a = 2.0
    assert standard_symbol_eval(AtomicSymbol(a, ()), 1.7 + 0.3j) == 0.0
    atoms = ((0.5 + 0.8j, 1.0 - 2.0j), (-1.0 + 0.3j, 0.5j))
    sym = AtomicSymbol(a, atoms)
    conj_sym = AtomicSymbol(
        a, tuple((l.conjugate(), c.conjugate()) for l, c in atoms)
    )
    z = 0.9 - 0.4j
    lhs = standard_symbol_eval(conj_sym, z.conjugate())
    rhs = standard_symbol_eval(sym, z).conjugate()
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_sample_sequence_zero_symbol():
    seq = sample_symbol_sequence(AtomicSymbol(1.0, ()))
    assert np.all(seq.values == 0)


def test_sample_sequence_real_lattice_atom_is_spike():
    # an atom on the quarter-spacing lattice samples to a single spike: the
    # kernel's oscillation vanishes at every other lattice point
    a = 1.0
    step = math.pi / (2 * a)
    sym = AtomicSymbol(a, ((4 * step + 0j, 1.0),))
    seq = sample_symbol_sequence(sym)
    vals = np.abs(seq.values)
    nz = np.nonzero(vals > 1e-10)[0] + seq.k_min
    assert list(nz) == [4]
    assert seq.value_at(4) == pytest.approx(2.0, rel=1e-12)
    # the declared 1/|k| tail constant dominates the outer-window values
    # (the bound is only claimed beyond twice the atom spread)
    ks = np.arange(seq.k_min, seq.k_max + 1)
    outer = np.abs(ks) >= max(8, (seq.k_max + 1) // 2)
    assert np.all(
        np.abs(seq.values[outer]) <= seq.tail.C / np.abs(ks[outer]) + 1e-12
    )


def test_sample_sequence_definition_and_smoothness():
    # the stored values are exactly (-1)^k * phi(pi k/(2a)); for a symbol
    # whose atom sits on the imaginary axis the alternating factor cancels
    # the kernel's own sampled oscillation, leaving a smooth sequence
    a = 1.0
    sym = AtomicSymbol(a, ((3.0j, 1.0),))
    seq = sample_symbol_sequence(sym)
    lat_step = math.pi / (2 * a)
    for k in range(-5, 6):
        direct = standard_symbol_eval(sym, k * lat_step)
        assert seq.value_at(k) == pytest.approx(
            (-1) ** k * direct, rel=1e-12, abs=1e-15
        )
    # no alternation: the (-1)^k factor cancels the kernel's own sampled
    # oscillation, so the dominant component keeps one sign on each side
    imag = np.array([seq.value_at(k).imag for k in range(1, 9)])
    assert np.all(imag > 0) or np.all(imag < 0)
    imag_neg = np.array([seq.value_at(k).imag for k in range(-8, 0)])
    assert np.all(imag_neg > 0) or np.all(imag_neg < 0)


# ---------------------------------------------------------------------------
# dense discretizations


def test_dense_identity_symbol():
    a = 1.3
    op = dense_toeplitz_sinc(lambda x: np.ones_like(x), a, 8)
    err = float(np.max(np.abs(op.matrix - np.eye(17))))
    assert err <= op.truncation_note["tail_bound"]


def test_dense_real_symbol_hermitian():
    a = 1.0
    op = dense_toeplitz_sinc(lambda x: 1.0 / (1.0 + x * x), a, 10)
    assert np.max(np.abs(op.matrix - op.matrix.conj().T)) < 1e-12


def test_dense_modulation_invariance():
    a = 1.0
    theta = 0.7
    sym = lambda x: 1.0 / (1.0 + x * x)
    op1 = dense_toeplitz_sinc(sym, a, 12)
    op2 = dense_toeplitz_sinc(lambda x: np.exp(1j * theta) * sym(x), a, 12)
    s1 = np.linalg.svd(op1.matrix, compute_uv=False)
    s2 = np.linalg.svd(op2.matrix, compute_uv=False)
    assert np.max(np.abs(s1 - s2)) < 1e-12


def test_dense_tolerance_enforcement():
    with pytest.raises(ValueError):
        dense_toeplitz_sinc(lambda x: np.ones_like(x), 1.0, 8, tol=1e-9)
    # generous tolerance passes
    dense_toeplitz_sinc(lambda x: np.ones_like(x), 1.0, 8, tol=1.0)


def test_hankel_disjoint_spectra_give_zero():
    a = 1.7
    op = dense_truncated_hankel(lambda x: np.ones_like(x), a, 6)
    assert float(np.max(np.abs(op.matrix))) <= op.truncation_note["tail_bound"]


def test_hankel_modulation_is_identity():
    a = 1.7
    op = dense_truncated_hankel(lambda x: np.exp(-1j * a * x), a, 6)
    err = float(np.max(np.abs(op.matrix - np.eye(13))))
    assert err <= op.truncation_note["tail_bound"]


def test_hankel_linearity():
    a = 1.7
    f = lambda x: np.ones_like(x)
    g = lambda x: np.exp(-1j * a * x)
    op_f = dense_truncated_hankel(f, a, 5)
    op_g = dense_truncated_hankel(g, a, 5)
    op_fg = dense_truncated_hankel(lambda x: f(x) + g(x), a, 5)
    assert np.max(np.abs(op_fg.matrix - op_f.matrix - op_g.matrix)) < 1e-12


# ---------------------------------------------------------------------------
# dyadic-shell functional


def test_shell_functional_zero():
    val, report = rochberg_peller_functional(np.zeros(4097), 1.0, math.pi, -6)
    assert val == 0.0


def test_shell_functional_homogeneity():
    a = math.pi
    xs = np.linspace(-2 * a, 2 * a, 4097)
    data = np.exp(-(xs**2)) * (1 + 0.5j * xs)
    for p in (0.5, 1.0, 2.0):
        v1, _ = rochberg_peller_functional(data, p, a, -5)
        v2, _ = rochberg_peller_functional(2.5 * data, p, a, -5)
        assert v2 == pytest.approx(2.5**p * v1, rel=1e-9)


def test_shell_functional_single_bump_dominates():
    a = math.pi
    m = 8193
    xs = np.linspace(-2 * a, 2 * a, m)
    u = (np.abs(xs) - 1.0) / 0.1
    bump = np.where(np.abs(u) < 1, np.exp(-1.0 / np.clip(1 - u * u, 1e-300, None)), 0.0)
    val, report = rochberg_peller_functional(bump, 1.0, a, -6)
    sv = report["shell_values"]
    weighted = {j: 2.0 ** (-abs(j)) * v for j, v in sv.items()}
    total = sum(weighted.values())
    assert max(weighted.values()) > 0.9 * total
    assert report["aliasing_edge_fraction"] < 1e-3


def test_shell_functional_grid_too_coarse():
    with pytest.raises(ValueError):
        rochberg_peller_functional(np.ones(64), 1.0, math.pi, -8)


# ---------------------------------------------------------------------------
# serialization


def test_dense_operator_round_trip(tmp_path):
    a = 1.0
    op = dense_toeplitz_sinc(lambda x: 1.0 / (1 + x * x), a, 4)
    stem = tmp_path / "dense_op"
    save_dense_operator(op, stem)
    back = load_dense_operator(stem)
    assert np.array_equal(back.matrix, op.matrix)
    assert back.row_basis == op.row_basis
    assert back.truncation_note == op.truncation_note


def test_spectrum_round_trip(tmp_path):
    s = SingularSpectrum(np.array([2.5, 1.0, 1e-14]), rank_cutoff=1e-12)
    path = tmp_path / "spectrum.csv"
    save_singular_spectrum(s, path)
    back = load_singular_spectrum(path)
    assert np.array_equal(back.sigmas, s.sigmas)
    assert back.rank_cutoff == s.rank_cutoff

"""Toeplitz-type operators on bandlimited spaces.

Atomic symbols are finite combinations phi(z) = sum c_λ · rho_{2a,λ}(z) / ||rho_{a,λ}||².
The compression of multiplication by such a symbol to the bandwidth-a space is
an exactly finite-rank operator: each atom contributes one rank-one term
rho_{a,λ} ⊗ rho_{a,conj(λ)} with coefficient c_λ / ||rho_{a,λ}||².  Its singular
values are computed without any discretization through the Gram identity

    nonzero σ(Σ c_i u_i ⊗ v_i) = nonzero σ(G_U^{1/2} · diag(c) · G_V^{1/2}),

where G_U, G_V are the Gram matrices of the two kernel systems.  Dense
sinc-basis truncations (composite Gauss-Legendre panels aligned to the sinc
zeros) provide the independent discretized route for cross-checks, plus a
truncated Hankel analogue between the two half-band spaces and a diagnostic
dyadic-shell functional of the symbol's Fourier data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import FULL_BAND, HALF_BAND, KernelSpec, gram_matrix, kernel_eval, kernel_norm_sq
from .lattice import Lattice, LatticeFunction, TailModel

__all__ = [
    "AtomicSymbol",
    "FiniteRankOperator",
    "DenseOperator",
    "SingularSpectrum",
    "toeplitz_from_atoms",
    "singular_values",
    "schatten_quasinorm",
    "standard_symbol_eval",
    "sample_symbol_sequence",
    "dense_toeplitz_sinc",
    "dense_truncated_hankel",
    "rochberg_peller_functional",
    "save_dense_operator",
    "load_dense_operator",
    "save_singular_spectrum",
    "load_singular_spectrum",
]

RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class AtomicSymbol:
    """Finite atomic symbol for the bandwidth-a space.

    atoms: sequence of (λ, c); the symbol is Σ c · rho_{2a,λ} / ||rho_{a,λ}||².
    """

    a: float
    atoms: tuple[tuple[complex, complex], ...]

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError("bandwidth must be positive and finite")
        object.__setattr__(
            self, "atoms", tuple((complex(l), complex(c)) for l, c in self.atoms)
        )


@dataclass(frozen=True)
class FiniteRankOperator:
    """T: f ↦ Σ c_i <f, v_i> u_i with kernel-function factors."""

    left: tuple[KernelSpec, ...]
    right: tuple[KernelSpec, ...]
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(
            self, "coeffs", np.asarray(self.coeffs, dtype=complex)
        )
        if not (len(self.left) == len(self.right) == self.coeffs.size):
            raise ValueError("left, right, coeffs must have equal lengths")

    @property
    def rank_bound(self) -> int:
        return len(self.left)


@dataclass(frozen=True)
class DenseOperator:
    """Matrix of an operator between two explicit orthonormal bases."""

    matrix: np.ndarray
    row_basis: str
    col_basis: str
    truncation_note: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SingularSpectrum:
    sigmas: np.ndarray
    rank_cutoff: float = RANK_CUTOFF

    def __post_init__(self) -> None:
        sig = np.asarray(self.sigmas, dtype=float)
        if sig.size and (np.any(sig < 0) or np.any(np.diff(sig) > 0)):
            raise ValueError("singular values must be nonnegative and descending")
        object.__setattr__(self, "sigmas", sig)


def toeplitz_from_atoms(sym: AtomicSymbol) -> FiniteRankOperator:
    """Exact finite-rank realization of the atomic-symbol Toeplitz operator.

    Each atom (λ, c) contributes the rank-one piece
    (c/||rho_{a,λ}||²) · rho_{a,λ} ⊗ rho_{a,conj(λ)}.
    """
    a = sym.a
    left, right, coeffs = [], [], []
    for lam, c in sym.atoms:
        left.append(KernelSpec(FULL_BAND, a, lam))
        right.append(KernelSpec(FULL_BAND, a, np.conj(lam)))
        coeffs.append(c / kernel_norm_sq(KernelSpec(FULL_BAND, a, lam)))
    return FiniteRankOperator(tuple(left), tuple(right), np.array(coeffs, dtype=complex))


def _psd_sqrt(g: np.ndarray) -> np.ndarray:
    """Matrix square root of a Gram matrix, clipping eigenvalue noise.

    Eigenvalues in [-1e-10 * trace, 0) are clipped to zero; anything lower is
    rejected upstream by the Gram assembly.
    """
    if g.size == 0:
        return g
    evals, vecs = np.linalg.eigh(g)
    trace = float(np.real(np.trace(g)))
    if evals[0] < -1e-10 * max(trace, 1e-300):
        raise AssertionError("Gram matrix eigenvalue below the PSD tolerance")
    evals = np.clip(evals, 0.0, None)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def singular_values(op: FiniteRankOperator) -> SingularSpectrum:
    """Singular values of the finite-rank operator, exactly via Gram factors."""
    if op.rank_bound == 0:
        return SingularSpectrum(np.zeros(0))
    gu = gram_matrix(list(op.left))
    gv = gram_matrix(list(op.right))
    core = _psd_sqrt(gu) @ np.diag(op.coeffs) @ _psd_sqrt(gv)
    sig = np.linalg.svd(core, compute_uv=False)
    smax = sig[0] if sig.size else 0.0
    sig = sig[sig >= RANK_CUTOFF * smax] if smax > 0 else sig[:0]
    return SingularSpectrum(sig)


def schatten_quasinorm(s: SingularSpectrum, p: float) -> float:
    """(Σ σ_i^p)^{1/p} over σ_i above the recorded relative cutoff."""
    if not (p > 0):
        raise ValueError("p must be positive")
    sig = s.sigmas
    if sig.size == 0:
        return 0.0
    sig = sig[sig >= s.rank_cutoff * sig[0]]
    if sig.size == 0:
        return 0.0
    return float(np.sum(sig**p) ** (1.0 / p))


def standard_symbol_eval(sym: AtomicSymbol, z):
    """Pointwise value of the atomic symbol at a point or an array of points."""
    zz = np.asarray(z, dtype=complex)
    total = np.zeros(zz.shape, dtype=complex)
    for lam, c in sym.atoms:
        wide = KernelSpec(FULL_BAND, 2.0 * sym.a, lam)
        nrm = kernel_norm_sq(KernelSpec(FULL_BAND, sym.a, lam))
        total = total + c * kernel_eval(wide, zz) / nrm
    if np.ndim(z) == 0:
        return complex(total)
    return total


def _symbol_decay_constant(sym: AtomicSymbol) -> float:
    """C with |phi(x)| <= C/|x| for real |x| beyond twice the atom spread."""
    c_tot = 0.0
    for lam, c in sym.atoms:
        nrm = kernel_norm_sq(KernelSpec(FULL_BAND, sym.a, lam))
        c_tot += abs(c) * math.cosh(2.0 * sym.a * lam.imag) / (math.pi * nrm)
    return 2.0 * c_tot


def sample_symbol_sequence(
    sym: AtomicSymbol, min_halfwidth: int = 64, max_halfwidth: int = 1 << 15
) -> LatticeFunction:
    """Sample (-1)^k · phi(π k /(2a)) on the quarter-spacing lattice.

    The window is grown (doubling) until the outer quarter of the stored
    values is negligible against the peak, then a certified 1/|k| decay tail
    is attached with a constant derived from Σ|c| and the kernel decay.
    """
    a = sym.a
    lat = Lattice(4.0 * a)
    step = lat.spacing  # π/(2a)
    if not sym.atoms:
        return LatticeFunction(lat, 0, np.zeros(1, dtype=complex))
    spread = max(abs(l.real) for l, _ in sym.atoms) / step
    half = max(min_halfwidth, int(2 * spread) + 8)

    def window_values(h: int) -> np.ndarray:
        ks = np.arange(-h, h + 1)
        zs = lat.point(ks).astype(complex)
        vals = np.zeros(zs.shape, dtype=complex)
        for lam, c in sym.atoms:
            wide = KernelSpec(FULL_BAND, 2.0 * a, lam)
            nrm = kernel_norm_sq(KernelSpec(FULL_BAND, a, lam))
            vals += (c / nrm) * kernel_eval(wide, zs)
        signs = np.where(ks % 2 == 0, 1.0, -1.0)
        return signs * vals

    vals = window_values(half)
    peak = float(np.max(np.abs(vals)))
    while half < max_halfwidth:
        edge = float(np.max(np.abs(vals[: len(vals) // 8]), initial=0.0))
        edge = max(edge, float(np.max(np.abs(vals[-len(vals) // 8 :]), initial=0.0)))
        if peak == 0.0 or edge <= 1e-3 * peak:
            break
        half *= 2
        vals = window_values(half)
        peak = max(peak, float(np.max(np.abs(vals))))
    # |phi(x)| <= C_x/|x| beyond the window; in index units |f(k)| <= C_k/|k|
    c_k = _symbol_decay_constant(sym) / step
    tail = TailModel("decay", C=c_k, alpha=1.0)
    return LatticeFunction(lat, -half, vals, tail)


# ---------------------------------------------------------------------------
# Dense discretizations.


def _gl_panels(lo: float, hi: float, panel: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [lo, hi] with given panel size."""
    n_panels = max(1, int(math.ceil((hi - lo) / panel - 1e-12)))
    edges = np.linspace(lo, hi, n_panels + 1)
    base_x, base_w = np.polynomial.legendre.leggauss(points)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    ws = (half[:, None] * base_w[None, :]).ravel()
    return xs, ws


def _sinc_basis_matrix(a: float, indices: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Rows: orthonormal sinc basis s_k(x) = sqrt(π/a) rho_{a, πk/a}(x) on xs."""
    centers = math.pi * indices / a
    w = a * (xs[None, :] - centers[:, None])
    out = np.empty(w.shape, dtype=float)
    small = np.abs(w) < 1e-6
    ws = w[small]
    out[small] = 1.0 - ws * ws / 6.0
    out[~small] = np.sin(w[~small]) / w[~small]
    return math.sqrt(a / math.pi) * out


def dense_toeplitz_sinc(
    symbol,
    a: float,
    n_window: int,
    half_range: float | None = None,
    tol: float | None = None,
    points_per_panel: int = 16,
) -> DenseOperator:
    """Matrix of f ↦ P_a(symbol · f) in the orthonormal sinc basis.

    A[j][k] = ∫ symbol(x) s_k(x) conj(s_j(x)) dx over [-half_range, half_range],
    by composite Gauss-Legendre on panels of length π/a.  A rigorous 1/x²
    tail bound for the discarded |x| > half_range mass is recorded in
    truncation_note; if tol is given and the bound exceeds it, this raises.
    """
    if not (a > 0 and n_window >= 0):
        raise ValueError("need a > 0 and a nonnegative window")
    panel = math.pi / a
    extent = math.pi * n_window / a
    if half_range is None:
        half_range = extent + 64.0 * panel
    if half_range <= extent:
        raise ValueError("integration range must exceed the basis extent")
    xs, ws = _gl_panels(-half_range, half_range, panel, points_per_panel)
    phi = np.asarray(symbol(xs), dtype=complex)
    if phi.shape != xs.shape:
        raise ValueError("symbol callable must map arrays to arrays")
    sup_phi = float(np.max(np.abs(phi)))
    indices = np.arange(-n_window, n_window + 1)
    s = _sinc_basis_matrix(a, indices, xs)
    weighted = (ws * phi)[None, :] * s
    matrix = weighted @ s.T
    # |s_j(x) s_k(x)| <= (1/(a π)) / (|x| - extent)^2 for |x| > half_range
    tail_bound = sup_phi * 2.0 / (a * math.pi * (half_range - extent))
    note = {
        "half_range": half_range,
        "panel": panel,
        "points_per_panel": points_per_panel,
        "tail_bound": tail_bound,
        "sup_symbol_on_grid": sup_phi,
    }
    if tol is not None and tail_bound > tol:
        raise ValueError(
            f"truncation tail bound {tail_bound:.3e} exceeds requested {tol:.3e}"
        )
    return DenseOperator(
        matrix,
        row_basis=f"sinc(a={a}, n={n_window})",
        col_basis=f"sinc(a={a}, n={n_window})",
        truncation_note=note,
    )


def dense_truncated_hankel(
    psi,
    a: float,
    n_window: int,
    half_range: float | None = None,
    tol: float | None = None,
    points_per_panel: int = 16,
) -> DenseOperator:
    """Matrix of f ↦ P_[-a,0](psi · f) from the [0,a]-band to the [-a,0]-band.

    Bases: t_k^±(x) = e^{± i a x/2} s_k^{(a/2)}(x), so that
    B[j][k] = ∫ psi(x) e^{i a x} s_k^{(a/2)}(x) s_j^{(a/2)}(x) dx.
    """
    if not (a > 0 and n_window >= 0):
        raise ValueError("need a > 0 and a nonnegative window")
    half_band = a / 2.0
    panel = math.pi / a
    extent = math.pi * n_window / half_band
    if half_range is None:
        half_range = extent + 64.0 * panel
    if half_range <= extent:
        raise ValueError("integration range must exceed the basis extent")
    xs, ws = _gl_panels(-half_range, half_range, panel, points_per_panel)
    vals = np.asarray(psi(xs), dtype=complex)
    if vals.shape != xs.shape:
        raise ValueError("symbol callable must map arrays to arrays")
    sup_psi = float(np.max(np.abs(vals)))
    indices = np.arange(-n_window, n_window + 1)
    s = _sinc_basis_matrix(half_band, indices, xs)
    mod = np.exp(1j * a * xs)
    weighted = (ws * vals * mod)[None, :] * s
    matrix = weighted @ s.T
    tail_bound = sup_psi * 2.0 / (half_band * math.pi * (half_range - extent))
    note = {
        "half_range": half_range,
        "panel": panel,
        "points_per_panel": points_per_panel,
        "tail_bound": tail_bound,
        "sup_symbol_on_grid": sup_psi,
    }
    if tol is not None and tail_bound > tol:
        raise ValueError(
            f"truncation tail bound {tail_bound:.3e} exceeds requested {tol:.3e}"
        )
    return DenseOperator(
        matrix,
        row_basis=f"modulated-sinc(band=[-{a},0], n={n_window})",
        col_basis=f"modulated-sinc(band=[0,{a}], n={n_window})",
        truncation_note=note,
    )


# ---------------------------------------------------------------------------
# Dyadic-shell diagnostic functional of Fourier data.


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C^∞ step: 1 on (-∞, 1/2], 0 on [1, ∞), built from exp(-1/t)."""
    u = np.asarray(u, dtype=float)
    t = np.clip(2.0 * u - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        b = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        bc = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return bc / (b + bc)


def rochberg_peller_functional(
    phi_hat: np.ndarray,
    p: float,
    a: float,
    j_min: int,
    pad_factor: int = 8,
) -> tuple[float, dict]:
    """Diagnostic dyadic-shell functional of Fourier data on [-2a, 2a].

    Computes  a · Σ_j 2^{-|j|} · || F^{-1}( ν_j(|ξ|) · phi_hat ) ||_{L^p}^p
    with the telescoping shells ν_j(ξ) = S(ξ/2^j) - S(ξ/2^{j-1}) (supports in
    [2^{j-2}, 2^j]), j running from j_min up to the full band.  Inverse
    transforms use a zero-padded FFT; L^p norms use trapezoid sums on the FFT
    window.  The dict reports the aliasing estimate (edge mass fraction) and
    the shell range.  Diagnostic only: comparability, not tight constants.
    """
    if not (p > 0):
        raise ValueError("p must be positive")
    phi_hat = np.asarray(phi_hat, dtype=complex)
    m = phi_hat.size
    if m < 8:
        raise ValueError("need at least 8 grid samples")
    xs = np.linspace(-2.0 * a, 2.0 * a, m)
    dxi = xs[1] - xs[0]
    if dxi > 2.0 ** (j_min - 2):
        raise ValueError(
            f"grid spacing {dxi:.3e} too coarse for shells down to 2^{j_min}"
        )
    j_max = int(math.ceil(math.log2(4.0 * a))) + 1
    n_fft = 1 << int(math.ceil(math.log2(m * pad_factor)))
    total = 0.0
    shell_values = {}
    worst_edge = 0.0
    for j in range(j_min, j_max + 1):
        nu = _smooth_step(np.abs(xs) / 2.0**j) - _smooth_step(np.abs(xs) / 2.0 ** (j - 1))
        piece = nu * phi_hat
        if not np.any(piece):
            shell_values[j] = 0.0
            continue
        # F^{-1}g(t) = (1/2π) ∫ g(ξ) e^{iξt} dξ on the FFT time grid
        buf = np.zeros(n_fft, dtype=complex)
        buf[:m] = piece
        spec = np.fft.fft(buf)
        ts = 2.0 * math.pi * np.fft.fftfreq(n_fft, d=dxi)
        vals = np.abs(spec) * (dxi / (2.0 * math.pi))
        order = np.argsort(ts)
        ts, vals = ts[order], vals[order]
        dt = ts[1] - ts[0]
        powers = vals**p
        norm_p = float(np.sum(powers) * dt)
        edge = int(0.05 * n_fft) or 1
        edge_mass = float((np.sum(powers[:edge]) + np.sum(powers[-edge:])) * dt)
        worst_edge = max(worst_edge, edge_mass / norm_p if norm_p > 0 else 0.0)
        shell_values[j] = norm_p
        total += 2.0 ** (-abs(j)) * norm_p
    report = {
        "j_min": j_min,
        "j_max": j_max,
        "aliasing_edge_fraction": worst_edge,
        "shell_values": shell_values,
    }
    return a * total, report


# ---------------------------------------------------------------------------
# Serialization.


def save_dense_operator(op: DenseOperator, stem) -> None:
    """Write <stem>.npy (matrix) and <stem>.json (bases + truncation note)."""
    stem = str(stem)
    np.save(stem + ".npy", op.matrix)
    with open(stem + ".json", "w") as fh:
        json.dump(
            {
                "row_basis": op.row_basis,
                "col_basis": op.col_basis,
                "truncation_note": op.truncation_note,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def load_dense_operator(stem) -> DenseOperator:
    stem = str(stem)
    matrix = np.load(stem + ".npy")
    with open(stem + ".json") as fh:
        meta = json.load(fh)
    return DenseOperator(matrix, meta["row_basis"], meta["col_basis"], meta["truncation_note"])


def save_singular_spectrum(s: SingularSpectrum, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# rank_cutoff,{float(s.rank_cutoff)!r}\n")
        fh.write("sigma\n")
        for v in s.sigmas:
            fh.write(f"{float(v)!r}\n")


def load_singular_spectrum(path) -> SingularSpectrum:
    with open(path) as fh:
        header = fh.readline().strip()
        cutoff = float(header.split(",", 1)[1])
        fh.readline()
        sig = [float(line) for line in fh if line.strip()]
    return SingularSpectrum(np.array(sig), cutoff)

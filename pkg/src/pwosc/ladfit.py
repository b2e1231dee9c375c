"""Exact least-absolute-deviation polynomial fitting.

Minimizes mean |y_i - P(x_i)| over real polynomials of degree <= n.  Two exact
routes are kept deliberately independent of each other:

* interpolating-subset enumeration: some optimal degree-n fit interpolates
  n+1 of the data points, so for small m the optimum is found by trying all
  C(m, n+1) interpolating polynomials.  This doubles as the certifying oracle
  for the LP route.
* an LP in the coefficients plus per-point slack variables, solved by HiGHS,
  followed by a snap onto the nearest interpolation vertex and exact
  re-evaluation of both candidates.  The reported residual is always the mean
  absolute residual of an explicitly constructed polynomial, never the raw LP
  objective.

For intervals that consist of a short data block surrounded by long runs of
exact zeros there is a third device: an optimality certificate for the zero
polynomial built from the subgradient conditions.  If a bounded dual weight
function exists on the zero sites (checked in closed form through power sums
of integer ranges), P = 0 is exactly optimal and the residual is the window
sum divided by the point count.  This is what keeps high dyadic levels exact
without ever materializing 2**40 points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix, eye_array, hstack, vstack

__all__ = [
    "L1FitResult",
    "l1_poly_fit",
    "lad_fit_enum",
    "lad_fit_median",
    "lad_fit_lp",
    "certify_zero_fit",
    "level_oscillations",
    "fit_row_exact",
]

# Interpolating-subset enumeration is used while C(m, n+1) stays below this.
ENUM_COMBO_CAP = 700

_LP_CACHE: dict[tuple[int, int], tuple] = {}


@dataclass(frozen=True)
class L1FitResult:
    coeffs: np.ndarray  # increasing powers, original coordinates
    residual: float  # mean absolute residual


def _check_nodes(xs: np.ndarray) -> None:
    if xs.ndim != 1:
        raise ValueError("xs must be one-dimensional")
    if np.unique(xs).size != xs.size:
        raise ValueError("nodes must be distinct")
    if not np.all(np.isfinite(xs)):
        raise ValueError("nodes must be finite")


def _normalize(xs: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Affine map of the nodes onto [-1, 1]; returns (t, alpha, beta)."""
    lo, hi = float(np.min(xs)), float(np.max(xs))
    if hi == lo:
        return np.zeros_like(xs), 1.0, lo
    alpha = (hi - lo) / 2.0
    beta = (hi + lo) / 2.0
    t = (xs - beta) / alpha
    if np.unique(t).size != t.size:
        raise ValueError(
            "nodes collapse under normalization; they are too close together "
            "relative to the node range"
        )
    return t, alpha, beta


def _denormalize_coeffs(coeffs_t: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Coefficients of Q((x - beta)/alpha) in powers of x."""
    q = np.polynomial.Polynomial(coeffs_t)
    sub = np.polynomial.Polynomial([-beta / alpha, 1.0 / alpha])
    out = q(sub).coef
    full = np.zeros(len(coeffs_t))
    full[: len(out)] = out
    return full


def lad_fit_median(ys: np.ndarray) -> tuple[float, float]:
    """Exact degree-0 fit: a median and the mean absolute deviation."""
    med = float(np.median(ys))
    return med, float(np.mean(np.abs(ys - med)))


def _interp_candidates(t: np.ndarray, ys: np.ndarray, degree: int):
    """Yield (coeffs, mean_abs_residual) over all interpolating subsets."""
    m = t.size
    vander = np.vander(t, degree + 1, increasing=True)
    for idx in combinations(range(m), degree + 1):
        sub = vander[list(idx)]
        try:
            c = np.linalg.solve(sub, ys[list(idx)])
        except np.linalg.LinAlgError:
            continue
        res = float(np.mean(np.abs(ys - vander @ c)))
        yield c, res


def lad_fit_enum(xs: np.ndarray, ys: np.ndarray, degree: int) -> L1FitResult:
    """Brute-force exact fit through interpolating subsets (oracle route)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    _check_nodes(xs)
    m = xs.size
    t, alpha, beta = _normalize(xs)
    if m <= degree + 1:
        c = np.zeros(degree + 1)
        sub = np.vander(t, m, increasing=True)
        c[:m] = np.linalg.solve(sub, ys)
        return L1FitResult(_denormalize_coeffs(c, alpha, beta), 0.0)
    best_c, best_r = None, math.inf
    for c, res in _interp_candidates(t, ys, degree):
        if res < best_r:
            best_c, best_r = c, res
    if best_c is None:
        raise ValueError("no nonsingular interpolating subset found")
    return L1FitResult(_denormalize_coeffs(best_c, alpha, beta), best_r)


def _lp_matrices(m: int, degree: int, t: np.ndarray):
    key = (m, degree, hash(t.tobytes()))
    cached = _LP_CACHE.get(key)
    if cached is not None:
        return cached
    vander = np.vander(t, degree + 1, increasing=True)
    v = csr_matrix(vander)
    ident = eye_array(m, format="csr")
    a_ub = vstack([hstack([v, -ident]), hstack([-v, -ident])], format="csr")
    cost = np.concatenate([np.zeros(degree + 1), np.ones(m)])
    bounds = [(None, None)] * (degree + 1) + [(0, None)] * m
    _LP_CACHE[key] = (vander, a_ub, cost, bounds)
    if len(_LP_CACHE) > 256:
        _LP_CACHE.pop(next(iter(_LP_CACHE)))
    return _LP_CACHE[key]


def lad_fit_lp(xs: np.ndarray, ys: np.ndarray, degree: int) -> L1FitResult:
    """Exact fit via the slack-variable LP, snapped to an interpolation vertex."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    _check_nodes(xs)
    m = xs.size
    if m <= degree + 1:
        return lad_fit_enum(xs, ys, degree)
    scale = float(np.max(np.abs(ys)))
    if scale == 0.0:
        return L1FitResult(np.zeros(degree + 1), 0.0)
    t, alpha, beta = _normalize(xs)
    yn = ys / scale
    vander, a_ub, cost, bounds = _lp_matrices(m, degree, t)
    b_ub = np.concatenate([yn, -yn])
    sol = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if sol.status != 0:
        raise RuntimeError(f"LAD LP failed with status {sol.status}: {sol.message}")
    c_lp = sol.x[: degree + 1]
    res_lp = float(np.mean(np.abs(yn - vander @ c_lp)))
    # Snap to an interpolation vertex near the LP point; a vertex passing the
    # subgradient certificate is exactly optimal, which also irons out the
    # solver's own optimality tolerance.
    certified = _snap_and_certify(vander, yn, yn - vander @ c_lp, degree)
    if certified is not None:
        best_r, best_c = certified
    else:
        order = np.argsort(np.abs(yn - vander @ c_lp))[: degree + 1]
        best_c, best_r = c_lp, res_lp
        try:
            c_snap = np.linalg.solve(vander[order], yn[order])
            res_snap = float(np.mean(np.abs(yn - vander @ c_snap)))
            if res_snap < best_r:
                best_c, best_r = c_snap, res_snap
        except np.linalg.LinAlgError:
            pass
    return L1FitResult(
        _denormalize_coeffs(best_c * scale, alpha, beta), best_r * scale
    )


def _fit_real(xs: np.ndarray, ys: np.ndarray, degree: int) -> L1FitResult:
    m = xs.size
    if m <= degree + 1:
        return lad_fit_enum(xs, ys, degree)
    if degree == 0:
        med, res = lad_fit_median(ys)
        return L1FitResult(np.array([med]), res)
    if math.comb(m, degree + 1) <= ENUM_COMBO_CAP:
        return lad_fit_enum(xs, ys, degree)
    return lad_fit_lp(xs, ys, degree)


def _fit_complex_modulus(xs: np.ndarray, ys: np.ndarray, degree: int) -> L1FitResult:
    """Complex-modulus objective, alternating/IRLS refinement of split fits."""
    t, alpha, beta = _normalize(xs)
    fr = _fit_real(t, ys.real, degree)
    fi = _fit_real(t, ys.imag, degree)
    c = fr.coeffs + 1j * fi.coeffs
    vander = np.vander(t, degree + 1, increasing=True)
    best_c = c.copy()
    best_obj = float(np.mean(np.abs(ys - vander @ c)))
    # Interpolating subsets seed further candidates on small m.
    m = xs.size
    if m > degree + 1 and math.comb(m, degree + 1) <= ENUM_COMBO_CAP:
        for idx in combinations(range(m), degree + 1):
            try:
                cc = np.linalg.solve(vander[list(idx)], ys[list(idx)])
            except np.linalg.LinAlgError:
                continue
            obj = float(np.mean(np.abs(ys - vander @ cc)))
            if obj < best_obj:
                best_obj, best_c = obj, cc
    c = best_c.copy()
    damp = 1e-4 * max(best_obj, 1e-300)
    for _ in range(200):
        r = ys - vander @ c
        w = 1.0 / np.sqrt(np.sqrt(np.abs(r) ** 2 + damp**2))
        cw, *_ = np.linalg.lstsq(vander * w[:, None], ys * w, rcond=None)
        obj = float(np.mean(np.abs(ys - vander @ cw)))
        if obj < best_obj - 1e-15 * (1 + best_obj):
            best_obj, best_c = obj, cw
            c = cw
        else:
            damp *= 0.25
            if damp < 1e-14 * (1 + best_obj):
                break
    coeffs = _denormalize_coeffs(best_c.real, alpha, beta) + 1j * _denormalize_coeffs(
        best_c.imag, alpha, beta
    )
    return L1FitResult(coeffs, best_obj)


def l1_poly_fit(xs, ys, degree: int, complex_mode: str = "modulus") -> L1FitResult:
    """Best degree-<=degree polynomial for the mean absolute deviation.

    Real data is solved exactly.  Complex data with complex_mode="modulus"
    minimizes the complex-modulus objective by descent seeded from the exact
    split fits (reported value is always achieved by the returned
    coefficients); complex_mode="split" fits real and imaginary parts
    separately and reports the combined complex residual of that pair.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    xs = np.asarray(xs, dtype=float)
    ys_arr = np.asarray(ys)
    if ys_arr.shape != xs.shape:
        raise ValueError("xs and ys must have equal length")
    if not np.all(np.isfinite(ys_arr)):
        raise ValueError("values must be finite")
    if not np.iscomplexobj(ys_arr) or np.all(ys_arr.imag == 0):
        return _fit_real(xs, ys_arr.real.astype(float), degree)
    if complex_mode == "split":
        t, alpha, beta = _normalize(xs)
        fr = _fit_real(t, ys_arr.real.astype(float), degree)
        fi = _fit_real(t, ys_arr.imag.astype(float), degree)
        ct = fr.coeffs + 1j * fi.coeffs
        vander = np.vander(t, degree + 1, increasing=True)
        c = _denormalize_coeffs(fr.coeffs, alpha, beta) + 1j * _denormalize_coeffs(
            fi.coeffs, alpha, beta
        )
        return L1FitResult(c, float(np.mean(np.abs(ys_arr - vander @ ct))))
    if complex_mode != "modulus":
        raise ValueError(f"unknown complex_mode {complex_mode!r}")
    return _fit_complex_modulus(xs, ys_arr.astype(complex), degree)


# ---------------------------------------------------------------------------
# Zero-polynomial optimality certificate for block-plus-zero-runs data.

def _faulhaber(h: int, s: int) -> int:
    """Sum of u**s for u = 1..h, exact integers, s <= 6."""
    if s == 0:
        return h
    if s == 1:
        return h * (h + 1) // 2
    if s == 2:
        return h * (h + 1) * (2 * h + 1) // 6
    if s == 3:
        return (h * (h + 1) // 2) ** 2
    if s == 4:
        return h * (h + 1) * (2 * h + 1) * (3 * h * h + 3 * h - 1) // 30
    if s == 5:
        return h * h * (h + 1) * (h + 1) * (2 * h * h + 2 * h - 1) // 12
    if s == 6:
        return h * (h + 1) * (2 * h + 1) * (3 * h**4 + 6 * h**3 - 3 * h + 1) // 42
    raise ValueError("power sums implemented for s <= 6 only")


def _range_power_sum(h: int, s: int) -> float:
    """Sum of u**s over integer u in [-h, h], normalized by h**s."""
    if s % 2 == 1:
        return 0.0
    if s == 0:
        return float(2 * h + 1)
    # Fraction -> float is correctly rounded for arbitrarily large integers,
    # whereas float(big_int) alone overflows near 2**1024.
    return float(Fraction(2 * _faulhaber(h, s), h**s))


def certify_zero_fit(nonzero_offsets: np.ndarray, signs: np.ndarray, half: int, degree: int) -> bool:
    """Certify that P = 0 is an exact LAD optimum on a symmetric index range.

    The data lives on integer offsets u in [-half, half]; values vanish except
    at nonzero_offsets where they have the given signs.  P = 0 is optimal iff
    a dual weight u(t) with |u| <= 1 on the zero sites matches the sign
    moments; we build the least-squares dual in closed form and check its sup
    on the whole normalized interval, which is conservative.
    """
    if degree > 3:
        raise ValueError("certificate implemented for degree <= 3")
    t = nonzero_offsets / float(half)
    b = np.array([np.sum(signs * t**q) for q in range(degree + 1)])
    mat = np.empty((degree + 1, degree + 1))
    for q in range(degree + 1):
        for r in range(q, degree + 1):
            s = q + r
            full = _range_power_sum(half, s)
            mat[q, r] = mat[r, q] = full - float(np.sum(t**s))
    try:
        v = np.linalg.solve(mat, b)
    except np.linalg.LinAlgError:
        return False
    # sup of the dual polynomial on [-1, 1]
    cand = [1.0, -1.0]
    deriv = np.polynomial.polynomial.polyder(v)
    if len(deriv) > 1:
        roots = np.polynomial.polynomial.polyroots(deriv)
        for root in roots:
            if abs(root.imag) < 1e-9 and -1 < root.real < 1:
                cand.append(float(root.real))
    elif len(deriv) == 1 and deriv[0] == 0.0:
        pass
    sup = max(abs(float(np.polynomial.polynomial.polyval(x, v))) for x in cand)
    return sup <= 1.0 - 1e-6


# ---------------------------------------------------------------------------
# Batched oscillation engine for one dyadic level.
#
# Beyond the enumeration regime each row goes through damped IRLS descent,
# a snap onto the interpolation vertex suggested by the smallest residuals,
# and a subgradient optimality certificate in the Lagrange basis of the
# active set.  Certified rows are exact minima (to float precision); the LP
# solves only the rows whose certificate fails.

LP_POINT_CAP = 2**17 + 1


def _irls_batch(data: np.ndarray, degree: int, iters: int = 60):
    """Damped IRLS toward the LAD minimum for rows sharing equispaced nodes.

    Returns (vander, best_resid) where best_resid[b] holds the residual
    vector of the best iterate found for row b (in the row's own scale).
    """
    n_rows, m = data.shape
    t = np.linspace(-1.0, 1.0, m)
    vander = np.vander(t, degree + 1, increasing=True)
    scale = np.max(np.abs(data), axis=1, keepdims=True)
    y = data / scale
    c, *_ = np.linalg.lstsq(vander, y.T, rcond=None)
    c = c.T  # (n_rows, d1)
    resid = y - c @ vander.T
    best_obj = np.mean(np.abs(resid), axis=1)
    best_resid = resid.copy()
    damp = np.full(n_rows, 1e-3)
    for _ in range(iters):
        w2 = 1.0 / np.sqrt(resid**2 + damp[:, None] ** 2)
        g = np.einsum("bm,mi,mj->bij", w2, vander, vander)
        h = np.einsum("bm,bm,mi->bi", w2, y, vander)
        try:
            c = np.linalg.solve(g, h[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            g += 1e-12 * np.eye(degree + 1)
            c = np.linalg.solve(g, h[:, :, None])[:, :, 0]
        resid = y - c @ vander.T
        obj = np.mean(np.abs(resid), axis=1)
        better = obj < best_obj
        best_obj[better] = obj[better]
        best_resid[better] = resid[better]
        damp = np.where(better, damp, damp * 0.3)
        if np.all(damp < 1e-15):
            break
    return vander, best_resid * scale


def _snap_and_certify(vander: np.ndarray, row: np.ndarray, resid: np.ndarray,
                      degree: int) -> tuple[float, np.ndarray] | None:
    """Try interpolation vertices near the given residual configuration.

    Returns (residual, coeffs) of a vertex passing the subgradient optimality
    certificate (a certified vertex is a global LAD minimum), or None if no
    tried vertex certifies.
    """
    d1 = degree + 1
    scale = float(np.max(np.abs(row)))
    order = np.argsort(np.abs(resid))
    pool = sorted(int(i) for i in order[: d1 + 3])
    tried: set[tuple[int, ...]] = set()
    first = tuple(sorted(int(i) for i in order[:d1]))
    for active in [first, *combinations(pool, d1)]:
        if active in tried:
            continue
        tried.add(active)
        a_idx = list(active)
        try:
            lagr = vander @ np.linalg.inv(vander[a_idx])  # lagr[i, q] = L_q(t_i)
            coeff = np.linalg.solve(vander[a_idx], row[a_idx])
        except np.linalg.LinAlgError:
            continue
        r = row - vander @ coeff
        r[a_idx] = 0.0
        sgn = np.sign(r)
        sgn[np.abs(r) <= 1e-12 * scale] = 0.0
        eps = -(sgn @ lagr)
        if np.max(np.abs(eps)) <= 1.0 + 1e-9:
            return float(np.mean(np.abs(r))), coeff
    return None


def fit_row_exact(row: np.ndarray, degree: int) -> float:
    """Exact LAD mean residual for one row on equispaced nodes.

    Uses enumeration when small, otherwise IRLS + vertex certificate, and a
    full LP as last resort (subject to LP_POINT_CAP).
    """
    m = row.size
    if m <= degree + 1 or not np.any(row):
        return 0.0
    t = np.linspace(-1.0, 1.0, m)
    if degree == 0:
        med = float(np.median(row))
        return float(np.mean(np.abs(row - med)))
    if math.comb(m, degree + 1) <= ENUM_COMBO_CAP:
        return lad_fit_enum(t, row, degree).residual
    vander, best_resid = _irls_batch(row[None, :], degree)
    cert = _snap_and_certify(vander, row, best_resid[0], degree)
    if cert is not None:
        return cert[0]
    if m > LP_POINT_CAP:
        raise RuntimeError(
            f"LAD fit on {m} nodes: optimality certificate failed and the "
            "row exceeds the direct LP cap"
        )
    return lad_fit_lp(t, row, degree).residual


def _enum_batch(data: np.ndarray, degree: int) -> np.ndarray:
    """Exact LAD residuals for many intervals sharing equispaced nodes.

    data has shape (n_int, m) with nodes linspace(-1, 1, m).
    """
    n_int, m = data.shape
    t = np.linspace(-1.0, 1.0, m)
    vander = np.vander(t, degree + 1, increasing=True)
    combs = np.array(list(combinations(range(m), degree + 1)))
    inv = np.linalg.inv(vander[combs])  # (ncomb, d+1, d+1)
    out = np.full(n_int, np.inf)
    chunk = max(1, int(3e6 // (combs.shape[0] * m + 1)))
    for lo in range(0, n_int, chunk):
        hi = min(n_int, lo + chunk)
        sub = data[lo:hi][:, combs]  # (b, ncomb, d+1)
        coef = np.einsum("cij,bcj->bci", inv, sub)
        evals = np.einsum("md,bcd->bcm", vander, coef)
        res = np.mean(np.abs(data[lo:hi][:, None, :] - evals), axis=2)
        out[lo:hi] = res.min(axis=1)
    return out


def _median_batch(data: np.ndarray) -> np.ndarray:
    med = np.median(data, axis=1)
    return np.mean(np.abs(data - med[:, None]), axis=1)


def level_oscillations(data: np.ndarray, degree: int) -> np.ndarray:
    """Oscillations (exact LAD mean residuals) for a batch of same-size rows."""
    n_int, m = data.shape
    out = np.zeros(n_int)
    nz = np.any(data != 0.0, axis=1)
    if not np.any(nz):
        return out
    rows = data[nz]
    if m <= degree + 1:
        return out
    if degree == 0:
        out[nz] = _median_batch(rows)
        return out
    if math.comb(m, degree + 1) <= ENUM_COMBO_CAP:
        out[nz] = _enum_batch(rows, degree)
        return out
    t = np.linspace(-1.0, 1.0, m)
    vander, best_resid = _irls_batch(rows, degree)
    vals = np.empty(rows.shape[0])
    for i in range(rows.shape[0]):
        cert = _snap_and_certify(vander, rows[i], best_resid[i], degree)
        if cert is None:
            if m > LP_POINT_CAP:
                raise RuntimeError(
                    f"LAD fit on {m} nodes: certificate failed beyond LP cap"
                )
            vals[i] = lad_fit_lp(t, rows[i], degree).residual
        else:
            vals[i] = cert[0]
    out[nz] = vals
    return out

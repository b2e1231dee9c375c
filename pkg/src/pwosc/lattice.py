"""Arithmetic lattices on the real line and functions sampled on them.

The lattice with bandwidth parameter ``a`` is the point set x_k = (2*pi/a)*k,
k integer, carrying the counting measure weighted by the spacing 2*pi/a.
A shifted copy (shift given in units of the spacing) supports the interleaved
row lattices used by the rectangular commutator matrices.

Dyadic intervals are the closed intervals

    I(j, k) = [spacing * k * 2**j, spacing * (k+1) * 2**j],   j >= 0, k integer.

They contain 2**j + 1 lattice points; adjacent intervals of one level share an
endpoint, and the shared point is deliberately counted by both (the interval
family is defined with closed intervals and all downstream sums follow that
convention).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "Lattice",
    "DyadicInterval",
    "TailModel",
    "ZERO_TAIL",
    "LatticeFunction",
    "BesovParams",
    "poly_degree_for",
    "save_lattice_function",
    "load_lattice_function",
]


@dataclass(frozen=True)
class Lattice:
    """Lattice {spacing*(k + shift)} with spacing 2*pi/a."""

    a: float
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"bandwidth parameter must be positive, got {self.a}")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.a

    @property
    def weight(self) -> float:
        """Mass carried by each lattice point."""
        return self.spacing

    def point(self, k):
        """Coordinate of lattice index k (scalar or array)."""
        return (np.asarray(k, dtype=float) + self.shift) * self.spacing

    def points(self, k_min: int, k_max: int) -> np.ndarray:
        return self.point(np.arange(k_min, k_max + 1))


@dataclass(frozen=True)
class DyadicInterval:
    """Closed dyadic interval of the level/position family over a lattice."""

    lattice: Lattice
    level: int
    position: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")

    @property
    def index_lo(self) -> int:
        return self.position * (1 << self.level)

    @property
    def index_hi(self) -> int:
        return (self.position + 1) * (1 << self.level)

    @property
    def n_points(self) -> int:
        return (1 << self.level) + 1

    @property
    def endpoints(self) -> tuple[float, float]:
        s = self.lattice.spacing
        return (s * self.index_lo, s * self.index_hi)


@dataclass(frozen=True)
class TailModel:
    """Declared behaviour of a lattice function outside its stored window.

    kind "zero": exact zeros beyond the window.
    kind "decay": |f(k)| <= C * |k|**(-alpha) for indices beyond the window;
    values out there are bounded but not individually known.
    """

    kind: str = "zero"
    C: float = 0.0
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "decay"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "decay":
            if not (self.C >= 0 and math.isfinite(self.C)):
                raise ValueError("decay constant must be finite and nonnegative")
            if not (self.alpha > 0):
                raise ValueError("decay exponent must be positive")


ZERO_TAIL = TailModel()


@dataclass
class LatticeFunction:
    """Complex-valued function on a lattice, stored on a finite index window."""

    lattice: Lattice
    k_min: int
    values: np.ndarray
    tail: TailModel = field(default_factory=lambda: ZERO_TAIL)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 1:
            raise ValueError("values must be a one-dimensional array")
        if self.values.size == 0:
            raise ValueError("window must contain at least one point")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    @property
    def k_max(self) -> int:
        return self.k_min + self.values.size - 1

    @property
    def window_span(self) -> int:
        return self.values.size

    def value_at(self, k: int) -> complex:
        """Value at lattice index k; exact zeros beyond a zero tail."""
        if self.k_min <= k <= self.k_max:
            return complex(self.values[k - self.k_min])
        if self.tail.kind == "zero":
            return 0.0
        raise ValueError(
            f"index {k} lies outside the window and the tail is only a bound"
        )

    def window_values(self, k_lo: int, k_hi: int) -> np.ndarray:
        """Values on [k_lo, k_hi]; zero-fills outside the window for zero tails."""
        if k_lo < self.k_min or k_hi > self.k_max:
            if self.tail.kind != "zero":
                raise ValueError(
                    "requested range leaves the window of a decay-tail function"
                )
        out = np.zeros(k_hi - k_lo + 1, dtype=complex)
        lo = max(k_lo, self.k_min)
        hi = min(k_hi, self.k_max)
        if lo <= hi:
            out[lo - k_lo : hi - k_lo + 1] = self.values[
                lo - self.k_min : hi - self.k_min + 1
            ]
        return out

    def abs_sum(self) -> float:
        return float(np.sum(np.abs(self.values)))

    @property
    def is_real(self) -> bool:
        return float(np.max(np.abs(self.values.imag), initial=0.0)) == 0.0

    def real_part(self) -> "LatticeFunction":
        return LatticeFunction(
            self.lattice, self.k_min, self.values.real.astype(complex), self.tail
        )

    def imag_part(self) -> "LatticeFunction":
        return LatticeFunction(
            self.lattice, self.k_min, self.values.imag.astype(complex), self.tail
        )


def poly_degree_for(p: float) -> int:
    """Fitting degree [1/p]: largest integer n with n*p <= 1.

    Evaluated through the product test so that representable reciprocals
    (p = 0.5, 0.25, ...) land on the exact integer.
    """
    if not (p > 0 and math.isfinite(p)):
        raise ValueError(f"p must be positive, got {p}")
    n = max(0, int(math.floor(1.0 / p)) - 1)
    while (n + 1) * p <= 1.0:
        n += 1
    return n


@dataclass(frozen=True)
class BesovParams:
    """Parameters of the discrete oscillation Besov quasinorm."""

    p: float
    tolerance: float = 1e-6
    level_cap: int = 64
    max_direct_points: int = 8193

    def __post_init__(self) -> None:
        if not (0.26 <= self.p < math.inf):
            raise ValueError(f"p out of the supported range [0.26, inf): {self.p}")
        if not (0 < self.tolerance < 1):
            raise ValueError("tolerance must lie in (0, 1)")
        if not (4 <= self.level_cap <= 200):
            raise ValueError("level cap must lie in [4, 200]")

    @property
    def degree(self) -> int:
        return poly_degree_for(self.p)


def save_lattice_function(f: LatticeFunction, csv_path: str, sidecar_path: str | None = None) -> str:
    """Write (index, re, im) rows plus a JSON sidecar with lattice metadata.

    Returns the sidecar path (default: csv_path with a .json suffix).
    """
    if sidecar_path is None:
        sidecar_path = f"{csv_path}.json"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for k, v in zip(range(f.k_min, f.k_max + 1), f.values):
            writer.writerow([k, repr(float(v.real)), repr(float(v.imag))])
    meta = {
        "a": f.lattice.a,
        "shift": f.lattice.shift,
        "k_min": f.k_min,
        "k_max": f.k_max,
        "tail": {"kind": f.tail.kind, "C": f.tail.C, "alpha": f.tail.alpha},
    }
    with open(sidecar_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar_path


def load_lattice_function(csv_path: str, sidecar_path: str | None = None) -> LatticeFunction:
    if sidecar_path is None:
        sidecar_path = f"{csv_path}.json"
    with open(sidecar_path) as fh:
        meta = json.load(fh)
    indices: list[int] = []
    vals: list[complex] = []
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            indices.append(int(row["index"]))
            vals.append(complex(float(row["re"]), float(row["im"])))
    if indices != list(range(meta["k_min"], meta["k_max"] + 1)):
        raise ValueError("CSV index column does not match the sidecar window")
    tail = TailModel(**meta["tail"])
    return LatticeFunction(
        Lattice(meta["a"], meta["shift"]), meta["k_min"], np.array(vals), tail
    )


def dyadic_positions(level: int, k_min: int, k_max: int) -> tuple[int, int]:
    """Position range [lo, hi] of level intervals meeting the index window."""
    h = 1 << level
    lo = -((-(k_min - h)) // h)  # ceil((k_min - h)/h)
    hi = k_max // h  # floor(k_max / h)
    return lo, hi


def iter_intervals(lattice: Lattice, level: int, k_min: int, k_max: int) -> Iterable[DyadicInterval]:
    lo, hi = dyadic_positions(level, k_min, k_max)
    for pos in range(lo, hi + 1):
        yield DyadicInterval(lattice, level, pos)

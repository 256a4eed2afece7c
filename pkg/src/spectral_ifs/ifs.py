"""Forward machinery of the B-side and L-side iterated function systems.

The B-side maps are ``x -> R^{-1}(x + b)``, the L-side maps are
``x -> (R^T)^{-1}(x + l)``, and ``sigma_l(x) = R^T x + l`` undoes tau_l up to
the sign flip ``x -> -x``: ``tau_l(-sigma_l(x)) = -x``.
Exact evaluation goes through ``Fraction``; the exponential sums chi_B,
its iterates and the Fourier transform of mu_B are vectorised over numpy
arrays of points with shape ``(..., d)``.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np

from . import _exact
from .errors import CapExceededError
from .triple import HadamardTriple, RationalVector, is_extreme_point

DEFAULT_MU_DEPTH = 50
DEFAULT_POINT_CAP = 10**6
EARLY_STOP = 1e-14


@dataclass(frozen=True)
class MapFamily:
    side: Literal["B", "L"]
    inverse: tuple[tuple[Fraction, ...], ...]
    digits: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, triple: HadamardTriple, side: str) -> "MapFamily":
        if side == "B":
            fam = cls("B", triple.R_inv, triple.B.vectors)
            original = triple.R
        elif side == "L":
            fam = cls("L", triple.RT_inv, triple.L.vectors)
            original = triple.RT
        else:
            raise ValueError(f"side must be 'B' or 'L', not {side!r}")
        assert _exact.mat_mul(fam.inverse, original) == _exact.identity(triple.d)
        return fam

    @property
    def d(self) -> int:
        return len(self.inverse)

    def apply(self, i: int, x) -> RationalVector:
        """tau_{digit i}(x), exactly."""
        shifted = [Fraction(a) + b for a, b in zip(x, self.digits[i])]
        return _exact.mat_vec(self.inverse, shifted)

    def compose(self, word: Iterable[int], x=None) -> RationalVector:
        """tau_{w_n} o ... o tau_{w_1}(x), the first letter applied first."""
        y = tuple(Fraction(0) for _ in range(self.d)) if x is None else tuple(map(Fraction, x))
        for i in word:
            y = self.apply(i, y)
        return y


def sigma(triple: HadamardTriple, l, x) -> RationalVector:
    """sigma_l(x) = R^T x + l, which grows the candidate spectra."""
    return tuple(Fraction(a) + b for a, b in zip(_exact.mat_vec(triple.RT, x), l))


def attractor_points(family: MapFamily, depth: int, cap: int = DEFAULT_POINT_CAP) -> list[RationalVector]:
    """All finite sums sum_{k=1}^{depth} M^{-k} digit_k, exactly, sorted.

    ``M^{-k} digit`` is R^{-k} b on the B-side and (R^T)^{-k} l on the L-side.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    N = len(family.digits)
    if N**depth > cap:
        raise CapExceededError(f"{N}^{depth} points exceeds cap {cap}")
    d = family.d
    points = {tuple(Fraction(0) for _ in range(d))}
    scaled = [tuple(map(Fraction, v)) for v in family.digits]
    for _ in range(depth):
        scaled = [_exact.mat_vec(family.inverse, v) for v in scaled]
        points = {tuple(a + b for a, b in zip(p, v)) for p in points for v in scaled}
    return sorted(points)


def chaos_game(family: MapFamily, n_points: int, seed: int = 0, burn_in: int = 64) -> np.ndarray:
    """Random-iteration sample of the attractor (float)."""
    rng = np.random.default_rng(seed)
    M = np.array(family.inverse, dtype=float)
    digits = np.array(family.digits, dtype=float)
    choices = rng.integers(len(digits), size=n_points + burn_in)
    x = np.zeros(family.d)
    out = np.empty((n_points, family.d))
    for k, i in enumerate(choices):
        x = M @ (x + digits[i])
        if k >= burn_in:
            out[k - burn_in] = x
    return out


def write_points_csv(path, points) -> None:
    pts = [[float(x) for x in p] for p in points]
    d = len(pts[0]) if pts else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(d)])
        for p in pts:
            w.writerow([f"{x:.17g}" for x in p])


def _is_exact(x) -> bool:
    return isinstance(x, tuple) and all(isinstance(c, (int, Fraction)) for c in x)


def chi_B(triple: HadamardTriple, x) -> complex | np.ndarray:
    """(1/N) sum_b exp(2 pi i b . x).

    For a tuple of ints/Fractions each exponent is reduced mod 1 exactly
    before evaluation; arrays of shape ``(..., d)`` are evaluated in float.
    """
    if _is_exact(x):
        total = 0j
        for b in triple.B:
            q = Fraction(_exact.dot(b, x))
            q -= q.numerator // q.denominator
            total += np.exp(2j * np.pi * float(q))
        return complex(total / triple.N)
    x = np.asarray(x, dtype=float)
    return np.exp(2j * np.pi * (x @ triple.B_f.T)).mean(axis=-1)


def chi_B_pow(triple: HadamardTriple, x, n: int):
    """chi_B(x) chi_B(R^T x) ... chi_B((R^T)^{n-1} x)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if _is_exact(x):
        out = 1 + 0j
        y = tuple(map(Fraction, x))
        for _ in range(n):
            out *= chi_B(triple, y)
            y = _exact.mat_vec(triple.RT, y)
        return out
    y = np.asarray(x, dtype=float)
    out = np.ones(y.shape[:-1], dtype=complex)
    for _ in range(n):
        out = out * chi_B(triple, y)
        y = y @ triple.RT_f.T
    return out


def mu_hat(triple: HadamardTriple, x, depth: int = DEFAULT_MU_DEPTH):
    """Fourier transform of mu_B as the truncated product of chi_B((R^T)^{-n} x).

    Stops early once every argument is below ``EARLY_STOP`` in max-norm, where
    the remaining factors equal 1 to round-off. Accepts a single point or an
    array of shape ``(..., d)``; returns a complex scalar or array to match.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    scalar = x.ndim == 1
    y = x.reshape(-1, triple.d)
    out = np.ones(y.shape[0], dtype=complex)
    AT = triple.RT_inv_f.T
    for _ in range(depth):
        y = y @ AT
        out *= np.exp(2j * np.pi * (y @ triple.B_f.T)).mean(axis=-1)
        if np.max(np.abs(y), initial=0.0) < EARLY_STOP:
            break
    out = out.reshape(x.shape[:-1])
    return complex(out) if scalar else out


def mu_hat_tail_bound(triple: HadamardTriple, x, depth: int = DEFAULT_MU_DEPTH) -> float:
    """First-order bound 2 pi max|b| ||(R^T)^{-depth} x|| on the neglected factors."""
    y = np.asarray(x, dtype=float)
    A = np.linalg.matrix_power(triple.RT_inv_f, depth)
    bmax = float(np.max(np.linalg.norm(triple.B_f, axis=1)))
    return float(2 * np.pi * bmax * np.max(np.linalg.norm(y @ A.T, axis=-1), initial=0.0))


def qmf_sum(triple: HadamardTriple, x) -> float | np.ndarray:
    """sum_l |chi_B((R^T)^{-1}(x + l))|^2."""
    x = np.asarray(x, dtype=float)
    children = (x[..., None, :] + triple.L_f) @ triple.RT_inv_f.T
    return (np.abs(chi_B(triple, children)) ** 2).sum(axis=-1)


def qmf_defect(triple: HadamardTriple, x) -> float | np.ndarray:
    out = np.abs(qmf_sum(triple, x) - 1.0)
    return float(out) if np.ndim(out) == 0 else out


def mu_hat_csv_rows(triple: HadamardTriple, points, depth: int = DEFAULT_MU_DEPTH):
    """Rows ``t1..td, re, im, abs2`` for a batch report."""
    pts = np.asarray(points, dtype=float).reshape(-1, triple.d)
    vals = mu_hat(triple, pts, depth)
    for t, v in zip(pts, vals):
        yield [*(float(c) for c in t), v.real, v.imag, abs(v) ** 2]


def word_points(family: MapFamily, depth: int) -> list[RationalVector]:
    """Depth-n attractor points built by composing maps on 0, for cross-checks."""
    pts = {family.compose(w) for w in itertools.product(range(len(family.digits)), repeat=depth)}
    return sorted(pts)


__all__ = [
    "MapFamily",
    "attractor_points",
    "chaos_game",
    "chi_B",
    "chi_B_pow",
    "is_extreme_point",
    "mu_hat",
    "mu_hat_tail_bound",
    "qmf_defect",
    "qmf_sum",
    "sigma",
    "word_points",
    "write_points_csv",
]

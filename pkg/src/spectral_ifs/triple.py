"""The system (R, B, L): construction, validation and the standing hypotheses.

Vectors are tuples (of ``int`` for digits, of ``Fraction`` for points);
matrices are tuples of row tuples. Everything here is exact except the
complex exponentials in :func:`check_hadamard` and the root finding in
:func:`is_expansive`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _exact
from .errors import IndeterminateError, InvalidTripleError, NotRegularError

IntMatrix = tuple[tuple[int, ...], ...]
IntVector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]

EXPANSIVE_MARGIN = 1e-9


def rvec(*coords) -> RationalVector:
    """Build a rational vector from ints, Fractions or strings like ``"1/2"``."""
    return tuple(Fraction(c) for c in coords)


def _as_int_matrix(R) -> IntMatrix:
    rows = tuple(tuple(int(x) for x in row) for row in R)
    if not rows or any(len(row) != len(rows) for row in rows):
        raise InvalidTripleError("R must be a non-empty square matrix")
    for row, orig in zip(rows, R):
        if any(int(x) != x for x in orig):
            raise InvalidTripleError("R must have integer entries")
    return rows


@dataclass(frozen=True)
class DigitSet:
    label: str
    vectors: tuple[IntVector, ...]

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise InvalidTripleError(f"{self.label} is empty")
        d = len(vecs[0])
        if any(len(v) != d for v in vecs):
            raise InvalidTripleError(f"{self.label} has vectors of mixed dimension")
        if (0,) * d not in vecs:
            raise InvalidTripleError(f"{self.label} must contain the zero vector")
        if len(set(vecs)) != len(vecs):
            raise InvalidTripleError(f"{self.label} has repeated digits")

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def index(self, v) -> int:
        return self.vectors.index(tuple(v))


@dataclass(frozen=True)
class HadamardTriple:
    """An affine system (R, B, L) in dimension ``d`` with ``N`` digits each.

    Validation is eager: shapes, 0 in B and L, #B == #L, det R != 0.
    Expansiveness and the Hadamard property are *checked* by the functions
    below rather than enforced, so that non-Hadamard systems can still be
    studied.
    """

    R: IntMatrix
    B: DigitSet
    L: DigitSet

    def __post_init__(self):
        R = _as_int_matrix(self.R)
        object.__setattr__(self, "R", R)
        B = self.B if isinstance(self.B, DigitSet) else DigitSet("B", self.B)
        L = self.L if isinstance(self.L, DigitSet) else DigitSet("L", self.L)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "L", L)
        d = len(R)
        if len(B[0]) != d or len(L[0]) != d:
            raise InvalidTripleError("digit dimension does not match R")
        if len(B) != len(L):
            raise InvalidTripleError(f"#B = {len(B)} but #L = {len(L)}")
        if _exact.charpoly(R)[-1] == 0:
            raise InvalidTripleError("R is singular")

    @property
    def d(self) -> int:
        return len(self.R)

    @property
    def N(self) -> int:
        return len(self.B)

    @cached_property
    def RT(self) -> IntMatrix:
        return tuple(tuple(col) for col in zip(*self.R))

    @cached_property
    def R_inv(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(map(tuple, _exact.inverse(self.R)))

    @cached_property
    def RT_inv(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(map(tuple, _exact.inverse(self.RT)))

    # float mirrors for vectorised numerics
    @cached_property
    def RT_inv_f(self) -> np.ndarray:
        return np.array(self.RT_inv, dtype=float)

    @cached_property
    def RT_f(self) -> np.ndarray:
        return np.array(self.RT, dtype=float)

    @cached_property
    def B_f(self) -> np.ndarray:
        return np.array(self.B.vectors, dtype=float)

    @cached_property
    def L_f(self) -> np.ndarray:
        return np.array(self.L.vectors, dtype=float)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "R": [list(row) for row in self.R],
            "B": [list(v) for v in self.B],
            "L": [list(v) for v in self.L],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HadamardTriple":
        try:
            d, R, B, L = obj["d"], obj["R"], obj["B"], obj["L"]
        except (KeyError, TypeError) as exc:
            raise InvalidTripleError(f"missing key in triple JSON: {exc}") from None
        if not isinstance(d, int) or len(R) != d:
            raise InvalidTripleError("'d' does not match R")
        if any(any(x != 0 for x in v) for v in (B[0], L[0])):
            raise InvalidTripleError("B[0] and L[0] must be the zero vector")
        return cls(R, DigitSet("B", B), DigitSet("L", L))


def make_triple(R, B, L) -> HadamardTriple:
    return HadamardTriple(R, DigitSet("B", B), DigitSet("L", L))


def load_triple(path) -> HadamardTriple:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidTripleError(f"{path}: {exc}") from None
    return HadamardTriple.from_json(obj)


def is_expansive(R: Sequence[Sequence[int]]) -> bool:
    """True iff every eigenvalue of R has modulus > 1.

    Roots of the exact characteristic polynomial are found numerically, after
    an exact test for the eigenvalues +1 and -1; any other root within
    ``EXPANSIVE_MARGIN`` of the unit circle raises
    :class:`IndeterminateError` instead of guessing.
    """
    R = _as_int_matrix(R)
    cp = _exact.charpoly(R)
    # an eigenvalue +-1 is decided exactly
    for z in (1, -1):
        if sum(c * z ** k for k, c in enumerate(reversed(cp))) == 0:
            return False
    coeffs = [float(c) for c in cp]
    roots = np.roots(coeffs)
    mods = np.abs(roots)
    if np.any(np.abs(mods - 1.0) <= EXPANSIVE_MARGIN):
        raise IndeterminateError(f"eigenvalue moduli {sorted(mods)} straddle the unit circle")
    return bool(np.all(mods > 1.0))


def _phase(q: Fraction) -> complex:
    """exp(2 pi i q) for exact rational q, reduced mod 1 before rounding."""
    q = q - (q.numerator // q.denominator)
    return complex(np.exp(2j * np.pi * float(q)))


def hadamard_matrix(triple: HadamardTriple) -> np.ndarray:
    """(1/sqrt N)(exp(2 pi i R^{-1}b . l)), rows indexed by B, columns by L."""
    H = np.empty((triple.N, triple.N), dtype=complex)
    for i, b in enumerate(triple.B):
        Rb = _exact.mat_vec(triple.R_inv, b)
        for j, l in enumerate(triple.L):
            H[i, j] = _phase(_exact.dot(Rb, l))
    return H / np.sqrt(triple.N)


def check_hadamard(triple: HadamardTriple, tol: float = 1e-12) -> dict:
    H = hadamard_matrix(triple)
    defect = float(np.max(np.abs(H.conj().T @ H - np.eye(triple.N))))
    return {"is_hadamard": defect < tol, "defect": defect}


def orbit_generators(triple: HadamardTriple, K: int) -> list[IntVector]:
    """All R^k b for b in B, 0 <= k <= K."""
    out = []
    for b in triple.B:
        v = tuple(b)
        for _ in range(K + 1):
            out.append(v)
            v = tuple(_exact.mat_vec(triple.R, v))
    return out


def regularity_rank(triple: HadamardTriple) -> int:
    """Rank of span{R^k b}; the pair is regular iff this equals d."""
    ranks = []
    K = 0
    while True:
        ranks.append(_exact.rank(orbit_generators(triple, K)))
        if len(ranks) >= 2 and ranks[-1] == ranks[-2]:
            break
        K += 1
    assert ranks == sorted(ranks) and K <= triple.d
    return ranks[-1]


@dataclass(frozen=True)
class LatticeBasis:
    """A full-rank lattice in Q^d, stored in canonical (Hermite) form.

    ``vectors`` are the basis vectors; two LatticeBasis objects compare equal
    iff they describe the same lattice.
    """

    vectors: tuple[RationalVector, ...]

    def __post_init__(self):
        vecs = [tuple(Fraction(x) for x in v) for v in self.vectors]
        D = _exact.lcm_denominator(x for v in vecs for x in v)
        H = _exact.hnf([[int(x * D) for x in v] for v in vecs])
        d = len(vecs[0])
        if len(H) != d:
            raise ValueError("basis is not full rank")
        object.__setattr__(self, "vectors", tuple(tuple(Fraction(x, D) for x in row) for row in H))

    @property
    def d(self) -> int:
        return len(self.vectors)

    def matrix(self) -> list[list[Fraction]]:
        """d x d matrix whose columns are the basis vectors."""
        return _exact.transpose(self.vectors)

    @cached_property
    def _inverse(self) -> list[list[Fraction]]:
        return _exact.inverse(self.matrix())

    def coordinates(self, x) -> tuple[Fraction, ...]:
        return tuple(_exact.mat_vec(self._inverse, x))

    def __contains__(self, x) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coordinates(x))

    def contains_lattice(self, other: "LatticeBasis") -> bool:
        return all(v in self for v in other.vectors)

    @classmethod
    def integer_lattice(cls, d: int) -> "LatticeBasis":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def scaled(cls, d: int, s) -> "LatticeBasis":
        s = Fraction(s)
        return cls(tuple(tuple(s if i == j else 0 for j in range(d)) for i in range(d)))


def orbit_lattice(triple: HadamardTriple) -> list[IntVector]:
    """HNF basis of the Z-span of {R^k b}, grown until R-invariant."""
    K = 0
    H = _exact.hnf(orbit_generators(triple, 0))
    while True:
        K += 1
        H2 = _exact.hnf(orbit_generators(triple, K))
        if H2 == H:
            return H
        H = H2


@lru_cache(maxsize=64)
def dual_lattice(triple: HadamardTriple) -> LatticeBasis:
    """Basis of {x : beta . x in Z for every beta in the R-orbit span of B}."""
    if regularity_rank(triple) < triple.d:
        raise NotRegularError("B does not generate a full-rank R-orbit")
    M = _exact.transpose(orbit_lattice(triple))  # basis vectors as columns
    dual_cols = _exact.inverse(_exact.transpose(M))  # (M^T)^{-1}
    lat = LatticeBasis(tuple(tuple(v) for v in _exact.transpose(dual_cols)))
    # Z^d inside, R^T-invariant
    assert lat.contains_lattice(LatticeBasis.integer_lattice(triple.d))
    assert all(_exact.mat_vec(triple.RT, v) in lat for v in lat.vectors)
    return lat


def is_extreme_point(triple: HadamardTriple, x) -> bool:
    """Exact test of |chi_B(x)| = 1, i.e. b . x in Z for every b in B."""
    return all(Fraction(_exact.dot(b, x)).denominator == 1 for b in triple.B)

"""Small exact linear algebra over Fraction and int.

Matrices are lists of rows. Everything here is O(d^3) on tiny matrices, so
plain Python beats pulling in a CAS.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(M: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in M]


def identity(d: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def transpose(M: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*M)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _rref(M: Matrix) -> tuple[Matrix, list[int]]:
    A = [row[:] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        # sparse update: only the pivot row's nonzero columns change
        nz = [j for j, y in enumerate(A[r]) if y != 0]
        if A[r][c] != 1:
            inv = 1 / A[r][c]
            for j in nz:
                A[r][j] = A[r][j] * inv
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                row = A[i]
                for j in nz:
                    row[j] = row[j] - f * A[r][j]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(_rref(to_fractions(M))[1])


def inverse(M: Sequence[Sequence]) -> Matrix:
    d = len(M)
    if any(len(row) != d for row in M):
        raise ValueError("matrix is not square")
    aug = [list(row) + e for row, e in zip(to_fractions(M), identity(d))]
    R, pivots = _rref(aug)
    if pivots[:d] != list(range(d)):
        raise ZeroDivisionError("matrix is singular")
    return [row[d:] for row in R]


def solve(M: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...]:
    return mat_vec(inverse(M), [Fraction(x) for x in b])


def nullspace(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of {x : M x = 0}, one vector per free column."""
    A = to_fractions(M)
    n = len(A[0])
    R, pivots = _rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def charpoly(M: Sequence[Sequence]) -> list[Fraction]:
    """Monic characteristic polynomial, highest degree first (Faddeev-LeVerrier)."""
    d = len(M)
    A = to_fractions(M)
    coeffs = [Fraction(1)]
    Mk = identity(d)
    ck = Fraction(1)
    for k in range(1, d + 1):
        AM = mat_mul(A, Mk)
        ck = -sum(AM[i][i] for i in range(d)) / k
        coeffs.append(ck)
        Mk = [[AM[i][j] + (ck if i == j else 0) for j in range(d)] for i in range(d)]
    return coeffs


def hnf(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form of the Z-span of integer vectors.

    Returns the nonzero rows: echelon form, positive pivots, entries above each
    pivot reduced into [0, pivot).
    """
    A = [list(map(int, v)) for v in vectors if any(v)]
    if not A:
        return []
    n = len(A[0])
    r = 0
    for c in range(n):
        # Euclid on column c among rows r.. until one nonzero entry is left
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[i0] = A[i0], A[r]
            done = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < len(A) and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            r += 1
            if r == len(A):
                break
    return [tuple(row) for row in A[:r]]


def lcm_denominator(values) -> int:
    m = 1
    for x in values:
        den = Fraction(x).denominator
        m = m * den // gcd(m, den)
    return m

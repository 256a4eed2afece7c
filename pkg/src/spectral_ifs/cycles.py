"""Exact enumeration of B-extreme L-cycles.

Every extreme cycle point lies in the dual lattice of the R-orbit of B and
inside the attractor of the L-side maps, so the search enumerates lattice
points in a ball that the maps ``tau_l`` send into itself, then follows the
(at most one) extreme successor of each point. A brute-force word
enumeration is kept alongside as an independent oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from .errors import CapExceededError, NotExpansiveError, SpectralIFSError
from .ifs import MapFamily
from .triple import (
    HadamardTriple,
    LatticeBasis,
    RationalVector,
    dual_lattice,
    is_expansive,
    is_extreme_point,
)

DEFAULT_CANDIDATE_CAP = 10**6
RADIUS_SLACK = 1e-6


@dataclass(frozen=True)
class ContractionNorm:
    """A norm ``sqrt(x^T Q x)`` in which every tau_l is a ``c``-contraction."""

    c: float
    Q: np.ndarray

    def norm(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", x, self.Q, x))

    @property
    def is_euclidean(self) -> bool:
        return bool(np.array_equal(self.Q, np.eye(len(self.Q))))


def _induced_norm(A: np.ndarray, Q: np.ndarray) -> float:
    C = np.linalg.cholesky(Q).T  # Q = C^T C
    return float(np.linalg.norm(C @ A @ np.linalg.inv(C), 2))


def contraction_constant(triple: HadamardTriple, max_terms: int = 200) -> ContractionNorm:
    if not is_expansive(triple.R):
        raise NotExpansiveError("R is not expansive")
    A = triple.RT_inv_f
    d = triple.d
    c = float(np.linalg.norm(A, 2))
    if c < 1:
        return ContractionNorm(c, np.eye(d))
    Q = np.eye(d)
    Ak = np.eye(d)
    for _ in range(max_terms):
        Ak = A @ Ak
        Q = Q + Ak.T @ Ak
        c = _induced_norm(A, Q)
        if c < 1:
            return ContractionNorm(c, Q)
    raise NotExpansiveError("could not build an adapted norm")  # pragma: no cover


@dataclass(frozen=True)
class SearchRegion:
    radius: Fraction
    contraction: ContractionNorm

    @property
    def c(self) -> float:
        return self.contraction.c

    def contains(self, x, slack: float = 1e-9) -> bool | np.ndarray:
        r = float(self.radius)
        return self.contraction.norm(x) <= r * (1 + slack) + slack

    def is_invariant(self, triple: HadamardTriple) -> bool:
        """tau_l(Ball(0, r)) inside Ball(0, r) for every l, via the norm bound."""
        r = float(self.radius)
        lnorm = self.contraction.norm(triple.L_f)
        return bool(np.all(self.c * (r + lnorm) <= r * (1 + 1e-12)))


def search_region(triple: HadamardTriple) -> SearchRegion:
    cn = contraction_constant(triple)
    lmax = float(np.max(cn.norm(triple.L_f)))
    r = cn.c * lmax / (1 - cn.c) * (1 + RADIUS_SLACK)
    radius = Fraction(math.ceil(r * 10**6), 10**6)
    return SearchRegion(radius, cn)


def lattice_points_in_region(lattice: LatticeBasis, region: SearchRegion,
                             cap: int = DEFAULT_CANDIDATE_CAP) -> list[RationalVector]:
    D = lattice.matrix()
    Df = np.array(D, dtype=float)
    Dinv = np.linalg.inv(Df)
    S = Dinv @ np.linalg.inv(region.contraction.Q) @ Dinv.T
    r = float(region.radius)
    bounds = [int(math.floor(r * math.sqrt(S[i, i]) + 1e-9)) for i in range(len(D))]
    count = math.prod(2 * b + 1 for b in bounds)
    if count > cap:
        raise CapExceededError(f"{count} lattice points to scan exceeds cap {cap}")
    pts = []
    for z in itertools.product(*(range(-b, b + 1) for b in bounds)):
        x = _exact.mat_vec(D, z)
        if region.contains(np.array(x, dtype=float)):
            pts.append(x)
    return sorted(pts)


def candidate_points(triple: HadamardTriple, region: SearchRegion | None = None,
                     cap: int = DEFAULT_CANDIDATE_CAP) -> list[RationalVector]:
    """Dual-lattice points in the region that pass the exact extremeness test."""
    region = region or search_region(triple)
    lat = dual_lattice(triple)
    return [x for x in lattice_points_in_region(lat, region, cap) if is_extreme_point(triple, x)]


def canonical_rotation(word: tuple[int, ...]) -> int:
    """Offset k such that word[k:] + word[:k] is lexicographically smallest."""
    p = len(word)
    return min(range(p), key=lambda k: word[k:] + word[:k])


@dataclass(frozen=True)
class ExtremeCycle:
    """Points x_0..x_{p-1} with tau_{l_i}(x_i) = x_{i+1 mod p}.

    ``word`` holds indices into L, rotated to its lexicographically smallest
    form, with ``points`` rotated to match.
    """

    points: tuple[RationalVector, ...]
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.points)

    @classmethod
    def canonical(cls, points, word) -> "ExtremeCycle":
        points = tuple(tuple(map(Fraction, x)) for x in points)
        word = tuple(word)
        k = canonical_rotation(word)
        return cls(points[k:] + points[:k], word[k:] + word[:k])

    def word_vectors(self, triple: HadamardTriple) -> list[tuple[int, ...]]:
        return [triple.L[i] for i in self.word]

    def to_json(self, triple: HadamardTriple) -> dict:
        return {
            "points": [[[c.numerator, c.denominator] for c in x] for x in self.points],
            "word": [list(v) for v in self.word_vectors(triple)],
            "length": self.length,
        }

    @classmethod
    def from_json(cls, triple: HadamardTriple, obj: dict) -> "ExtremeCycle":
        points = [tuple(Fraction(n, d) for n, d in x) for x in obj["points"]]
        word = [triple.L.index(v) for v in obj["word"]]
        return cls(tuple(points), tuple(word))


def extreme_successors(triple: HadamardTriple, x, family: MapFamily | None = None):
    """All (index, tau_l(x)) with tau_l(x) extreme."""
    family = family or MapFamily.of(triple, "L")
    out = []
    for i in range(triple.N):
        y = family.apply(i, x)
        if is_extreme_point(triple, y):
            out.append((i, y))
    return out


def find_extreme_cycles(triple: HadamardTriple, cap: int = DEFAULT_CANDIDATE_CAP) -> list[ExtremeCycle]:
    """Every B-extreme L-cycle, sorted by (length, word, points).

    The triple must be Hadamard: then the QMF identity leaves each extreme
    point with at most one extreme successor and the transition graph is a
    partial function on the candidates.
    """
    if triple.N == 1:
        # one map, one fixed point; no lattice needed (B = {0} is never regular)
        return cycles_by_word_enumeration(triple, 1)
    cands = candidate_points(triple, cap=cap)
    cand_set = set(cands)
    family = MapFamily.of(triple, "L")
    succ: dict[RationalVector, tuple[int, RationalVector]] = {}
    for x in cands:
        nxt = [(i, y) for i, y in extreme_successors(triple, x, family) if y in cand_set]
        if len(nxt) > 1:
            raise SpectralIFSError(f"point {x} has {len(nxt)} extreme successors; is the triple Hadamard?")
        if nxt:
            succ[x] = nxt[0]

    done: set = set()
    cycles = []
    for start in cands:
        path: list[RationalVector] = []
        pos: dict[RationalVector, int] = {}
        x = start
        while x is not None and x not in done and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = succ[x][1] if x in succ else None
        if x is not None and x in pos:
            loop = path[pos[x]:]
            cycles.append(ExtremeCycle.canonical(loop, [succ[y][0] for y in loop]))
        done.update(path)
    return sorted(cycles, key=lambda C: (C.length, C.word, C.points))


@dataclass(frozen=True)
class CycleCheck:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def verify_cycle(triple: HadamardTriple, cycle: ExtremeCycle) -> CycleCheck:
    pts, word = cycle.points, cycle.word
    p = len(pts)
    if p == 0 or len(word) != p:
        return CycleCheck(False, "length_mismatch")
    if len(set(pts)) != p:
        return CycleCheck(False, "points_not_distinct")
    if any(not 0 <= i < triple.N for i in word):
        return CycleCheck(False, "bad_digit")
    family = MapFamily.of(triple, "L")
    for i in range(p):
        if family.apply(word[i], pts[i]) != tuple(map(Fraction, pts[(i + 1) % p])):
            return CycleCheck(False, "not_a_cycle")
    if not all(is_extreme_point(triple, x) for x in pts):
        return CycleCheck(False, "not_extreme")
    if canonical_rotation(word) != 0:
        return CycleCheck(False, "word_not_canonical")
    return CycleCheck(True)


def lyndon_words(alphabet_size: int, max_length: int):
    """Duval's generator: aperiodic words that are minimal among their rotations."""
    if alphabet_size < 1 or max_length < 1:
        return
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_length:
            w.append(w[len(w) - m])
        while w and w[-1] == alphabet_size - 1:
            w.pop()


def cycles_by_word_enumeration(triple: HadamardTriple, p_max: int) -> list[ExtremeCycle]:
    """Oracle: solve the fixed point of every Lyndon word of length <= p_max.

    Independent of the lattice and of the search region: a word's fixed point
    is kept iff its whole orbit passes the exact extremeness test.

    With A = R^T the fixed point of ``tau_{w_{p-1}} o ... o tau_{w_0}`` solves
    ``(A^p - I) x = sum_k A^k w_k``, and the other orbit points are the fixed
    points of the rotated words, so everything stays in integers:
    ``x = adj(A^p - I) v / det(A^p - I)``.
    """
    d = triple.d
    A = [list(r) for r in triple.RT]
    B = triple.B.vectors
    # A^k l for every digit and k < p_max
    shifted = [[tuple(l) for l in triple.L]]
    for _ in range(1, p_max):
        shifted.append([tuple(_exact.mat_vec(A, v)) for v in shifted[-1]])
    solvers = {}
    out = []
    for w in lyndon_words(triple.N, p_max):
        p = len(w)
        if p not in solvers:
            Ap = [[int(i == j) for j in range(d)] for i in range(d)]
            for _ in range(p):
                Ap = _exact.mat_mul(A, Ap)
            M = [[Ap[i][j] - (i == j) for j in range(d)] for i in range(d)]
            det = _exact.charpoly(M)[-1] * (-1) ** d
            adj = [[int(x * det) for x in row] for row in _exact.inverse(M)]
            solvers[p] = (adj, int(det))
        adj, det = solvers[p]
        orbit = []
        for k in range(p):
            v = [0] * d
            for j in range(p):
                sv = shifted[j][w[(k + j) % p]]
                for i in range(d):
                    v[i] += sv[i]
            y = [sum(a * c for a, c in zip(row, v)) for row in adj]
            if any(sum(b_i * y_i for b_i, y_i in zip(b, y)) % det for b in B):
                break
            orbit.append(tuple(Fraction(c, det) for c in y))
        else:
            if len(set(orbit)) == p:
                out.append(ExtremeCycle(tuple(orbit), w))
    return sorted(out, key=lambda C: (C.length, C.word, C.points))

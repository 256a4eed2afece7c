"""Permutative Cuntz representations on eventually periodic words.

A basis vector of the representation attached to a minimal word ``w`` is an
infinite word ``u w w w ...``; it is stored as a :class:`WordState` with a
finite ``prefix`` and a ``tail`` that repeats forever. Letters are integers
``0..N-1``. ``None`` plays the role of the zero vector in the
one-step actions.

Intertwiners between two such representations correspond to fixed points of
a finite linear map on ``p' x p`` matrices; its fixed space is computed
exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

from . import _exact
from .errors import BasisNotClosedError, NotMinimalError

Word = tuple[int, ...]


def as_word(w) -> Word:
    """Accept ``"0110"``, ``[0, 1, 1, 0]`` or a tuple."""
    return tuple(int(c) for c in w)


def is_minimal(word) -> bool:
    """True iff ``word`` is not u^k for any k >= 2."""
    w = as_word(word)
    p = len(w)
    if p == 0:
        raise ValueError("empty word")
    return not any(p % q == 0 and w == w[:q] * (p // q) for q in range(1, p))


def cyclic_equivalent(w, w2) -> bool:
    a, b = as_word(w), as_word(w2)
    if len(a) != len(b):
        return False
    return any(a[k:] + a[:k] == b for k in range(len(a)))


def minimal_words(alphabet_size: int, max_length: int) -> list[Word]:
    return [w for n in range(1, max_length + 1)
            for w in itertools.product(range(alphabet_size), repeat=n) if is_minimal(w)]


@dataclass(frozen=True)
class WordState:
    """The infinite word ``prefix + tail + tail + ...`` in canonical form.

    Canonical means the prefix does not end with the tail's last letter;
    such a letter is absorbed by rotating the tail, e.g. ``0|(10)`` becomes
    ``|(01)``.
    """

    prefix: Word = ()
    tail: Word = (0,)

    def __post_init__(self):
        prefix, tail = as_word(self.prefix), as_word(self.tail)
        if not tail or not is_minimal(tail):
            raise NotMinimalError(f"tail {tail} is not a minimal word")
        while prefix and prefix[-1] == tail[-1]:
            tail = tail[-1:] + tail[:-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    @property
    def first(self) -> int:
        return self.prefix[0] if self.prefix else self.tail[0]

    def shift(self) -> "WordState":
        if self.prefix:
            return WordState(self.prefix[1:], self.tail)
        return WordState((), self.tail[1:] + self.tail[:1])

    def letters(self, n: int) -> Word:
        """The first ``n`` letters of the infinite word."""
        out = list(self.prefix[:n])
        k = 0
        while len(out) < n:
            out.append(self.tail[k % len(self.tail)])
            k += 1
        return tuple(out)

    def __str__(self):
        return "".join(map(str, self.prefix)) + "(" + "".join(map(str, self.tail)) + ")"


def rho_apply(state: WordState, l: int, direction: str = "forward") -> WordState | None:
    """One generator of the permutative representation, or its adjoint.

    forward prepends ``l``; adjoint strips a leading ``l`` and returns
    ``None`` (the zero vector) when the first letter differs.
    """
    if direction == "forward":
        return WordState((l,) + state.prefix, state.tail)
    if direction == "adjoint":
        return state.shift() if state.first == l else None
    raise ValueError(f"direction must be 'forward' or 'adjoint', not {direction!r}")


def truncated_basis(tail, alphabet_size: int, n_max: int) -> list[WordState]:
    """All states with prefix length <= n_max, deduplicated, in a fixed order."""
    tail = as_word(tail)
    seen = {}
    for n in range(n_max + 1):
        for prefix in itertools.product(range(alphabet_size), repeat=n):
            s = WordState(prefix, tail)
            seen.setdefault(s, None)
    return list(seen)


class CuntzAction(Protocol):
    """Anything with forward/adjoint one-letter maps on hashable states."""

    letters: Sequence[int]

    def forward(self, state, l): ...

    def adjoint(self, state, l): ...


@dataclass(frozen=True)
class PermutativeAction:
    alphabet_size: int

    @property
    def letters(self) -> range:
        return range(self.alphabet_size)

    def forward(self, state: WordState, l: int) -> WordState:
        return rho_apply(state, l, "forward")

    def adjoint(self, state: WordState, l: int) -> WordState | None:
        return rho_apply(state, l, "adjoint")


@dataclass
class CuntzReport:
    iso_defect: float
    completeness_defect: float
    n_states: int
    skipped: list = field(default_factory=list)


def _diff(vec: dict, target: dict) -> float:
    keys = set(vec) | set(target)
    return max((abs(vec.get(k, 0) - target.get(k, 0)) for k in keys), default=0)


def cuntz_defect(action, basis: Iterable, completeness_letters: Sequence[int] | None = None,
                 strict: bool = True) -> CuntzReport:
    """Check S_l^* S_l' = delta 1 and sum_l S_l S_l^* = 1 state by state.

    Vectors are sparse dicts with exact integer coefficients, so both defects
    are exact. ``completeness_letters`` restricts the completeness sum (to
    exhibit a broken relation). States whose adjoint images leave the basis
    raise :class:`BasisNotClosedError`, or with ``strict=False`` are skipped
    in the completeness check and listed in the report.
    """
    basis = list(basis)
    members = set(basis)
    letters = list(action.letters)
    comp_letters = letters if completeness_letters is None else list(completeness_letters)
    iso = 0
    comp = 0
    skipped = []
    for s in basis:
        unit = {s: 1}
        for l2 in letters:
            t = action.forward(s, l2)
            for l in letters:
                u = action.adjoint(t, l) if t is not None else None
                got = {} if u is None else {u: 1}
                iso = max(iso, _diff(got, unit if l == l2 else {}))
        images = [(l, action.adjoint(s, l)) for l in letters]
        if any(u is not None and u not in members for _, u in images):
            if strict:
                raise BasisNotClosedError(f"adjoint image of {s} leaves the basis")
            skipped.append(s)
            continue
        total: dict = {}
        for l, u in images:
            if l in comp_letters and u is not None:
                v = action.forward(u, l)
                total[v] = total.get(v, 0) + 1
        comp = max(comp, _diff(total, unit))
    return CuntzReport(iso, comp, len(basis), skipped)


def phi_matrix(w, w_prime) -> list[list[int]]:
    """Matrix of C -> sum_l V'_l C V_l^* on p' x p coefficient matrices.

    The unit matrix E_{ij} (i indexes shifts of w', j shifts of w) goes to
    E_{i-1, j-1} when the letters w'_{i-1} and w_{j-1} agree, else to 0;
    coordinates are flattened as i * p + j.
    """
    w, wp = as_word(w), as_word(w_prime)
    p, pp = len(w), len(wp)
    n = p * pp
    Phi = [[0] * n for _ in range(n)]
    for i in range(pp):
        for j in range(p):
            if wp[(i - 1) % pp] == w[(j - 1) % p]:
                Phi[((i - 1) % pp) * p + (j - 1) % p][i * p + j] = 1
    return Phi


@dataclass
class IntertwinerSpace:
    w: Word
    w_prime: Word
    dimension: int
    basis: list[list[list[Fraction]]]

    def to_json(self) -> dict:
        return {
            "w": "".join(map(str, self.w)),
            "w_prime": "".join(map(str, self.w_prime)),
            "dimension": self.dimension,
            "basis": [[str(x) for row in C for x in row] for C in self.basis],
        }


def phi_fixed_space(w, w_prime) -> IntertwinerSpace:
    """Exact eigenvalue-1 space of :func:`phi_matrix`, as p' x p matrices."""
    w, wp = as_word(w), as_word(w_prime)
    for x in (w, wp):
        if not is_minimal(x):
            raise NotMinimalError(f"{x} is not minimal")
    Phi = phi_matrix(w, wp)
    n = len(Phi)
    M = [[Phi[i][j] - (i == j) for j in range(n)] for i in range(n)]
    vecs = _exact.nullspace(M)
    p = len(w)
    mats = [[v[i * p:(i + 1) * p] for i in range(len(wp))] for v in vecs]
    return IntertwinerSpace(w, wp, len(vecs), mats)

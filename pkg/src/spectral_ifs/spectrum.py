"""Candidate spectra generated by extreme cycles, and their certification.

``generate_lambda`` closes ``-C`` under ``sigma_l(x) = R^T x + l``; every
generated point carries a witness (seed index, digit word) so that the
adjoint action can walk it back. Orthogonality and completeness are then
measured through the Fourier transform of mu_B.
"""
from __future__ import annotations

import csv
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _exact
from .cuntz import WordState
from .cycles import ExtremeCycle
from .errors import CapExceededError, NotInDualLatticeError, NotInLambdaError
from .ifs import DEFAULT_MU_DEPTH, mu_hat, sigma
from .triple import HadamardTriple, LatticeBasis, RationalVector, dual_lattice

DEFAULT_SPECTRUM_CAP = 2 * 10**6

EncodedWord = WordState


def _norm(x, kind: str) -> float:
    v = np.abs(np.asarray(x, dtype=float))
    if kind == "max":
        return float(v.max(initial=0.0))
    if kind == "euclid":
        return float(np.sqrt((v**2).sum()))
    raise ValueError(f"unknown norm {kind!r}")


@dataclass
class SpectrumSet:
    """A finite, exact truncation of a candidate spectrum.

    ``witness[lam] = (k, word)`` means ``lam = sigma_{word[-1]} ... sigma_{word[0]}(-x_k)``
    for the k-th point of the generating cycle; external spectra have no witnesses.
    """

    elements: tuple[RationalVector, ...]
    provenance: str
    truncation: dict
    witness: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return tuple(map(Fraction, x)) in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.elements)
            self.__dict__["_cached_set"] = s
        return s

    def as_array(self) -> np.ndarray:
        if not self.elements:
            return np.zeros((0, 0))
        return np.array(self.elements, dtype=float)

    def union(self, *others: "SpectrumSet") -> "SpectrumSet":
        elems = set(self.elements)
        witness = dict(self.witness)
        for o in others:
            elems |= set(o.elements)
            witness.update(o.witness)
        return SpectrumSet(tuple(sorted(elems)), "union",
                           {"parts": [self.truncation] + [o.truncation for o in others]}, witness)

    def write_csv(self, path) -> None:
        d = len(self.elements[0]) if self.elements else 0
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"lam{i + 1}" for i in range(d)])
            for lam in self.elements:
                w.writerow([str(c) for c in lam])


def generate_lambda(triple: HadamardTriple, cycle: ExtremeCycle, depth: int | None = None,
                    radius=None, norm: str = "max", cap: int = DEFAULT_SPECTRUM_CAP) -> SpectrumSet:
    """Breadth-first closure of -C under the maps sigma_l.

    ``depth`` bounds the number of sigma applications; ``radius`` drops (and
    stops expanding) points outside the ``norm`` ball. With only a radius the
    search runs until no new points appear. The radius filter is complete for
    the ball whenever the ball is invariant under the inverse maps
    ``t -> (R^T)^{-1}(t - l)``; the truncation descriptor records both knobs.
    """
    if depth is None and radius is None:
        raise ValueError("give a depth, a radius, or both")
    r = None if radius is None else float(radius)
    seeds = [tuple(-c for c in x) for x in cycle.points]
    witness: dict = {}
    frontier = deque()
    for k, s in enumerate(seeds):
        if s not in witness and (r is None or _norm(s, norm) <= r):
            witness[s] = (k, ())
            frontier.append(s)
    level = 0
    while frontier and (depth is None or level < depth):
        nxt = deque()
        for lam in frontier:
            k, word = witness[lam]
            for i, l in enumerate(triple.L):
                mu = sigma(triple, l, lam)
                if mu in witness or (r is not None and _norm(mu, norm) > r):
                    continue
                witness[mu] = (k, word + (i,))
                nxt.append(mu)
                if len(witness) > cap:
                    raise CapExceededError(f"more than {cap} spectrum points")
        frontier = nxt
        level += 1
    trunc = {"depth": depth, "radius": None if radius is None else str(radius), "norm": norm,
             "levels": level}
    return SpectrumSet(tuple(sorted(witness)), "cycle:" + _cycle_id(triple, cycle), trunc, witness)


def _cycle_id(triple: HadamardTriple, cycle: ExtremeCycle) -> str:
    return ";".join(",".join(str(c) for c in x) for x in cycle.points)


def lattice_spectrum(basis: LatticeBasis, radius, norm: str = "max",
                     cap: int = DEFAULT_SPECTRUM_CAP) -> SpectrumSet:
    """All points of a lattice inside a ball, e.g. Z x (1/p)Z for an external spectrum."""
    D = basis.matrix()
    Dinv = np.linalg.inv(np.array(D, dtype=float))
    r = float(radius)
    # |x|_2 <= sqrt(d) |x|_max, so this bound covers both norms
    scale = r * math.sqrt(basis.d) if norm == "euclid" else r
    bounds = [int(math.floor(scale * np.abs(Dinv[i]).sum() + 1e-9)) for i in range(basis.d)]
    if math.prod(2 * b + 1 for b in bounds) > cap:
        raise CapExceededError("lattice ball too large")
    pts = []
    for z in itertools.product(*(range(-b, b + 1) for b in bounds)):
        x = _exact.mat_vec(D, z)
        if _norm(x, norm) <= r:
            pts.append(x)
    return SpectrumSet(tuple(sorted(pts)), "external",
                       {"lattice": [[str(c) for c in v] for v in basis.vectors], "radius": str(radius),
                        "norm": norm})


def peel(triple: HadamardTriple, lam, lattice: LatticeBasis | None = None):
    """The unique (i, lam') with lam = sigma_{L[i]}(lam') and lam' in the dual lattice, or None."""
    lattice = lattice or dual_lattice(triple)
    lam = tuple(map(Fraction, lam))
    hits = []
    for i, l in enumerate(triple.L):
        prev = _exact.mat_vec(triple.RT_inv, [a - b for a, b in zip(lam, l)])
        if prev in lattice:
            hits.append((i, prev))
    assert len(hits) <= 1, "digits of L are not separated modulo R^T of the dual lattice"
    return hits[0] if hits else None


def encode(triple: HadamardTriple, cycle: ExtremeCycle, lam, max_steps: int = 10_000) -> EncodedWord:
    """The infinite word read off by repeatedly applying the unique nonzero adjoint."""
    lattice = dual_lattice(triple)
    lam = tuple(map(Fraction, lam))
    if lam not in lattice:
        raise NotInLambdaError(f"{lam} is not in the dual lattice")
    seeds = {tuple(-c for c in x): k for k, x in enumerate(cycle.points)}
    prefix = []
    seen = set()
    cur = lam
    for _ in range(max_steps):
        if cur in seeds:
            k = seeds[cur]
            return WordState(tuple(prefix), cycle.word[k:] + cycle.word[:k])
        if cur in seen:
            break
        seen.add(cur)
        step = peel(triple, cur, lattice)
        if step is None:
            break
        prefix.append(step[0])
        cur = step[1]
    raise NotInLambdaError(f"{lam} does not reach the cycle")


def s_action_on_exponentials(triple: HadamardTriple, l, lam, adjoint: bool = False,
                             lattice: LatticeBasis | None = None):
    """S_l e_lam = e_{sigma_l(lam)}; S_l^* e_lam = e_lam' if lam = sigma_l(lam'), else None (zero)."""
    lattice = lattice or dual_lattice(triple)
    lam = tuple(map(Fraction, lam))
    if lam not in lattice:
        raise NotInDualLatticeError(f"{lam} is not in the dual lattice")
    i = l if isinstance(l, int) else triple.L.index(l)
    if not adjoint:
        return sigma(triple, triple.L[i], lam)
    step = peel(triple, lam, lattice)
    if step is None or step[0] != i:
        return None
    return step[1]


class ExponentialAction:
    """The Cuntz generators acting on exponentials e_lam, lam in the dual lattice."""

    def __init__(self, triple: HadamardTriple):
        self.triple = triple
        self.lattice = dual_lattice(triple)

    @property
    def letters(self) -> range:
        return range(self.triple.N)

    def forward(self, lam, i):
        return s_action_on_exponentials(self.triple, i, lam, lattice=self.lattice)

    def adjoint(self, lam, i):
        return s_action_on_exponentials(self.triple, i, lam, adjoint=True, lattice=self.lattice)


def orthogonality_defect(triple: HadamardTriple, spectrum, depth: int = DEFAULT_MU_DEPTH) -> float:
    """max |mu_hat(lam - lam')| over distinct pairs; 0 for fewer than two points."""
    pts = spectrum.as_array() if isinstance(spectrum, SpectrumSet) else np.asarray(spectrum, float)
    n = len(pts)
    if n < 2:
        return 0.0
    i, j = np.triu_indices(n, k=1)
    return float(np.max(np.abs(mu_hat(triple, pts[i] - pts[j], depth))))


def completeness_function(triple: HadamardTriple, spectrum, t, depth: int = DEFAULT_MU_DEPTH):
    """sum over the spectrum of |mu_hat(t + lam)|^2, for one t or a batch of shape (S, d)."""
    pts = spectrum.as_array() if isinstance(spectrum, SpectrumSet) else np.asarray(spectrum, float)
    pts = pts.reshape(-1, triple.d)
    t = np.asarray(t, dtype=float)
    single = t.ndim <= 1
    ts = t.reshape(-1, triple.d)
    if len(pts) == 0:
        out = np.zeros(len(ts))
    else:
        out = np.array([np.sum(np.abs(mu_hat(triple, s + pts, depth)) ** 2) for s in ts])
    return float(out[0]) if single else out


def sample_grid(d: int, per_axis: int) -> np.ndarray:
    """Regular grid of per_axis**d points in [0, 1)^d, row-major."""
    axis = np.arange(per_axis) / per_axis
    return np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)


def verification_report(triple: HadamardTriple, spectrum: SpectrumSet, samples, target=None,
                        depth: int = DEFAULT_MU_DEPTH, orth_points: int | None = 200) -> dict:
    """JSON-ready orthogonality and completeness summary.

    ``target`` is a callable t -> expected completeness value (default 1).
    Orthogonality is checked on the first ``orth_points`` elements by norm.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, triple.d)
    pts = spectrum.as_array()
    if orth_points is not None and len(pts) > orth_points:
        order = np.lexsort(pts.T[::-1])
        order = sorted(order, key=lambda k: (np.abs(pts[k]).max(), k))[:orth_points]
        pts = pts[np.sort(order)]
    h = completeness_function(triple, spectrum, samples, depth)
    tgt = np.ones(len(samples)) if target is None else np.array([target(s) for s in samples])
    return {
        "truncation": spectrum.truncation,
        "size": len(spectrum),
        "samples": len(samples),
        "max_orth_defect": orthogonality_defect(triple, pts, depth),
        "completeness_table": [
            {"t": [float(c) for c in s], "h": float(v), "target": float(g), "defect": float(abs(v - g))}
            for s, v, g in zip(samples, h, tgt)
        ],
        "max_completeness_defect": float(np.max(np.abs(h - tgt))) if len(samples) else 0.0,
    }
